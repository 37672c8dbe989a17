#include "clearway/clearway.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace clearway;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInput = 1, kInfeasible = 2, kInternal = 3 };

struct Common {
    double tolerance = 1e-12;
    bool naive = false;
    bool mask_timing = false;
    std::string format = "text";

    RefineOptions refine() const
    {
        RefineOptions opt;
        opt.tolerance = tolerance;
        opt.schedule = naive ? Schedule::Naive : Schedule::OneConstrainedSideFirst;
        return opt;
    }
    double time(double ms) const { return mask_timing ? 0.0 : ms; }
};

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if(!out || !(out << text))
        throw InputError("cannot write " + path);
}

std::string fixed3(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

ordered_json point_json(Point p) { return ordered_json::array({p.x, p.y}); }

ordered_json path_json(const ClearancePath& path)
{
    ordered_json elements = ordered_json::array();
    for(const PathElement& e : path.elements) {
        if(const auto* s = std::get_if<PathSegment>(&e)) {
            elements.push_back({{"type", "segment"}, {"from", point_json(s->from)}, {"to", point_json(s->to)}});
        } else {
            const auto& a = std::get<PathArc>(e);
            elements.push_back({{"type", "arc"},
                                {"center", point_json(a.center)},
                                {"radius", a.radius},
                                {"from_angle", a.from},
                                {"sweep", a.sweep},
                                {"turn", a.turn}});
        }
    }
    return elements;
}

RefineStats refine_with_time(TriMesh& mesh, const Common& common, double& ms)
{
    const auto t0 = std::chrono::steady_clock::now();
    RefineStats st = refine(mesh, common.refine());
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return st;
}

int cmd_refine(const std::string& file, const std::string& svg, const std::string& stats, const Common& common)
{
    const Scenario sc = read_scenario(file);
    TriMesh mesh = build_cdt(sc.obstacles);
    double ms = 0.0;
    const RefineStats st = refine_with_time(mesh, common, ms);
    BenchRow row{st.points_before, st.triangles_before, st.points_after, st.triangles_after, ms, 0.0};
    const std::string csv = bench_csv_header() + bench_csv_row(row, common.mask_timing);
    if(!svg.empty())
        write_file(svg, render_svg(mesh));
    if(!stats.empty())
        write_file(stats, csv);

    if(common.format == "svg") {
        std::cout << render_svg(mesh);
    } else if(common.format == "csv") {
        std::cout << csv;
    } else if(common.format == "json") {
        ordered_json j{{"points", st.points_before},
                       {"triangles", st.triangles_before},
                       {"refined_points", st.points_after},
                       {"refined_triangles", st.triangles_after},
                       {"steiner_inserted", st.steiner_inserted},
                       {"flips", st.flips},
                       {"skipped_near_endpoint", st.skipped_near_endpoint},
                       {"skipped_duplicate", st.skipped_duplicate},
                       {"time_ms", common.time(ms)}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "points " << st.points_before << " -> " << st.points_after << ", triangles " << st.triangles_before
                  << " -> " << st.triangles_after << ", steiner " << st.steiner_inserted << ", "
                  << fixed3(common.time(ms)) << " ms\n";
    }
    return kOk;
}

int cmd_query(const std::string& file, const std::string& svg, const Common& common)
{
    const Scenario sc = read_scenario(file);
    if(sc.queries.empty())
        throw InputError("no queries in " + file);
    const Planner planner(sc.obstacles, common.refine());

    int status = kOk;
    SvgOverlay overlay;
    overlay.graph = &planner.graph();
    ordered_json all = ordered_json::array();
    std::ostringstream text;
    if(common.format == "csv")
        text << "line,start_x,start_y,goal_x,goal_y,clearance,verdict,max_clearance,path_length,path_clearance\n";

    for(const Query& q : sc.queries) {
        std::optional<QueryReport> r;
        std::string error;
        try {
            r = planner.plan(q);
        } catch(const InfeasibleQuery& e) {
            error = e.what();
        }
        const char* verdict = error.empty() ? (r->reachable ? "reachable" : "unreachable") : "infeasible";
        if(!error.empty() || !r->reachable)
            status = kInfeasible;
        if(r && r->path)
            overlay.paths.push_back(*r->path);
        if(r && !overlay.source) {
            overlay.source = r->start_triangle;
            overlay.clearance = q.clearance;
        }

        if(common.format == "json") {
            ordered_json j{{"line", q.line},
                           {"start", point_json(q.start)},
                           {"goal", point_json(q.goal)},
                           {"clearance", q.clearance},
                           {"verdict", verdict}};
            if(!error.empty())
                j["error"] = error;
            if(r) {
                j["max_clearance"] = r->max_clearance;
                if(r->channel)
                    j["channel"] = r->channel->triangles;
                if(r->path) {
                    j["path_length"] = r->path_length;
                    j["path_clearance"] = r->path_clearance;
                    j["path"] = path_json(*r->path);
                }
                const StageTimes& t = r->times;
                j["times_ms"] = {{"build_cdt", common.time(t.cdt_ms)},   {"refine", common.time(t.refine_ms)},
                                 {"build_roadmap", common.time(t.roadmap_ms)}, {"connect_endpoints", common.time(t.connect_ms)},
                                 {"shortest_channel", common.time(t.channel_ms)}, {"extract_path", common.time(t.path_ms)}};
            }
            all.push_back(std::move(j));
        } else if(common.format == "csv") {
            ordered_json row = ordered_json::array({q.line, q.start.x, q.start.y, q.goal.x, q.goal.y, q.clearance});
            text << q.line << ',' << row[1].dump() << ',' << row[2].dump() << ',' << row[3].dump() << ','
                 << row[4].dump() << ',' << row[5].dump() << ',' << verdict << ',';
            if(r)
                text << ordered_json(r->max_clearance).dump();
            text << ',';
            if(r && r->path)
                text << ordered_json(r->path_length).dump() << ',' << ordered_json(r->path_clearance).dump();
            else
                text << ',';
            text << '\n';
        } else if(common.format == "text") {
            text << "line " << q.line << ": " << verdict;
            if(!error.empty())
                text << " (" << error << ")";
            if(r && r->path)
                text << ", length " << r->path_length << ", clearance " << r->path_clearance << ", "
                     << r->channel->triangles.size() << " triangles";
            else if(r)
                text << ", max clearance " << r->max_clearance;
            text << '\n';
        }
    }

    const std::string drawing = render_svg(planner.mesh(), overlay);
    if(!svg.empty())
        write_file(svg, drawing);
    if(common.format == "json")
        std::cout << all.dump(2) << '\n';
    else if(common.format == "svg")
        std::cout << drawing;
    else
        std::cout << text.str();
    return status;
}

std::vector<std::size_t> parse_sizes(const std::string& list)
{
    std::vector<std::size_t> sizes;
    std::stringstream in(list);
    for(std::string item; std::getline(in, item, ',');) {
        std::size_t n = 0;
        const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), n);
        if(ec != std::errc() || end != item.data() + item.size() || n < 4)
            throw InputError("bad size '" + item + "' (expected an integer of at least 4)");
        if(!sizes.empty() && n < sizes.back())
            throw InputError("sizes must be ascending");
        sizes.push_back(n);
    }
    if(sizes.empty())
        throw InputError("no sizes given");
    return sizes;
}

int cmd_bench(const std::string& sizes, std::uint64_t seed, const std::string& out, double wall_fraction, int runs,
              const Common& common)
{
    BenchOptions opt;
    opt.refine = common.refine();
    opt.runs = runs;
    const auto rows = run_benchmark(parse_sizes(sizes), seed, opt, wall_fraction);
    std::string csv = bench_csv_header();
    for(const BenchRow& r : rows)
        csv += bench_csv_row(r, common.mask_timing);
    if(!out.empty())
        write_file(out, csv);
    if(out.empty() || common.format == "csv")
        std::cout << csv;
    return kOk;
}

int cmd_check(const std::string& file, const Common& common)
{
    const Scenario sc = read_scenario(file);
    TriMesh mesh = build_cdt(sc.obstacles);
    double ms = 0.0;
    const RefineStats st = refine_with_time(mesh, common, ms);
    const auto problems = find_problematic_vertices(mesh, common.tolerance);
    const auto delaunay = delaunay_violations(mesh);
    const auto topology = topology_problems(mesh);
    const bool ok = problems.empty() && delaunay.empty() && topology.empty();

    if(common.format == "json") {
        ordered_json j{{"ok", ok},
                       {"steiner_inserted", st.steiner_inserted},
                       {"problematic_vertices", problems.size()},
                       {"delaunay_violations", delaunay.size()},
                       {"topology_problems", topology}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << (ok ? "ok" : "violation") << ": " << st.steiner_inserted << " steiner points, " << problems.size()
                  << " problematic vertices, " << delaunay.size() << " delaunay violations, " << topology.size()
                  << " topology problems\n";
        for(const auto& p : problems)
            std::cout << "  problematic vertex " << p.x << " at " << detail::describe(mesh.position(p.x)) << '\n';
        for(const EdgeRef& e : delaunay) {
            const auto [a, b] = mesh.endpoints(e);
            std::cout << "  non-delaunay edge " << a << "-" << b << '\n';
        }
        for(const std::string& t : topology)
            std::cout << "  " << t << '\n';
    }
    return ok ? kOk : kInternal;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Clearance-aware path planning on constrained Delaunay triangulations"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--tolerance", common.tolerance, "relative tolerance for Steiner placement")
            ->check(CLI::NonNegativeNumber);
        cmd->add_flag("--naive-order", common.naive, "refine in plain triangle order");
        cmd->add_flag("--mask-timing", common.mask_timing, "write 0 for every time so output is byte-stable");
    };

    std::string file, svg, stats, out, sizes;
    std::uint64_t seed = 1;
    double wall_fraction = 0.04;
    int runs = 5;

    CLI::App* refine_cmd = app.add_subcommand("refine", "triangulate and refine an obstacle set");
    refine_cmd->add_option("file", file, "scenario file")->required();
    refine_cmd->add_option("--svg", svg, "write the refined mesh as SVG");
    refine_cmd->add_option("--stats", stats, "write refinement statistics as CSV");
    refine_cmd->add_option("--format", common.format, "stdout format")->check(CLI::IsMember({"text", "svg", "csv", "json"}));
    add_common(refine_cmd);

    CLI::App* query_cmd = app.add_subcommand("query", "answer the scenario's clearance queries");
    query_cmd->add_option("file", file, "scenario file")->required();
    query_cmd->add_option("--svg", svg, "write the mesh, reachability and paths as SVG");
    query_cmd->add_option("--format", common.format, "stdout format")->check(CLI::IsMember({"text", "svg", "csv", "json"}));
    add_common(query_cmd);

    CLI::App* bench_cmd = app.add_subcommand("bench", "time refinement on random instances");
    bench_cmd->add_option("--sizes", sizes, "comma-separated ascending vertex counts")->required();
    bench_cmd->add_option("--seed", seed, "generator seed");
    bench_cmd->add_option("--out", out, "CSV output file");
    bench_cmd->add_option("--wall-fraction", wall_fraction, "probability that a point starts a wall")
        ->check(CLI::Range(0.0, 1.0));
    bench_cmd->add_option("--runs", runs, "timed runs per size, after one warmup")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--format", common.format, "stdout format")->check(CLI::IsMember({"text", "csv"}));
    add_common(bench_cmd);

    CLI::App* check_cmd = app.add_subcommand("check", "refine, then verify the result with brute-force oracles");
    check_cmd->add_option("file", file, "scenario file")->required();
    check_cmd->add_option("--format", common.format, "stdout format")->check(CLI::IsMember({"text", "json"}));
    add_common(check_cmd);

    try {
        app.parse(argc, argv);
    } catch(const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if(*refine_cmd)
            return cmd_refine(file, svg, stats, common);
        if(*query_cmd)
            return cmd_query(file, svg, common);
        if(*bench_cmd)
            return cmd_bench(sizes, seed, out, wall_fraction, runs, common);
        return cmd_check(file, common);
    } catch(const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch(const GeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch(const InfeasibleQuery& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch(const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
