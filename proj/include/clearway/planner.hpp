#pragma once

/**
 * @file
 * End-to-end queries: triangulate, refine, build the roadmap once per scenario, then answer
 * clearance queries against it.
 */

#include "clearway/cdt.hpp"
#include "clearway/channel.hpp"
#include "clearway/refine.hpp"
#include "clearway/roadmap.hpp"
#include "clearway/scenario.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <utility>

namespace clearway {

namespace detail {

template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f())
{
    const std::string prefix = std::string(stage) + ": ";
    try {
        return f();
    } catch(const InputError& e) {
        throw InputError(prefix + e.what());
    } catch(const InfeasibleQuery& e) {
        throw InfeasibleQuery(prefix + e.what());
    } catch(const InvariantViolation& e) {
        throw InvariantViolation(prefix + e.what());
    } catch(const MeshError& e) {
        throw MeshError(prefix + e.what());
    } catch(const GeometryError& e) {
        throw GeometryError(prefix + e.what());
    }
}

inline double elapsed_ms(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

inline std::string describe(Point p)
{
    std::string out = "(";
    append_number(out, p.x);
    out += ", ";
    append_number(out, p.y);
    return out + ")";
}

} // namespace detail

/**
 * Containing triangles of start and goal. Throws InputError for a point outside the free
 * region and InfeasibleQuery, naming the nearest obstacle, for a point closer than c to one.
 */
inline std::pair<TriangleId, TriangleId> connect_endpoints(const TriMesh& mesh, const ObstacleSet& obstacles,
                                                           Point start, Point goal, double c)
{
    detail::require_clearance(c);
    const std::vector<ConstraintSegment> segs = constraint_segments(obstacles);
    auto connect = [&](const char* which, Point p) {
        const std::optional<TriangleId> t = mesh.locate(p);
        if(!t)
            throw InputError(std::string(which) + " point " + detail::describe(p) + " is outside the free region");
        double best = INFINITY;
        std::string nearest;
        for(std::size_t i = 0; i < obstacles.points.size(); ++i)
            if(const double d = distance(p, obstacles.points[i]); d < best) {
                best = d;
                nearest = detail::point_label(obstacles, i);
            }
        for(const ConstraintSegment& s : segs)
            if(const double d = distance_to_segment(p, obstacles.points[s.a], obstacles.points[s.b]); d < best) {
                best = d;
                nearest = s.label;
            }
        if(best < c) {
            std::string msg = std::string(which) + " point " + detail::describe(p) + " is ";
            detail::append_number(msg, best);
            throw InfeasibleQuery(msg + " from " + nearest + ", closer than the clearance");
        }
        return *t;
    };
    const TriangleId s = connect("start", start);
    return {s, connect("goal", goal)};
}

struct StageTimes {
    double cdt_ms = 0.0;
    double refine_ms = 0.0;
    double roadmap_ms = 0.0;
    double connect_ms = 0.0;
    double channel_ms = 0.0;
    double path_ms = 0.0;
};

struct QueryReport {
    Query query;
    bool reachable = false;
    TriangleId start_triangle = kNoId;
    TriangleId goal_triangle = kNoId;
    /// Half the widest bottleneck between the endpoint triangles, infinite when they coincide.
    double max_clearance = 0.0;
    std::optional<Channel> channel;
    std::optional<ClearancePath> path;
    double path_length = 0.0;
    double path_clearance = 0.0;
    StageTimes times;
};

/// The refined mesh and roadmap of one obstacle set, shared by all of its queries.
class Planner {
public:
    explicit Planner(const ObstacleSet& obstacles, const RefineOptions& opt = {})
        : obstacles_(obstacles)
    {
        auto t0 = std::chrono::steady_clock::now();
        mesh_ = detail::in_stage("build_cdt", [&] { return build_cdt(obstacles_); });
        times_.cdt_ms = detail::elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        stats_ = detail::in_stage("refine", [&] { return refine(mesh_, opt); });
        times_.refine_ms = detail::elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        graph_ = detail::in_stage("build_roadmap", [&] { return build_roadmap(mesh_); });
        index_.emplace(*graph_);
        times_.roadmap_ms = detail::elapsed_ms(t0);
    }

    const ObstacleSet& obstacles() const { return obstacles_; }
    const TriMesh& mesh() const { return mesh_; }
    const RoadmapGraph& graph() const { return *graph_; }
    const RefineStats& refine_stats() const { return stats_; }

    QueryReport plan(const Query& q) const
    {
        QueryReport r;
        r.query = q;
        r.times = times_;
        auto t0 = std::chrono::steady_clock::now();
        std::tie(r.start_triangle, r.goal_triangle) = detail::in_stage(
            "connect_endpoints", [&] { return connect_endpoints(mesh_, obstacles_, q.start, q.goal, q.clearance); });
        r.times.connect_ms = detail::elapsed_ms(t0);

        t0 = std::chrono::steady_clock::now();
        r.max_clearance = index_->max_clearance(r.start_triangle, r.goal_triangle).value_or(0.0);
        r.channel = detail::in_stage("shortest_channel",
                                     [&] { return shortest_channel(*graph_, r.start_triangle, r.goal_triangle, q.clearance); });
        r.times.channel_ms = detail::elapsed_ms(t0);
        r.reachable = r.channel.has_value();
        if(!r.reachable)
            return r;

        t0 = std::chrono::steady_clock::now();
        r.path = detail::in_stage("extract_path",
                                  [&] { return extract_path(mesh_, *r.channel, q.start, q.goal, q.clearance); });
        r.times.path_ms = detail::elapsed_ms(t0);
        r.path_length = path_length(*r.path);
        r.path_clearance = path_clearance(*r.path, obstacles_);
        return r;
    }

private:
    ObstacleSet obstacles_;
    TriMesh mesh_;
    RefineStats stats_;
    std::optional<RoadmapGraph> graph_;
    std::optional<ClearanceIndex> index_;
    StageTimes times_;
};

inline QueryReport run_query(const Scenario& scenario, const Query& query)
{
    return Planner(scenario.obstacles).plan(query);
}

} // namespace clearway
