#pragma once

/**
 * @file
 * Random benchmark instances and the refinement timing protocol.
 *
 * Instances have exactly `points` vertices: the four corners of a square boundary of side
 * sqrt(points) plus Poisson-disk points (minimum spacing 0.5) inside it. Short walls join a
 * fraction of the points to a near neighbour; a wall is rejected when it crosses another
 * wall or passes close to a third point, and each point carries at most one wall.
 */

#include "clearway/cdt.hpp"
#include "clearway/refine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace clearway {

struct GeneratorOptions {
    std::size_t points = 1000;
    /// Probability that a point starts a wall to a neighbour.
    double wall_fraction = 0.04;
    std::uint64_t seed = 1;
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1p-53; }

class CellGrid {
public:
    CellGrid(double side, double cell)
        : cell_(cell)
        , dim_(std::max<std::size_t>(1, std::size_t(std::ceil(side / cell))))
        , cells_(dim_ * dim_)
    {}

    std::size_t dim() const { return dim_; }
    std::size_t coord(double v) const { return std::min(dim_ - 1, std::size_t(std::max(0.0, v / cell_))); }
    std::vector<std::uint32_t>& at(std::size_t x, std::size_t y) { return cells_[y * dim_ + x]; }

    /// Calls f(x, y) for every cell meeting the box [lo, hi].
    template <class F>
    void for_box(Point lo, Point hi, F&& f)
    {
        const std::size_t x1 = coord(hi.x), y1 = coord(hi.y);
        for(std::size_t y = coord(lo.y); y <= y1; ++y)
            for(std::size_t x = coord(lo.x); x <= x1; ++x)
                f(x, y);
    }

private:
    double cell_;
    std::size_t dim_;
    std::vector<std::vector<std::uint32_t>> cells_;
};

} // namespace detail

inline ObstacleSet generate_obstacles(const GeneratorOptions& opt)
{
    if(opt.points < 4)
        throw InputError("a benchmark instance needs at least 4 points");
    std::mt19937_64 rng(opt.seed);
    const double side = std::sqrt(double(opt.points));
    const double r = 0.5;

    ObstacleSet obs;
    obs.points = {{0, 0}, {side, 0}, {side, side}, {0, side}};
    obs.boundary = {0, 1, 2, 3};
    obs.points.reserve(opt.points);

    detail::CellGrid grid(side, r);
    for(std::uint32_t i = 0; i < 4; ++i)
        grid.at(grid.coord(obs.points[i].x), grid.coord(obs.points[i].y)).push_back(i);

    auto near_points = [&](Point p, double radius, auto&& f) {
        grid.for_box({p.x - radius, p.y - radius}, {p.x + radius, p.y + radius}, [&](std::size_t x, std::size_t y) {
            for(std::uint32_t i : grid.at(x, y))
                f(i);
        });
    };

    const double span = side - 2.0 * r;
    while(obs.points.size() < opt.points) {
        const Point p{r + span * detail::unit(rng), r + span * detail::unit(rng)};
        bool free = true;
        near_points(p, r, [&](std::uint32_t i) { free = free && squared_distance(p, obs.points[i]) >= r * r; });
        if(!free)
            continue;
        grid.at(grid.coord(p.x), grid.coord(p.y)).push_back(std::uint32_t(obs.points.size()));
        obs.points.push_back(p);
    }

    const double reach = 2.5 * r;
    const double gap = 0.2 * r;
    detail::CellGrid walls(side, reach);
    std::vector<char> used(opt.points, 0);
    std::vector<std::uint32_t> cand;
    for(std::uint32_t i = 4; i < opt.points; ++i) {
        if(used[i] || detail::unit(rng) >= opt.wall_fraction)
            continue;
        const Point a = obs.points[i];
        cand.clear();
        near_points(a, reach, [&](std::uint32_t j) {
            if(j >= 4 && j != i && !used[j] && squared_distance(a, obs.points[j]) <= reach * reach)
                cand.push_back(j);
        });
        if(cand.empty())
            continue;
        const std::uint32_t j = *std::min_element(cand.begin(), cand.end(), [&](std::uint32_t u, std::uint32_t v) {
            const double du = squared_distance(a, obs.points[u]), dv = squared_distance(a, obs.points[v]);
            return du < dv || (du == dv && u < v);
        });
        const Point b = obs.points[j];
        const Point lo{std::min(a.x, b.x), std::min(a.y, b.y)}, hi{std::max(a.x, b.x), std::max(a.y, b.y)};

        bool ok = true;
        grid.for_box({lo.x - gap, lo.y - gap}, {hi.x + gap, hi.y + gap}, [&](std::size_t x, std::size_t y) {
            for(std::uint32_t k : grid.at(x, y))
                ok = ok && (k == i || k == j || distance_to_segment(obs.points[k], a, b) >= gap);
        });
        walls.for_box(lo, hi, [&](std::size_t x, std::size_t y) {
            for(std::uint32_t w : walls.at(x, y)) {
                const IndexSegment& s = obs.segments[w];
                ok = ok && !segments_properly_cross(a, b, obs.points[s.a], obs.points[s.b]);
            }
        });
        if(!ok)
            continue;
        used[i] = used[j] = 1;
        const auto w = std::uint32_t(obs.segments.size());
        obs.segments.push_back({i, j});
        walls.for_box(lo, hi, [&](std::size_t x, std::size_t y) { walls.at(x, y).push_back(w); });
    }
    return obs;
}

struct BenchRow {
    std::size_t points = 0;
    std::size_t triangles = 0;
    std::size_t refined_points = 0;
    std::size_t refined_triangles = 0;
    double time_ms = 0.0;
    double cdt_ms = 0.0;
};

struct BenchOptions {
    RefineOptions refine;
    int warmup = 1;
    int runs = 5;
};

/**
 * Builds each instance's CDT (timed separately, excluded from the refine time), then refines
 * copies of it `warmup + runs` times and reports the median refine time. Runs are interleaved
 * across instances so slow drift in machine load does not land on a single size.
 */
inline std::vector<BenchRow> bench_instances(const std::vector<ObstacleSet>& instances, const BenchOptions& opt = {})
{
    using clock = std::chrono::steady_clock;
    auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };

    std::vector<TriMesh> bases;
    std::vector<BenchRow> rows(instances.size());
    for(std::size_t i = 0; i < instances.size(); ++i) {
        const auto t0 = clock::now();
        bases.push_back(build_cdt(instances[i]));
        rows[i].cdt_ms = ms(clock::now() - t0);
        rows[i].points = bases[i].vertex_count();
        rows[i].triangles = bases[i].triangle_count();
    }

    std::vector<std::vector<double>> times(instances.size());
    for(int k = 0; k < opt.warmup + opt.runs; ++k) {
        for(std::size_t i = 0; i < instances.size(); ++i) {
            TriMesh mesh = bases[i];
            const auto start = clock::now();
            refine(mesh, opt.refine);
            const double t = ms(clock::now() - start);
            BenchRow& row = rows[i];
            if(k == 0) {
                row.refined_points = mesh.vertex_count();
                row.refined_triangles = mesh.triangle_count();
            } else if(mesh.vertex_count() != row.refined_points || mesh.triangle_count() != row.refined_triangles) {
                throw InvariantViolation("refinement differs between identical runs");
            }
            if(k >= opt.warmup)
                times[i].push_back(t);
        }
    }
    for(std::size_t i = 0; i < instances.size(); ++i) {
        std::sort(times[i].begin(), times[i].end());
        if(!times[i].empty())
            rows[i].time_ms = times[i][times[i].size() / 2];
    }
    return rows;
}

inline BenchRow bench_instance(const ObstacleSet& obs, const BenchOptions& opt = {})
{
    return bench_instances({obs}, opt).front();
}

/// Generates one instance per size, all from `seed`, and benchmarks them.
inline std::vector<BenchRow> run_benchmark(const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                           const BenchOptions& opt = {}, double wall_fraction = 0.04)
{
    std::vector<ObstacleSet> instances;
    for(std::size_t n : sizes)
        instances.push_back(generate_obstacles({n, wall_fraction, seed}));
    return bench_instances(instances, opt);
}

inline const char* bench_csv_header() { return "points,triangles,refined_points,refined_triangles,time_ms\n"; }

/// One CSV line; `mask_timing` writes 0 for the time so the output is byte-stable.
inline std::string bench_csv_row(const BenchRow& row, bool mask_timing = false)
{
    char time[32];
    std::snprintf(time, sizeof time, "%.3f", mask_timing ? 0.0 : row.time_ms);
    return std::to_string(row.points) + ',' + std::to_string(row.triangles) + ',' + std::to_string(row.refined_points)
         + ',' + std::to_string(row.refined_triangles) + ',' + time + '\n';
}

} // namespace clearway
