#pragma once

/**
 * @file
 * Obstacle input: points, free-standing walls, closed obstacle polygons and the
 * outer boundary cycle that delimits the planning region.
 */

#include "clearway/error.hpp"
#include "clearway/geom.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace clearway {

struct IndexSegment {
    std::size_t a = 0;
    std::size_t b = 0;
    friend bool operator==(const IndexSegment&, const IndexSegment&) = default;
};

struct ObstacleSet {
    std::vector<Point> points;
    std::vector<IndexSegment> segments;
    std::vector<std::vector<std::size_t>> polygons;
    std::vector<std::size_t> boundary;

    // Source line of each item when parsed from text; empty otherwise.
    std::vector<int> point_lines;
    std::vector<int> segment_lines;
    std::vector<int> polygon_lines;
    int boundary_line = 0;

    friend bool operator==(const ObstacleSet& l, const ObstacleSet& r)
    {
        return l.points == r.points && l.segments == r.segments && l.polygons == r.polygons
            && l.boundary == r.boundary;
    }
};

/// One constrained segment after polygon and boundary cycles are expanded.
struct ConstraintSegment {
    std::size_t a = 0;
    std::size_t b = 0;
    /// Number of polygon/boundary cycles using the segment, modulo 2. Crossing a segment of
    /// odd parity toggles between free space and obstacle interior; walls have parity 0.
    int region_parity = 0;
    std::string label;
};

namespace detail {

inline std::string with_line(std::string text, const std::vector<int>& lines, std::size_t i)
{
    if(i < lines.size() && lines[i] > 0)
        text += " (line " + std::to_string(lines[i]) + ")";
    return text;
}

inline std::string point_label(const ObstacleSet& obs, std::size_t i)
{
    return with_line("point " + std::to_string(i), obs.point_lines, i);
}

} // namespace detail

/// Expands polygons and the boundary into segments, merging duplicates.
inline std::vector<ConstraintSegment> constraint_segments(const ObstacleSet& obs)
{
    std::vector<ConstraintSegment> out;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;

    auto add = [&](std::size_t a, std::size_t b, int parity, std::string label) {
        const auto key = std::minmax(a, b);
        if(auto it = seen.find(key); it != seen.end()) {
            out[it->second].region_parity ^= parity;
            return;
        }
        seen.emplace(key, out.size());
        out.push_back({a, b, parity, std::move(label)});
    };

    for(std::size_t i = 0; i < obs.segments.size(); ++i)
        add(obs.segments[i].a, obs.segments[i].b, 0,
            detail::with_line("segment " + std::to_string(i), obs.segment_lines, i));
    for(std::size_t p = 0; p < obs.polygons.size(); ++p) {
        const auto& cyc = obs.polygons[p];
        for(std::size_t k = 0; k < cyc.size(); ++k)
            add(cyc[k], cyc[(k + 1) % cyc.size()], 1,
                detail::with_line("polygon " + std::to_string(p) + " edge " + std::to_string(k),
                                  obs.polygon_lines, p));
    }
    for(std::size_t k = 0; k < obs.boundary.size(); ++k) {
        std::string label = "boundary edge " + std::to_string(k);
        if(obs.boundary_line > 0)
            label += " (line " + std::to_string(obs.boundary_line) + ")";
        add(obs.boundary[k], obs.boundary[(k + 1) % obs.boundary.size()], 1, std::move(label));
    }
    return out;
}

/// Crossing-number point-in-polygon test; points on the outline count as inside.
inline bool inside_cycle(Point p, const std::vector<Point>& poly, const std::vector<std::size_t>& cycle)
{
    bool inside = false;
    const std::size_t n = cycle.size();
    for(std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = poly[cycle[j]];
        const Point b = poly[cycle[i]];
        if(orient2d(a, b, p) == 0 && detail::on_collinear_segment(a, p, b))
            return true;
        if((a.y > p.y) != (b.y > p.y)) {
            // Sign of the crossing abscissa relative to p, decided exactly.
            const int o = orient2d(a, b, p);
            if((b.y > a.y) ? o > 0 : o < 0)
                inside = !inside;
        }
    }
    return inside;
}

namespace detail {

/// Uniform bucket grid over a bounding box, used to find candidate segment pairs.
class BucketGrid {
public:
    BucketGrid(Point lo, Point hi, std::size_t items)
        : lo_(lo)
    {
        const double w = std::max(hi.x - lo.x, 1e-300);
        const double h = std::max(hi.y - lo.y, 1e-300);
        const double cells = std::max<double>(1.0, static_cast<double>(items));
        cell_ = std::sqrt(w * h / cells);
        if(!(cell_ > 0.0))
            cell_ = std::max(w, h);
        nx_ = std::clamp<std::size_t>(static_cast<std::size_t>(w / cell_) + 1, 1, 4096);
        ny_ = std::clamp<std::size_t>(static_cast<std::size_t>(h / cell_) + 1, 1, 4096);
        cellx_ = w / static_cast<double>(nx_);
        celly_ = h / static_cast<double>(ny_);
        buckets_.resize(nx_ * ny_);
    }

    std::pair<std::size_t, std::size_t> cell_of(Point p) const
    {
        auto ix = static_cast<std::size_t>(std::clamp((p.x - lo_.x) / cellx_, 0.0, double(nx_ - 1)));
        auto iy = static_cast<std::size_t>(std::clamp((p.y - lo_.y) / celly_, 0.0, double(ny_ - 1)));
        return {ix, iy};
    }

    template <class Fn>
    void for_cells(Point a, Point b, Fn&& fn) const
    {
        const auto [x0, y0] = cell_of({std::min(a.x, b.x), std::min(a.y, b.y)});
        const auto [x1, y1] = cell_of({std::max(a.x, b.x), std::max(a.y, b.y)});
        for(std::size_t y = y0; y <= y1; ++y)
            for(std::size_t x = x0; x <= x1; ++x)
                fn(x, y);
    }

    std::vector<std::size_t>& bucket(std::size_t x, std::size_t y) { return buckets_[y * nx_ + x]; }
    const std::vector<std::size_t>& bucket(std::size_t x, std::size_t y) const { return buckets_[y * nx_ + x]; }

private:
    Point lo_;
    double cell_ = 1.0, cellx_ = 1.0, celly_ = 1.0;
    std::size_t nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> buckets_;
};

} // namespace detail

/**
 * Checks every structural requirement on an obstacle set and throws InputError on the
 * first violation: finite coordinates, distinct points, valid indices, a closed boundary
 * cycle, segments meeting only at shared endpoints, no point inside a segment, and no
 * point outside the boundary.
 */
inline void validate(const ObstacleSet& obs)
{
    const auto& pts = obs.points;
    auto line_of = [](const std::vector<int>& lines, std::size_t i) { return i < lines.size() ? lines[i] : 0; };

    for(std::size_t i = 0; i < pts.size(); ++i)
        if(!is_finite(pts[i]))
            throw InputError("point " + std::to_string(i) + " has a non-finite coordinate",
                             line_of(obs.point_lines, i));

    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return std::pair(pts[l].x, pts[l].y) < std::pair(pts[r].x, pts[r].y);
    });
    for(std::size_t k = 1; k < order.size(); ++k)
        if(pts[order[k]] == pts[order[k - 1]]) {
            const auto [i, j] = std::minmax(order[k - 1], order[k]);
            throw InputError("duplicate points " + std::to_string(i) + " and " + std::to_string(j),
                             line_of(obs.point_lines, j));
        }

    auto check_index = [&](std::size_t i, const std::string& what, int line) {
        if(i >= pts.size())
            throw InputError(what + " references point " + std::to_string(i) + " out of range", line);
    };
    for(std::size_t s = 0; s < obs.segments.size(); ++s) {
        const int line = line_of(obs.segment_lines, s);
        check_index(obs.segments[s].a, "segment " + std::to_string(s), line);
        check_index(obs.segments[s].b, "segment " + std::to_string(s), line);
        if(obs.segments[s].a == obs.segments[s].b)
            throw InputError("segment " + std::to_string(s) + " has identical endpoints", line);
    }
    auto check_cycle = [&](const std::vector<std::size_t>& cyc, const std::string& what, int line) {
        if(cyc.size() < 3)
            throw InputError(what + " needs at least 3 points", line);
        for(std::size_t i : cyc)
            check_index(i, what, line);
        for(std::size_t k = 0; k < cyc.size(); ++k)
            if(cyc[k] == cyc[(k + 1) % cyc.size()])
                throw InputError(what + " repeats point " + std::to_string(cyc[k]), line);
        double area2 = 0.0;
        for(std::size_t k = 0; k < cyc.size(); ++k)
            area2 += cross(pts[cyc[k]], pts[cyc[(k + 1) % cyc.size()]]);
        if(area2 == 0.0)
            throw InputError(what + " has zero area", line);
    };
    for(std::size_t p = 0; p < obs.polygons.size(); ++p)
        check_cycle(obs.polygons[p], "polygon " + std::to_string(p), line_of(obs.polygon_lines, p));
    if(obs.boundary.empty())
        throw InputError("region not closed: a boundary cycle is required");
    check_cycle(obs.boundary, "boundary", obs.boundary_line);

    const auto segs = constraint_segments(obs);
    if(pts.empty())
        return;
    Point lo = pts[0], hi = pts[0];
    for(const Point& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }

    detail::BucketGrid grid(lo, hi, std::max(segs.size(), pts.size()));
    for(std::size_t s = 0; s < segs.size(); ++s)
        grid.for_cells(pts[segs[s].a], pts[segs[s].b], [&](std::size_t x, std::size_t y) { grid.bucket(x, y).push_back(s); });

    auto crossing_error = [&](std::size_t s, std::size_t t) {
        const auto [i, j] = std::minmax(s, t);
        throw InputError("crossing segments: " + segs[i].label + " and " + segs[j].label);
    };
    auto overlap_at_shared = [&](std::size_t shared, std::size_t u, std::size_t w) {
        const Point o = pts[shared];
        return orient2d(o, pts[u], pts[w]) == 0 && dot(pts[u] - o, pts[w] - o) > 0.0;
    };

    for(std::size_t s = 0; s < segs.size(); ++s) {
        const auto& S = segs[s];
        const Point sa = pts[S.a], sb = pts[S.b];
        const auto [sx0, sy0] = grid.cell_of({std::min(sa.x, sb.x), std::min(sa.y, sb.y)});
        grid.for_cells(sa, sb, [&](std::size_t x, std::size_t y) {
            for(std::size_t t : grid.bucket(x, y)) {
                if(t <= s)
                    continue;
                const auto& T = segs[t];
                const Point ta = pts[T.a], tb = pts[T.b];
                // Test each pair once: in the first cell shared by both bounding boxes.
                const auto [tx0, ty0] = grid.cell_of({std::min(ta.x, tb.x), std::min(ta.y, tb.y)});
                if(x != std::max(sx0, tx0) || y != std::max(sy0, ty0))
                    continue;
                const bool aa = S.a == T.a, ab = S.a == T.b, ba = S.b == T.a, bb = S.b == T.b;
                if(aa || ab || ba || bb) {
                    const std::size_t shared = (aa || ab) ? S.a : S.b;
                    const std::size_t u = shared == S.a ? S.b : S.a;
                    const std::size_t w = shared == T.a ? T.b : T.a;
                    if(overlap_at_shared(shared, u, w))
                        crossing_error(s, t);
                } else if(segments_properly_cross(sa, sb, ta, tb)) {
                    crossing_error(s, t);
                }
            }
        });
    }

    for(std::size_t i = 0; i < pts.size(); ++i) {
        const auto [x, y] = grid.cell_of(pts[i]);
        for(std::size_t s : grid.bucket(x, y)) {
            const auto& S = segs[s];
            if(S.a == i || S.b == i)
                continue;
            if(orient2d(pts[S.a], pts[S.b], pts[i]) == 0 && detail::on_collinear_segment(pts[S.a], pts[i], pts[S.b]))
                throw InputError(detail::point_label(obs, i) + " lies on " + S.label, line_of(obs.point_lines, i));
        }
    }

    std::vector<bool> on_boundary(pts.size(), false);
    for(std::size_t i : obs.boundary)
        on_boundary[i] = true;
    for(std::size_t i = 0; i < pts.size(); ++i)
        if(!on_boundary[i] && !inside_cycle(pts[i], pts, obs.boundary))
            throw InputError(detail::point_label(obs, i) + " lies outside the boundary", line_of(obs.point_lines, i));
}

} // namespace clearway
