#pragma once

/**
 * @file
 * Shortest path of clearance c through a channel: the funnel algorithm run on disks of
 * radius c centred on the channel vertices instead of on the vertices themselves.
 *
 * Vertices on the left of the direction of travel are passed with the disk on the path's
 * left, so the path wraps them counter-clockwise; right vertices are wrapped clockwise.
 */

#include "clearway/error.hpp"
#include "clearway/mesh.hpp"
#include "clearway/obstacles.hpp"
#include "clearway/roadmap.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace clearway {

struct PathSegment {
    Point from;
    Point to;
};

struct PathArc {
    Point center;
    double radius = 0.0;
    /// Polar angle of the first point, in radians.
    double from = 0.0;
    /// Angle swept, non-negative.
    double sweep = 0.0;
    /// +1 counter-clockwise, -1 clockwise.
    int turn = 1;

    /// Polar angle of the last point.
    double to() const { return from + turn * sweep; }
    Point at(double angle) const { return center + radius * Point{std::cos(angle), std::sin(angle)}; }
    Point point(double fraction) const { return at(from + turn * fraction * sweep); }
};

using PathElement = std::variant<PathSegment, PathArc>;

enum class Side : std::int8_t { Left = 1, Right = -1 };

/// A vertex the path wraps around.
struct PathContact {
    VertexId vertex = kNoId;
    Side side = Side::Left;
};

struct ClearancePath {
    Point start;
    Point end;
    double clearance = 0.0;
    std::vector<PathElement> elements;
    /// The vertices the path touches, in order, including those whose arc was elided.
    std::vector<PathContact> contacts;
};

namespace detail {

struct Disk {
    Point center;
    /// Signed offset of the path from the centre: +c for left vertices, -c for right ones,
    /// 0 for the start and end points.
    double offset = 0.0;
    VertexId vertex = kNoId;
    /// +1 for left vertices, -1 for right ones, 0 for the endpoints.
    int side = 0;
    /// First and last gate the disk bounds.
    std::size_t gate = 0;
    std::size_t last = 0;
    /// For gate endpoints: the angle the channel's triangles span around the vertex, measured
    /// on the vertex's side from `ref`, the direction to the far end of gate `gate`.
    double fan = -1.0;
    Point ref{};
};

inline constexpr VertexId kStartPoint = kNoId - 1;
inline constexpr VertexId kEndPoint = kNoId - 2;

struct Tangent {
    Point dir;
    Point from;
    Point to;
};

inline Point right_normal(Point u) { return {u.y, -u.x}; }

// Common tangent leaving a on the side given by its offset and reaching b likewise.
inline Tangent tangent(const Disk& a, const Disk& b)
{
    const Point d = b.center - a.center;
    const double d2 = squared_norm(d);
    if(d2 == 0.0)
        return {{1.0, 0.0}, a.center, b.center};
    const double delta = b.offset - a.offset;
    const double len = std::sqrt(std::max(0.0, d2 - delta * delta));
    const Point u = (1.0 / d2) * (len * d - delta * perp(d));
    return {u, a.center + a.offset * right_normal(u), b.center + b.offset * right_normal(u)};
}

/**
 * Whether a string from a to c is held by disk b, i.e. turns around it on b's side. Directions
 * alone fix the turn only up to whole turns, so around a gate endpoint the contact points are
 * placed by angle within the channel's fan, which can exceed a half turn.
 */
inline bool holds(const Disk& a, const Disk& b, const Disk& c)
{
    const Tangent in = tangent(a, b), out = tangent(b, c);
    if(b.fan < 0.0 || b.offset == 0.0)
        return b.side * cross(in.dir, out.dir) > 0.0;
    constexpr double pi = std::numbers::pi;
    auto place = [&](Point contact) {
        const Point p = contact - b.center;
        double angle = b.side * std::atan2(cross(b.ref, p), dot(b.ref, p));
        while(angle < 0.5 * b.fan - pi)
            angle += 2.0 * pi;
        while(angle >= 0.5 * b.fan + pi)
            angle -= 2.0 * pi;
        return angle;
    };
    return place(out.from) > place(in.to);
}

class Funnel {
public:
    explicit Funnel(Disk start)
        : deque_{start}
        , path_{start}
    {}

    void add_left(const Disk& p)
    {
        if(deque_.front().vertex == p.vertex)
            return;
        for(;;) {
            if(apex_ > 0) {
                if(holds(deque_[1], deque_[0], p))
                    break;
                deque_.pop_front();
                --apex_;
                continue;
            }
            if(apex_ + 1 < deque_.size() && holds(deque_[0], deque_[1], p)) {
                deque_.pop_front();
                path_.push_back(deque_.front());
                continue;
            }
            break;
        }
        deque_.push_front(p);
        ++apex_;
    }

    void add_right(const Disk& p)
    {
        if(deque_.back().vertex == p.vertex)
            return;
        for(;;) {
            const std::size_t back = deque_.size() - 1;
            if(back > apex_) {
                if(holds(deque_[back - 1], deque_[back], p))
                    break;
                deque_.pop_back();
                continue;
            }
            if(apex_ > 0 && holds(deque_[apex_], deque_[apex_ - 1], p)) {
                deque_.pop_back();
                --apex_;
                path_.push_back(deque_.back());
                continue;
            }
            break;
        }
        deque_.push_back(p);
    }

    /// Taut disk sequence from the start to `end`.
    std::vector<Disk> finish(const Disk& end)
    {
        add_right(end);
        std::vector<Disk> out = path_;
        for(std::size_t i = apex_ + 1; i < deque_.size(); ++i)
            out.push_back(deque_[i]);
        return out;
    }

private:
    std::deque<Disk> deque_;
    std::size_t apex_ = 0;
    std::vector<Disk> path_;
};

/// Vertices a leg between gates `first` and `last` of the channel has to keep clear of.
struct Clearances {
    std::vector<Disk> disks;
    std::vector<std::vector<std::size_t>> by_gate;
};

/**
 * Overlapping disks let a later disk shadow one the funnel already committed to. Drops disks
 * the string does not turn around and inserts the vertex a leg cuts deepest into, until
 * neither applies. Vertices without a side are passed on the side the leg already leaves them.
 */
inline void tighten(std::vector<Disk>& seq, const Clearances& near, double c)
{
    const std::size_t limit = 4 * (near.disks.size() + 2);
    std::vector<std::size_t> seen(near.disks.size(), 0);
    std::size_t stamp = 0;
    for(std::size_t round = 0; round < limit; ++round) {
        for(std::size_t i = 1; i + 1 < seq.size();) {
            if(holds(seq[i - 1], seq[i], seq[i + 1])) {
                ++i;
                continue;
            }
            seq.erase(seq.begin() + std::ptrdiff_t(i));
            if(seq[i].vertex == seq[i - 1].vertex)
                seq.erase(seq.begin() + std::ptrdiff_t(i));
            if(i > 1)
                --i;
        }
        bool inserted = false;
        for(std::size_t i = 0; i + 1 < seq.size() && !inserted; ++i) {
            const Tangent t = tangent(seq[i], seq[i + 1]);
            const std::size_t lo = std::min(seq[i].gate, seq[i + 1].gate);
            const std::size_t hi = std::min(std::max(seq[i].last, seq[i + 1].last), near.by_gate.size() - 1);
            ++stamp;
            const Disk* worst = nullptr;
            double depth = 1e-9;
            for(std::size_t k = lo; k <= hi; ++k)
                for(std::size_t id : near.by_gate[k]) {
                    const Disk& d = near.disks[id];
                    if(seen[id] == stamp || d.vertex == seq[i].vertex || d.vertex == seq[i + 1].vertex)
                        continue;
                    seen[id] = stamp;
                    const double cut = (c - distance_to_segment(d.center, t.from, t.to)) / c;
                    if(cut > depth) {
                        depth = cut;
                        worst = &d;
                    }
                }
            if(worst) {
                Disk d = *worst;
                if(d.side == 0)
                    d.side = cross(t.dir, d.center - t.from) >= 0.0 ? 1 : -1;
                d.offset = d.side * c;
                seq.insert(seq.begin() + std::ptrdiff_t(i + 1), d);
                inserted = true;
            }
        }
        if(!inserted)
            return;
    }
    throw InvariantViolation("path tightening did not settle");
}

// Gate endpoints with the run of gates they bound, the other corners of the end triangles,
// and the vertices just across the channel's side edges.
inline Clearances clearances(const TriMesh& mesh, const Channel& channel, std::vector<std::pair<Disk, Disk>>& portals,
                             double c)
{
    Clearances out;
    const std::size_t gates = portals.size();
    out.by_gate.resize(std::max<std::size_t>(gates, 1));
    auto add = [&](Disk d) {
        for(std::size_t k = d.gate; k <= d.last; ++k)
            out.by_gate[k].push_back(out.disks.size());
        out.disks.push_back(d);
    };
    for(int side : {1, -1}) {
        for(std::size_t k = 0; k < gates;) {
            auto pick = [&](std::size_t j) -> Disk& { return side > 0 ? portals[j].first : portals[j].second; };
            auto other = [&](std::size_t j) -> Disk& { return side > 0 ? portals[j].second : portals[j].first; };
            std::size_t end = k + 1;
            double fan = 0.0;
            while(end < gates && pick(end).vertex == pick(k).vertex) {
                const Point a = other(end - 1).center - pick(k).center, b = other(end).center - pick(k).center;
                fan += std::atan2(std::abs(cross(a, b)), dot(a, b));
                ++end;
            }
            for(std::size_t j = k; j < end; ++j) {
                pick(j).gate = k;
                pick(j).last = end - 1;
                pick(j).fan = fan;
                pick(j).ref = other(k).center - pick(k).center;
            }
            add(pick(k));
            k = end;
        }
    }
    for(std::size_t k = 0; k < channel.triangles.size(); ++k) {
        const TriangleId t = channel.triangles[k];
        const Triangle& tri = mesh.triangle(t);
        const std::size_t first = k > 0 ? k - 1 : 0;
        const std::size_t last = std::min(k, out.by_gate.size() - 1);
        auto portal_side = [&](VertexId v) {
            int side = 0;
            for(std::size_t j = first; j <= last && j < gates; ++j) {
                if(portals[j].first.vertex == v)
                    side = 1;
                if(portals[j].second.vertex == v)
                    side = -1;
            }
            return side;
        };
        for(int i = 0; i < 3; ++i) {
            const bool entry = k > 0 && tri.n[i] == channel.triangles[k - 1];
            const bool exit = k < gates && tri.n[i] == channel.triangles[k + 1];
            if(portal_side(tri.v[i]) == 0)
                add({mesh.position(tri.v[i]), 0.0, tri.v[i], 0, first, last});
            if(entry || exit || tri.n[i] == kNoId)
                continue;
            const int a = portal_side(tri.v[ccw(i)]), b = portal_side(tri.v[cw(i)]);
            const int side = a == b ? a : (a == 0 ? b : (b == 0 ? a : 0));
            const EdgeRef across = *mesh.twin({t, i});
            const VertexId v = mesh.opposite(across);
            add({mesh.position(v), side * c, v, side, first, last});
        }
    }
    return out;
}

inline bool in_triangle(const TriMesh& mesh, TriangleId t, Point p)
{
    const Point a = mesh.corner(t, 0), b = mesh.corner(t, 1), c = mesh.corner(t, 2);
    return orient2d(a, b, p) >= 0 && orient2d(b, c, p) >= 0 && orient2d(c, a, p) >= 0;
}

} // namespace detail

/**
 * The locally shortest path from start to end that stays inside the channel and keeps
 * distance c from the channel vertices and from the vertices just across its sides. Segments
 * are tangent to the arcs they join. Throws InfeasibleQuery for a gate narrower than 2c or an
 * endpoint within c of one of those vertices, and InputError when the channel or the
 * endpoints do not fit the mesh.
 */
inline ClearancePath extract_path(const TriMesh& mesh, const Channel& channel, Point start, Point end, double c)
{
    if(!(c >= 0.0) || !std::isfinite(c))
        throw InputError("clearance must be a non-negative number");
    if(channel.triangles.empty() || channel.gates.size() + 1 != channel.triangles.size())
        throw InputError("channel needs one gate between each pair of consecutive triangles");
    for(TriangleId t : channel.triangles)
        if(t >= mesh.triangle_count())
            throw InputError("channel names unknown triangle " + std::to_string(t));
    if(!detail::in_triangle(mesh, channel.triangles.front(), start))
        throw InputError("start point is not in triangle " + std::to_string(channel.triangles.front()));
    if(!detail::in_triangle(mesh, channel.triangles.back(), end))
        throw InputError("end point is not in triangle " + std::to_string(channel.triangles.back()));

    std::vector<std::pair<detail::Disk, detail::Disk>> portals;
    for(std::size_t k = 0; k < channel.gates.size(); ++k) {
        const EdgeRef g = channel.gates[k];
        if(g.tri != channel.triangles[k] || mesh.triangle(g.tri).n[g.index] != channel.triangles[k + 1])
            throw InputError("gate " + std::to_string(k) + " does not join triangles "
                             + std::to_string(channel.triangles[k]) + " and " + std::to_string(channel.triangles[k + 1]));
        const Triangle& tri = mesh.triangle(g.tri);
        const VertexId right = tri.v[ccw(g.index)], left = tri.v[cw(g.index)];
        if(mesh.is_constrained(g))
            throw InputError("gate " + std::to_string(k) + " (" + std::to_string(right) + "-" + std::to_string(left)
                             + ") is constrained");
        if(mesh.length(g) < 2.0 * c)
            throw InfeasibleQuery("gate " + std::to_string(k) + " (" + std::to_string(right) + "-"
                                  + std::to_string(left) + ") is narrower than 2c");
        portals.push_back({{mesh.position(left), c, left, 1, k, k}, {mesh.position(right), -c, right, -1, k, k}});
    }
    const detail::Clearances near = detail::clearances(mesh, channel, portals, c);
    for(const auto& [which, p] : {std::pair{"start", start}, std::pair{"end", end}})
        for(const detail::Disk& d : near.disks)
            if(distance(p, d.center) < c * (1.0 - 1e-12))
                throw InfeasibleQuery(std::string(which) + " point is closer than c to vertex " + std::to_string(d.vertex));

    const std::size_t last_gate = portals.empty() ? 0 : portals.size() - 1;
    detail::Funnel funnel({start, 0.0, detail::kStartPoint, 0, 0, 0});
    for(const auto& [l, r] : portals) {
        funnel.add_left(l);
        funnel.add_right(r);
    }
    std::vector<detail::Disk> taut = funnel.finish({end, 0.0, detail::kEndPoint, 0, last_gate, last_gate});
    if(c > 0.0)
        detail::tighten(taut, near, c);

    ClearancePath path{start, end, c, {}, {}};
    std::vector<detail::Tangent> legs;
    for(std::size_t i = 0; i + 1 < taut.size(); ++i)
        legs.push_back(detail::tangent(taut[i], taut[i + 1]));
    for(std::size_t i = 0; i < legs.size(); ++i) {
        if(i > 0) {
            const detail::Disk& d = taut[i];
            path.contacts.push_back({d.vertex, d.side > 0 ? Side::Left : Side::Right});
            if(c > 0.0) {
                const Point in = legs[i - 1].to, out = legs[i].from;
                const int dir = d.side;
                const double a0 = std::atan2(in.y - d.center.y, in.x - d.center.x);
                const double a1 = std::atan2(out.y - d.center.y, out.x - d.center.x);
                constexpr double full = 2.0 * std::numbers::pi;
                double sweep = std::fmod(dir * (a1 - a0), full);
                if(sweep < 0.0)
                    sweep += full;
                // A sweep just under a full turn is a zero turn perturbed by rounding.
                if(sweep > 1e-12 && sweep < full - 1e-9)
                    path.elements.push_back(PathArc{d.center, c, a0, sweep, dir});
            }
        }
        path.elements.push_back(PathSegment{legs[i].from, legs[i].to});
    }
    return path;
}

inline double element_length(const PathElement& e)
{
    if(const auto* s = std::get_if<PathSegment>(&e))
        return distance(s->from, s->to);
    const auto& a = std::get<PathArc>(e);
    return a.radius * a.sweep;
}

inline double path_length(const ClearancePath& path)
{
    double total = 0.0;
    for(const PathElement& e : path.elements)
        total += element_length(e);
    return total;
}

/// Points along the path no further apart than `pitch`, including every element's ends.
inline std::vector<Point> sample_path(const ClearancePath& path, double pitch)
{
    std::vector<Point> out{path.start};
    for(const PathElement& e : path.elements) {
        const int n = std::max(1, int(std::ceil(element_length(e) / pitch)));
        for(int k = 1; k <= n; ++k) {
            const double f = double(k) / n;
            if(const auto* s = std::get_if<PathSegment>(&e))
                out.push_back(s->from + f * (s->to - s->from));
            else
                out.push_back(std::get<PathArc>(e).point(f));
        }
    }
    return out;
}

/**
 * Smallest distance from the path to an obstacle point or segment. Straight elements are
 * measured exactly; arcs are sampled at c/100, but at least a thousandth of the obstacle
 * bounding box diagonal.
 */
inline double path_clearance(const ClearancePath& path, const ObstacleSet& obstacles)
{
    const std::vector<ConstraintSegment> segs = constraint_segments(obstacles);
    double lo_x = INFINITY, lo_y = INFINITY, hi_x = -INFINITY, hi_y = -INFINITY;
    for(Point p : obstacles.points) {
        lo_x = std::min(lo_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_x = std::max(hi_x, p.x);
        hi_y = std::max(hi_y, p.y);
    }
    const double diag = obstacles.points.empty() ? 1.0 : std::hypot(hi_x - lo_x, hi_y - lo_y);
    const double pitch = std::max(path.clearance / 100.0, 1e-3 * diag);

    double best = INFINITY;
    auto to_point = [&](Point q) {
        for(Point p : obstacles.points)
            best = std::min(best, distance(p, q));
        for(const ConstraintSegment& s : segs)
            best = std::min(best, distance_to_segment(q, obstacles.points[s.a], obstacles.points[s.b]));
    };
    if(path.elements.empty())
        to_point(path.start);
    for(const PathElement& e : path.elements) {
        if(const auto* s = std::get_if<PathSegment>(&e)) {
            for(Point p : obstacles.points)
                best = std::min(best, distance_to_segment(p, s->from, s->to));
            for(const ConstraintSegment& cs : segs)
                best = std::min(best, segment_distance(s->from, s->to, obstacles.points[cs.a], obstacles.points[cs.b]));
            continue;
        }
        const auto& a = std::get<PathArc>(e);
        const int n = std::max(1, int(std::ceil(element_length(e) / pitch)));
        for(int k = 0; k <= n; ++k)
            to_point(a.point(double(k) / n));
    }
    return best;
}

} // namespace clearway
