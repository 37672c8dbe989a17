#pragma once

/**
 * @file
 * Constrained triangle mesh with full adjacency.
 *
 * Triangles store their corners counter-clockwise. Edge `i` of a triangle is the edge
 * opposite corner `i`, running from corner `i+1` to corner `i+2`; `n[i]` is the triangle
 * across it and `segment[i]` the index of the obstacle segment it lies on (or -1).
 * Sub-edges of a split segment all keep the segment's index, and each segment keeps the
 * ordered chain of mesh vertices covering it.
 */

#include "clearway/error.hpp"
#include "clearway/geom.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace clearway {

using VertexId = std::uint32_t;
using TriangleId = std::uint32_t;
using SegmentId = std::int32_t;

inline constexpr std::uint32_t kNoId = std::numeric_limits<std::uint32_t>::max();
inline constexpr SegmentId kNoSegment = -1;

constexpr int ccw(int i) { return i == 2 ? 0 : i + 1; }
constexpr int cw(int i) { return i == 0 ? 2 : i - 1; }

enum class VertexKind : std::uint8_t { Obstacle, Steiner };

struct Vertex {
    Point position;
    VertexKind kind = VertexKind::Obstacle;
    /// Input point index for obstacle vertices, host segment for Steiner vertices.
    std::uint32_t source = kNoId;
};

struct Triangle {
    std::array<VertexId, 3> v{kNoId, kNoId, kNoId};
    std::array<TriangleId, 3> n{kNoId, kNoId, kNoId};
    std::array<SegmentId, 3> segment{kNoSegment, kNoSegment, kNoSegment};

    bool constrained(int i) const { return segment[i] != kNoSegment; }

    int index_of(VertexId id) const
    {
        for(int i = 0; i < 3; ++i)
            if(v[i] == id)
                return i;
        return -1;
    }

    int constrained_count() const { return int(constrained(0)) + int(constrained(1)) + int(constrained(2)); }
};

/// Edge `index` of triangle `tri`, seen from that triangle.
struct EdgeRef {
    TriangleId tri = kNoId;
    int index = 0;

    friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

struct MeshSegment {
    VertexId a = kNoId;
    VertexId b = kNoId;
    int region_parity = 0;
    std::string label;
    /// Mesh vertices along the segment from a to b. Empty when the segment lies in a
    /// removed (unreachable) part of the plane.
    std::vector<VertexId> chain;
};

struct SplitResult {
    VertexId vertex = kNoId;
    /// Triangles whose shape changed; the first two lie on the hinted side.
    std::vector<TriangleId> touched;
    /// Edges facing the new vertex, one per new triangle, hinted side first.
    std::vector<EdgeRef> outer;
};

namespace detail {
class CdtBuilder;
}

class TriMesh {
public:
    std::span<const Vertex> vertices() const { return vertices_; }
    std::span<const Triangle> triangles() const { return triangles_; }
    std::span<const MeshSegment> segments() const { return segments_; }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }

    const Vertex& vertex(VertexId id) const { return vertices_[id]; }
    const Triangle& triangle(TriangleId id) const { return triangles_[id]; }
    const MeshSegment& segment(SegmentId id) const { return segments_[static_cast<std::size_t>(id)]; }
    Point position(VertexId id) const { return vertices_[id].position; }
    Point corner(TriangleId t, int i) const { return vertices_[triangles_[t].v[i]].position; }

    std::pair<VertexId, VertexId> endpoints(EdgeRef e) const
    {
        const Triangle& t = triangles_[e.tri];
        return {t.v[ccw(e.index)], t.v[cw(e.index)]};
    }

    VertexId opposite(EdgeRef e) const { return triangles_[e.tri].v[e.index]; }
    bool is_constrained(EdgeRef e) const { return triangles_[e.tri].constrained(e.index); }
    SegmentId segment_of(EdgeRef e) const { return triangles_[e.tri].segment[e.index]; }

    double length(EdgeRef e) const
    {
        const auto [a, b] = endpoints(e);
        return distance(position(a), position(b));
    }

    /// The same edge seen from the neighbouring triangle.
    std::optional<EdgeRef> twin(EdgeRef e) const
    {
        const TriangleId u = triangles_[e.tri].n[e.index];
        if(u == kNoId)
            return std::nullopt;
        const Triangle& ut = triangles_[u];
        for(int j = 0; j < 3; ++j)
            if(ut.n[j] == e.tri)
                return EdgeRef{u, j};
        throw InvariantViolation("asymmetric adjacency between triangles " + std::to_string(e.tri) + " and "
                                 + std::to_string(u));
    }

    std::optional<EdgeRef> find_edge(VertexId a, VertexId b) const
    {
        const TriangleId start = vertex_triangle_[a];
        if(start == kNoId)
            return std::nullopt;
        // Counter-clockwise around a, then clockwise if a boundary interrupts the fan.
        for(int dir = 0; dir < 2; ++dir) {
            TriangleId t = start;
            do {
                const Triangle& tri = triangles_[t];
                const int i = tri.index_of(a);
                if(tri.v[ccw(i)] == b)
                    return EdgeRef{t, cw(i)};
                if(tri.v[cw(i)] == b)
                    return EdgeRef{t, ccw(i)};
                t = dir == 0 ? tri.n[ccw(i)] : tri.n[cw(i)];
            } while(t != kNoId && t != start);
            if(t == start)
                break;
        }
        return std::nullopt;
    }

    double triangle_area(TriangleId t) const
    {
        return 0.5 * cross(corner(t, 1) - corner(t, 0), corner(t, 2) - corner(t, 0));
    }

    double area() const
    {
        double s = 0.0;
        for(TriangleId t = 0; t < triangles_.size(); ++t)
            s += triangle_area(t);
        return s;
    }

    /**
     * Replaces the diagonal of the convex quadrilateral around an unconstrained interior
     * edge. With the edge b-c seen from triangle (a,b,c) and d opposite in the neighbour,
     * the pair becomes (a,b,d) in the original slot and (d,c,a) in the neighbour's slot.
     * Returns the new diagonal as edge 1 of (a,b,d).
     */
    EdgeRef flip(EdgeRef e)
    {
        if(is_constrained(e))
            throw MeshError("cannot flip a constrained edge");
        const TriangleId ti = e.tri;
        const TriangleId ui = triangles_[ti].n[e.index];
        if(ui == kNoId)
            throw MeshError("cannot flip a boundary edge");

        const Triangle t = triangles_[ti];
        const Triangle u = triangles_[ui];
        const int i = e.index;
        const VertexId a = t.v[i], b = t.v[ccw(i)], c = t.v[cw(i)];
        int j = 0;
        while(j < 3 && (u.v[j] == b || u.v[j] == c))
            ++j;
        const VertexId d = u.v[j];
        if(u.v[ccw(j)] != c || u.v[cw(j)] != b)
            throw InvariantViolation("inconsistent shared edge in flip");

        if(orient2d(position(a), position(b), position(d)) <= 0 || orient2d(position(d), position(c), position(a)) <= 0)
            throw MeshError("cannot flip an edge whose quadrilateral is not strictly convex");

        const TriangleId t_ab = t.n[cw(i)], t_ca = t.n[ccw(i)];
        const TriangleId t_bd = u.n[ccw(j)], t_dc = u.n[cw(j)];

        Triangle nt;
        nt.v = {a, b, d};
        nt.n = {t_bd, ui, t_ab};
        nt.segment = {u.segment[ccw(j)], kNoSegment, t.segment[cw(i)]};
        Triangle nu;
        nu.v = {d, c, a};
        nu.n = {t_ca, ti, t_dc};
        nu.segment = {t.segment[ccw(i)], kNoSegment, u.segment[cw(j)]};

        store(ti, nt);
        store(ui, nu);
        relink(t_bd, ui, ti);
        relink(t_ca, ti, ui);
        return EdgeRef{ti, 1};
    }

    /**
     * Inserts a Steiner vertex at p into the constrained edge e and splits the triangles on
     * both sides of it. `e.tri` is the hinted side: with e = (a,b) seen from (k,a,b) it
     * becomes (k,a,p) in place plus a new (k,p,b); a neighbour (m,b,a) becomes (m,b,p) in
     * place plus a new (m,p,a).
     *
     * p is snapped onto the line of the original obstacle segment. `tolerance` is relative
     * to the segment length: p must lie within it of the line and farther than it from both
     * edge endpoints.
     */
    SplitResult split_constrained_edge(EdgeRef e, Point p, double tolerance = 1e-12)
    {
        if(!is_constrained(e))
            throw MeshError("split_constrained_edge on an unconstrained edge");
        const SegmentId sid = segment_of(e);
        MeshSegment& seg = segments_[static_cast<std::size_t>(sid)];
        const auto [a, b] = endpoints(e);

        const Point A = position(seg.a), B = position(seg.b);
        const double len = distance(A, B);
        const double t = projection_parameter(p, A, B);
        const Point snapped = A + t * (B - A);
        if(distance(snapped, p) > std::max(tolerance, 1e-9) * len)
            throw MeshError("Steiner point is not on the constrained segment");
        const double ta = projection_parameter(position(a), A, B);
        const double tb = projection_parameter(position(b), A, B);
        if(!(t > std::min(ta, tb) + tolerance && t < std::max(ta, tb) - tolerance))
            throw MeshError("Steiner point is not interior to the constrained edge");

        std::size_t link = 0;
        while(link + 1 < seg.chain.size()
              && !((seg.chain[link] == a && seg.chain[link + 1] == b) || (seg.chain[link] == b && seg.chain[link + 1] == a)))
            ++link;
        if(link + 1 >= seg.chain.size())
            throw InvariantViolation("constrained edge missing from its segment chain");

        const VertexId pv = static_cast<VertexId>(vertices_.size());
        vertices_.push_back({snapped, VertexKind::Steiner, static_cast<std::uint32_t>(sid)});
        vertex_triangle_.push_back(kNoId);
        try {
            SplitResult r = split_edge(e, pv);
            seg.chain.insert(seg.chain.begin() + static_cast<std::ptrdiff_t>(link) + 1, pv);
            return r;
        } catch(...) {
            vertices_.pop_back();
            vertex_triangle_.pop_back();
            throw;
        }
    }

    /// A triangle containing p, lowest id on ties, or nothing outside the meshed region.
    std::optional<TriangleId> locate(Point p) const
    {
        for(TriangleId t = 0; t < triangles_.size(); ++t) {
            const Point a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
            if(p.x < std::min({a.x, b.x, c.x}) || p.x > std::max({a.x, b.x, c.x}) || p.y < std::min({a.y, b.y, c.y})
               || p.y > std::max({a.y, b.y, c.y}))
                continue;
            if(orient2d(a, b, p) >= 0 && orient2d(b, c, p) >= 0 && orient2d(c, a, p) >= 0)
                return t;
        }
        return std::nullopt;
    }

    /// Some triangle incident to the vertex.
    TriangleId incident_triangle(VertexId v) const { return vertex_triangle_[v]; }

private:
    friend class detail::CdtBuilder;

    void store(TriangleId id, const Triangle& t)
    {
        triangles_[id] = t;
        for(VertexId v : t.v)
            vertex_triangle_[v] = id;
    }

    void relink(TriangleId nb, TriangleId from, TriangleId to)
    {
        if(nb == kNoId)
            return;
        for(TriangleId& x : triangles_[nb].n)
            if(x == from) {
                x = to;
                return;
            }
        throw InvariantViolation("neighbour back-link not found");
    }

    // Topological edge split shared by CDT construction and Steiner insertion. The
    // vertex must already exist.
    SplitResult split_edge(EdgeRef e, VertexId pv)
    {
        const TriangleId ti = e.tri;
        const Triangle t = triangles_[ti];
        const int i = e.index;
        const VertexId k = t.v[i], a = t.v[ccw(i)], b = t.v[cw(i)];
        const Point P = position(pv);
        const TriangleId ui = t.n[i];

        if(orient2d(position(k), position(a), P) <= 0 || orient2d(position(k), P, position(b)) <= 0)
            throw MeshError("edge split would create a degenerate triangle");

        Triangle u;
        int j = 0;
        VertexId m = kNoId;
        if(ui != kNoId) {
            u = triangles_[ui];
            while(j < 3 && (u.v[j] == a || u.v[j] == b))
                ++j;
            m = u.v[j];
            if(orient2d(position(m), position(b), P) <= 0 || orient2d(position(m), P, position(a)) <= 0)
                throw MeshError("edge split would create a degenerate triangle");
        }

        const TriangleId t2 = static_cast<TriangleId>(triangles_.size());
        const TriangleId u2 = ui != kNoId ? t2 + 1 : kNoId;
        triangles_.resize(triangles_.size() + (ui != kNoId ? 2 : 1));

        const SegmentId sk = t.segment[i];
        Triangle nt1, nt2;
        nt1.v = {k, a, pv};
        nt1.n = {u2, t2, t.n[cw(i)]};
        nt1.segment = {sk, kNoSegment, t.segment[cw(i)]};
        nt2.v = {k, pv, b};
        nt2.n = {ui, t.n[ccw(i)], ti};
        nt2.segment = {sk, t.segment[ccw(i)], kNoSegment};
        store(ti, nt1);
        store(t2, nt2);
        relink(t.n[ccw(i)], ti, t2);

        SplitResult r;
        r.vertex = pv;
        r.touched = {ti, t2};
        r.outer = {EdgeRef{ti, 2}, EdgeRef{t2, 1}};

        if(ui != kNoId) {
            // u is (m,b,a) from corner j: edge cw(j) is m-b, edge ccw(j) is a-m.
            Triangle nu1, nu2;
            nu1.v = {m, b, pv};
            nu1.n = {t2, u2, u.n[cw(j)]};
            nu1.segment = {sk, kNoSegment, u.segment[cw(j)]};
            nu2.v = {m, pv, a};
            nu2.n = {ti, u.n[ccw(j)], ui};
            nu2.segment = {sk, u.segment[ccw(j)], kNoSegment};
            store(ui, nu1);
            store(u2, nu2);
            relink(u.n[ccw(j)], ui, u2);
            r.touched.push_back(ui);
            r.touched.push_back(u2);
            r.outer.push_back(EdgeRef{ui, 2});
            r.outer.push_back(EdgeRef{u2, 1});
        }
        return r;
    }

    std::vector<Vertex> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<MeshSegment> segments_;
    std::vector<TriangleId> vertex_triangle_;
};

/// Local Delaunay test of an interior edge; constrained edges always pass.
inline bool is_locally_delaunay(const TriMesh& mesh, EdgeRef e)
{
    const auto tw = mesh.twin(e);
    if(!tw)
        throw MeshError("is_locally_delaunay needs an interior edge");
    if(mesh.is_constrained(e))
        return true;
    const Triangle& t = mesh.triangle(e.tri);
    const Point far = mesh.position(mesh.opposite(*tw));
    return incircle(mesh.position(t.v[e.index]), mesh.position(t.v[ccw(e.index)]), mesh.position(t.v[cw(e.index)]), far) <= 0;
}

/// Interior unconstrained edges violating the Delaunay criterion, each reported once.
inline std::vector<EdgeRef> delaunay_violations(const TriMesh& mesh)
{
    std::vector<EdgeRef> bad;
    for(TriangleId t = 0; t < mesh.triangle_count(); ++t)
        for(int i = 0; i < 3; ++i) {
            const TriangleId u = mesh.triangle(t).n[i];
            if(u == kNoId || u < t)
                continue;
            if(!is_locally_delaunay(mesh, EdgeRef{t, i}))
                bad.push_back(EdgeRef{t, i});
        }
    return bad;
}

inline bool is_cdt(const TriMesh& mesh) { return delaunay_violations(mesh).empty(); }

/**
 * Structural self-check: counter-clockwise triangles, symmetric adjacency, matching
 * constraint flags, boundary edges constrained, and segment chains covering their
 * segments with collinear constrained edges. Returns one message per problem.
 */
inline std::vector<std::string> topology_problems(const TriMesh& mesh)
{
    std::vector<std::string> out;
    auto name = [](TriangleId t) { return "triangle " + std::to_string(t); };
    for(TriangleId t = 0; t < mesh.triangle_count(); ++t) {
        const Triangle& tri = mesh.triangle(t);
        if(orient2d(mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2)) <= 0)
            out.push_back(name(t) + " is not counter-clockwise");
        for(int i = 0; i < 3; ++i) {
            const TriangleId u = tri.n[i];
            if(u == kNoId) {
                if(!tri.constrained(i))
                    out.push_back(name(t) + " has an unconstrained boundary edge");
                continue;
            }
            const auto [a, b] = mesh.endpoints(EdgeRef{t, i});
            const Triangle& ut = mesh.triangle(u);
            int j = -1;
            for(int k = 0; k < 3; ++k)
                if(ut.n[k] == t)
                    j = k;
            if(j < 0) {
                out.push_back(name(t) + " is not a neighbour of its neighbour " + std::to_string(u));
                continue;
            }
            const auto [c, d] = mesh.endpoints(EdgeRef{u, j});
            if(c != b || d != a)
                out.push_back(name(t) + " and " + std::to_string(u) + " disagree on their shared edge");
            if(tri.segment[i] != ut.segment[j])
                out.push_back(name(t) + " and " + std::to_string(u) + " disagree on a constraint flag");
        }
    }
    for(std::size_t s = 0; s < mesh.segments().size(); ++s) {
        const MeshSegment& seg = mesh.segments()[s];
        if(seg.chain.empty())
            continue;
        const std::string label = "segment " + std::to_string(s);
        if(seg.chain.front() != seg.a || seg.chain.back() != seg.b)
            out.push_back(label + " chain does not span its endpoints");
        const Point A = mesh.position(seg.a), B = mesh.position(seg.b);
        const double len = distance(A, B);
        double last_t = -1.0;
        for(std::size_t k = 0; k < seg.chain.size(); ++k) {
            const Point P = mesh.position(seg.chain[k]);
            const double t = projection_parameter(P, A, B);
            if(distance(A + t * (B - A), P) > 1e-12 * len)
                out.push_back(label + " chain vertex " + std::to_string(seg.chain[k]) + " is off the segment");
            if(t <= last_t)
                out.push_back(label + " chain is not ordered");
            last_t = t;
            if(k + 1 < seg.chain.size()) {
                const auto e = mesh.find_edge(seg.chain[k], seg.chain[k + 1]);
                if(!e || mesh.segment_of(*e) != static_cast<SegmentId>(s))
                    out.push_back(label + " chain link " + std::to_string(k) + " is not a constrained edge");
            }
        }
    }
    return out;
}

} // namespace clearway
