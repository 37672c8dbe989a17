#pragma once

/**
 * @file
 * Constrained Delaunay triangulation of an obstacle set.
 *
 * Points are inserted incrementally in Hilbert order inside a bounding triangle and
 * legalised with Lawson flips. Each obstacle segment is then enforced by flipping away
 * the edges it crosses and re-legalising the new edges. Finally the triangles outside
 * the boundary or inside obstacle polygons are removed by a 0-1 breadth-first traversal
 * that counts crossings of polygon edges.
 */

#include "clearway/mesh.hpp"
#include "clearway/obstacles.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <utility>
#include <vector>

namespace clearway {

namespace detail {

// Hilbert curve index of (x, y) on a 2^16 x 2^16 grid.
inline std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y)
{
    std::uint64_t d = 0;
    for(std::uint32_t s = 1u << 15; s > 0; s >>= 1) {
        const std::uint32_t rx = (x & s) ? 1 : 0;
        const std::uint32_t ry = (y & s) ? 1 : 0;
        d += std::uint64_t(s) * s * ((3 * rx) ^ ry);
        if(ry == 0) {
            if(rx == 1) {
                x = 0xFFFF - x;
                y = 0xFFFF - y;
            }
            std::swap(x, y);
        }
    }
    return d;
}

class CdtBuilder {
public:
    explicit CdtBuilder(const ObstacleSet& obs) : obs_(obs) {}

    TriMesh build()
    {
        validate(obs_);
        segments_ = constraint_segments(obs_);
        init_super_triangle();
        insert_points();
        insert_constraints();
        return finish();
    }

private:
    void init_super_triangle()
    {
        const auto& pts = obs_.points;
        Point lo = pts[0], hi = pts[0];
        for(const Point& p : pts) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }
        lo_ = lo;
        hi_ = hi;
        const Point c = midpoint(lo, hi);
        const double size = std::max({hi.x - lo.x, hi.y - lo.y, 1.0});
        const double r = 64.0 * size;

        auto& m = mesh_;
        m.vertices_.reserve(pts.size() + 3);
        for(std::size_t i = 0; i < pts.size(); ++i)
            m.vertices_.push_back({pts[i], VertexKind::Obstacle, static_cast<std::uint32_t>(i)});
        super_ = static_cast<VertexId>(pts.size());
        m.vertices_.push_back({{c.x - r, c.y - r}, VertexKind::Obstacle, kNoId});
        m.vertices_.push_back({{c.x + r, c.y - r}, VertexKind::Obstacle, kNoId});
        m.vertices_.push_back({{c.x, c.y + r}, VertexKind::Obstacle, kNoId});
        m.vertex_triangle_.assign(m.vertices_.size(), kNoId);
        m.triangles_.reserve(2 * pts.size() + 8);
        m.triangles_.emplace_back();
        Triangle t;
        t.v = {super_, super_ + 1, super_ + 2};
        m.store(0, t);
    }

    void insert_points()
    {
        const auto& pts = obs_.points;
        const double w = std::max(hi_.x - lo_.x, 1e-300);
        const double h = std::max(hi_.y - lo_.y, 1e-300);
        std::vector<std::pair<std::uint64_t, VertexId>> order(pts.size());
        for(std::size_t i = 0; i < pts.size(); ++i) {
            const auto qx = static_cast<std::uint32_t>(std::clamp((pts[i].x - lo_.x) / w, 0.0, 1.0) * 65535.0);
            const auto qy = static_cast<std::uint32_t>(std::clamp((pts[i].y - lo_.y) / h, 0.0, 1.0) * 65535.0);
            order[i] = {hilbert_index(qx, qy), static_cast<VertexId>(i)};
        }
        std::sort(order.begin(), order.end());

        TriangleId hint = 0;
        std::vector<std::pair<TriangleId, int>> stack;
        for(const auto& [key, v] : order) {
            const Point p = mesh_.position(v);
            const TriangleId t = walk(hint, p);
            const Triangle& tri = mesh_.triangles_[t];
            int on_edge = -1;
            for(int i = 0; i < 3; ++i) {
                const Point a = mesh_.position(tri.v[ccw(i)]);
                const Point b = mesh_.position(tri.v[cw(i)]);
                if(a == p || b == p)
                    throw InputError("duplicate point " + std::to_string(v));
                if(orient2d(a, b, p) == 0)
                    on_edge = i;
            }
            stack.clear();
            if(on_edge >= 0) {
                const SplitResult r = mesh_.split_edge(EdgeRef{t, on_edge}, v);
                for(TriangleId s : r.touched)
                    stack.emplace_back(s, mesh_.triangles_[s].index_of(v));
            } else {
                for(TriangleId s : split_triangle(t, v))
                    stack.emplace_back(s, 0);
            }
            legalize(stack);
            hint = mesh_.vertex_triangle_[v];
        }
    }

    // Visibility walk; terminates because the mesh is Delaunay during point insertion.
    TriangleId walk(TriangleId t, Point p) const
    {
        int start = 0;
        for(;;) {
            const Triangle& tri = mesh_.triangles_[t];
            bool moved = false;
            for(int k = 0; k < 3; ++k) {
                const int i = (start + k) % 3;
                if(orient2d(mesh_.position(tri.v[ccw(i)]), mesh_.position(tri.v[cw(i)]), p) < 0) {
                    t = tri.n[i];
                    if(t == kNoId)
                        throw InvariantViolation("point location left the bounding triangle");
                    moved = true;
                    break;
                }
            }
            if(!moved)
                return t;
            start = (start + 1) % 3;
        }
    }

    std::array<TriangleId, 3> split_triangle(TriangleId ti, VertexId p)
    {
        const Triangle t = mesh_.triangles_[ti];
        const VertexId a = t.v[0], b = t.v[1], c = t.v[2];
        const TriangleId t1 = static_cast<TriangleId>(mesh_.triangles_.size());
        const TriangleId t2 = t1 + 1;
        mesh_.triangles_.resize(mesh_.triangles_.size() + 2);

        Triangle n0, n1, n2;
        n0.v = {p, b, c};
        n0.n = {t.n[0], t1, t2};
        n0.segment = {t.segment[0], kNoSegment, kNoSegment};
        n1.v = {p, c, a};
        n1.n = {t.n[1], t2, ti};
        n1.segment = {t.segment[1], kNoSegment, kNoSegment};
        n2.v = {p, a, b};
        n2.n = {t.n[2], ti, t1};
        n2.segment = {t.segment[2], kNoSegment, kNoSegment};
        mesh_.store(ti, n0);
        mesh_.store(t1, n1);
        mesh_.store(t2, n2);
        mesh_.relink(t.n[1], ti, t1);
        mesh_.relink(t.n[2], ti, t2);
        return {ti, t1, t2};
    }

    // Lawson flips around a freshly inserted vertex. Entries are (triangle, corner of the vertex).
    void legalize(std::vector<std::pair<TriangleId, int>>& stack)
    {
        while(!stack.empty()) {
            const auto [t, ip] = stack.back();
            stack.pop_back();
            const EdgeRef e{t, ip};
            const Triangle& tri = mesh_.triangles_[t];
            const TriangleId u = tri.n[ip];
            if(u == kNoId || tri.constrained(ip))
                continue;
            const auto tw = mesh_.twin(e);
            const Point far = mesh_.position(mesh_.opposite(*tw));
            if(incircle(mesh_.position(tri.v[ip]), mesh_.position(tri.v[ccw(ip)]), mesh_.position(tri.v[cw(ip)]), far) <= 0)
                continue;
            mesh_.flip(e);
            // (p,b,d) keeps slot t with p at corner 0; (d,c,p) takes slot u with p at corner 2.
            stack.emplace_back(t, 0);
            stack.emplace_back(u, 2);
        }
    }

    void insert_constraints()
    {
        mesh_.segments_.reserve(segments_.size());
        for(std::size_t s = 0; s < segments_.size(); ++s) {
            const auto& cs = segments_[s];
            MeshSegment ms;
            ms.a = static_cast<VertexId>(cs.a);
            ms.b = static_cast<VertexId>(cs.b);
            ms.region_parity = cs.region_parity;
            ms.label = cs.label;
            mesh_.segments_.push_back(std::move(ms));
            insert_constraint(static_cast<SegmentId>(s));
        }
    }

    void mark(EdgeRef e, SegmentId s)
    {
        mesh_.triangles_[e.tri].segment[e.index] = s;
        if(const auto tw = mesh_.twin(e))
            mesh_.triangles_[tw->tri].segment[tw->index] = s;
    }

    std::string vertex_name(VertexId v) const { return detail::point_label(obs_, v); }

    void insert_constraint(SegmentId s)
    {
        const VertexId a = mesh_.segments_[s].a;
        const VertexId b = mesh_.segments_[s].b;
        const std::string& label = segments_[static_cast<std::size_t>(s)].label;
        if(const auto e = mesh_.find_edge(a, b)) {
            mark(*e, s);
            return;
        }

        const Point pa = mesh_.position(a), pb = mesh_.position(b);
        std::deque<std::pair<VertexId, VertexId>> crossing;

        // Find the triangle around a whose wedge contains the direction to b.
        TriangleId t = mesh_.vertex_triangle_[a];
        const TriangleId start = t;
        int edge = -1;
        VertexId left = kNoId, right = kNoId;
        do {
            const Triangle& tri = mesh_.triangles_[t];
            const int i = tri.index_of(a);
            const VertexId v1 = tri.v[ccw(i)], v2 = tri.v[cw(i)];
            for(VertexId v : {v1, v2})
                if(orient2d(pa, pb, mesh_.position(v)) == 0 && dot(mesh_.position(v) - pa, pb - pa) > 0.0)
                    throw InputError(vertex_name(v) + " lies on " + label);
            if(orient2d(pa, pb, mesh_.position(v1)) < 0 && orient2d(pa, pb, mesh_.position(v2)) > 0) {
                edge = i;
                right = v1;
                left = v2;
                break;
            }
            t = tri.n[ccw(i)];
        } while(t != kNoId && t != start);
        if(edge < 0)
            throw InvariantViolation("constraint walk found no starting triangle for " + label);

        for(;;) {
            const EdgeRef e{t, edge};
            if(mesh_.is_constrained(e))
                throw InputError("crossing segments: " + label + " and "
                                 + segments_[static_cast<std::size_t>(mesh_.segment_of(e))].label);
            crossing.emplace_back(right, left);
            const auto tw = mesh_.twin(e);
            if(!tw)
                throw InvariantViolation("constraint walk left the triangulation");
            const VertexId w = mesh_.opposite(*tw);
            if(w == b)
                break;
            const int o = orient2d(pa, pb, mesh_.position(w));
            if(o == 0)
                throw InputError(vertex_name(w) + " lies on " + label);
            const Triangle& ut = mesh_.triangles_[tw->tri];
            if(o > 0) {
                edge = ut.index_of(left);
                left = w;
            } else {
                edge = ut.index_of(right);
                right = w;
            }
            t = tw->tri;
        }

        auto crosses = [&](VertexId x, VertexId y) {
            const Point px = mesh_.position(x), py = mesh_.position(y);
            return orient2d(pa, pb, px) * orient2d(pa, pb, py) < 0 && orient2d(px, py, pa) * orient2d(px, py, pb) < 0;
        };

        std::vector<std::pair<VertexId, VertexId>> fresh;
        std::size_t stalled = 0;
        while(!crossing.empty()) {
            const auto [x, y] = crossing.front();
            crossing.pop_front();
            const auto e = mesh_.find_edge(x, y);
            if(!e)
                throw InvariantViolation("crossing edge vanished while enforcing " + label);
            const auto tw = mesh_.twin(*e);
            const auto [eb, ec] = mesh_.endpoints(*e);
            const Point qa = mesh_.position(mesh_.opposite(*e));
            const Point qd = mesh_.position(mesh_.opposite(*tw));
            if(orient2d(qa, mesh_.position(eb), qd) <= 0 || orient2d(qd, mesh_.position(ec), qa) <= 0) {
                crossing.emplace_back(x, y);
                if(++stalled > 2 * crossing.size() + 8)
                    throw InvariantViolation("constraint enforcement stalled on " + label);
                continue;
            }
            stalled = 0;
            const auto [nx, ny] = mesh_.endpoints(mesh_.flip(*e));
            if(crosses(nx, ny))
                crossing.emplace_back(nx, ny);
            else
                fresh.emplace_back(nx, ny);
        }

        const auto ab = mesh_.find_edge(a, b);
        if(!ab)
            throw InvariantViolation("constraint " + label + " missing after enforcement");
        mark(*ab, s);

        for(bool swapped = true; swapped;) {
            swapped = false;
            for(auto& [x, y] : fresh) {
                const auto e = mesh_.find_edge(x, y);
                if(!e || mesh_.is_constrained(*e) || !mesh_.twin(*e))
                    continue;
                if(!is_locally_delaunay(mesh_, *e)) {
                    const auto [nx, ny] = mesh_.endpoints(mesh_.flip(*e));
                    x = nx;
                    y = ny;
                    swapped = true;
                }
            }
        }
    }

    TriMesh finish()
    {
        auto& tris = mesh_.triangles_;
        const std::size_t nt = tris.size();

        // depth = number of odd-parity segments crossed from the outside.
        std::vector<int> depth(nt, -1);
        std::deque<TriangleId> queue;
        TriangleId seed = mesh_.vertex_triangle_[super_];
        depth[seed] = 0;
        queue.push_back(seed);
        while(!queue.empty()) {
            const TriangleId t = queue.front();
            queue.pop_front();
            for(int i = 0; i < 3; ++i) {
                const TriangleId u = tris[t].n[i];
                if(u == kNoId)
                    continue;
                const SegmentId s = tris[t].segment[i];
                const int w = (s != kNoSegment && mesh_.segments_[s].region_parity) ? 1 : 0;
                if(depth[u] >= 0 && depth[u] <= depth[t] + w)
                    continue;
                depth[u] = depth[t] + w;
                if(w == 0)
                    queue.push_front(u);
                else
                    queue.push_back(u);
            }
        }

        std::vector<TriangleId> tri_map(nt, kNoId);
        TriangleId kept = 0;
        for(TriangleId t = 0; t < nt; ++t)
            if(depth[t] % 2 == 1)
                tri_map[t] = kept++;
        if(kept == 0)
            throw InputError("region not closed: no free space inside the boundary");

        std::vector<VertexId> vert_map(mesh_.vertices_.size(), kNoId);
        for(TriangleId t = 0; t < nt; ++t)
            if(tri_map[t] != kNoId)
                for(VertexId v : tris[t].v)
                    vert_map[v] = 0;
        VertexId nv = 0;
        for(VertexId v = 0; v < vert_map.size(); ++v)
            if(vert_map[v] != kNoId)
                vert_map[v] = nv++;

        TriMesh out;
        out.vertices_.reserve(nv);
        for(VertexId v = 0; v < vert_map.size(); ++v)
            if(vert_map[v] != kNoId) {
                if(v >= super_)
                    throw InvariantViolation("bounding-triangle vertex survived region classification");
                out.vertices_.push_back(mesh_.vertices_[v]);
            }
        out.triangles_.resize(kept);
        out.vertex_triangle_.assign(nv, kNoId);
        for(TriangleId t = 0; t < nt; ++t) {
            if(tri_map[t] == kNoId)
                continue;
            Triangle nt2 = tris[t];
            for(int i = 0; i < 3; ++i) {
                nt2.v[i] = vert_map[nt2.v[i]];
                nt2.n[i] = nt2.n[i] == kNoId ? kNoId : tri_map[nt2.n[i]];
                if(nt2.n[i] == kNoId && nt2.segment[i] == kNoSegment)
                    throw InvariantViolation("unconstrained edge on the border of the free region");
            }
            out.store(tri_map[t], nt2);
        }
        out.segments_ = std::move(mesh_.segments_);
        for(MeshSegment& seg : out.segments_) {
            const VertexId a = vert_map[seg.a], b = vert_map[seg.b];
            seg.a = a == kNoId ? kNoId : a;
            seg.b = b == kNoId ? kNoId : b;
            seg.chain.clear();
            if(a != kNoId && b != kNoId && out.find_edge(a, b))
                seg.chain = {a, b};
        }
        return out;
    }

    const ObstacleSet& obs_;
    std::vector<ConstraintSegment> segments_;
    TriMesh mesh_;
    VertexId super_ = 0;
    Point lo_, hi_;
};

} // namespace detail

/// Constrained Delaunay triangulation of the free region described by `obstacles`.
inline TriMesh build_cdt(const ObstacleSet& obstacles)
{
    return detail::CdtBuilder(obstacles).build();
}

} // namespace clearway
