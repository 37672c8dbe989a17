#pragma once

/**
 * @file
 * Exhaustive search for problematic vertices. This is the reference the refiner is
 * tested against and is far too slow for production use (cubic in the mesh size).
 *
 * A vertex X is problematic for the sides [A1A2], [A1A3] of a triangle (|A1A2| <= |A1A3|,
 * both unconstrained) when X lies strictly on A1's side of line A2A3, its orthogonal
 * projection X' falls inside a constrained edge and is visible from X, the segment
 * [XX'] meets [A2A3], and |XX'| < min(|A1A2|, |XA2|, |XA3|).
 */

#include "clearway/mesh.hpp"
#include "clearway/refine.hpp"

#include <vector>

namespace clearway {

struct ProblematicVertex {
    VertexId x = kNoId;
    SidePair pair;
    /// The constrained edge containing the projection of x.
    EdgeRef edge;
    Point projection;
};

namespace detail {

struct ProjectionCandidate {
    VertexId x;
    EdgeRef edge;
    Point projection;
    double dist2;
};

// [x, x'] is not blocked by a constrained edge other than the target. Edges incident to x
// only block when they run along the sight line.
inline bool visible(const TriMesh& mesh, const std::vector<EdgeRef>& constrained, VertexId x, Point xp,
                    std::pair<VertexId, VertexId> target)
{
    const Point px = mesh.position(x);
    for(const EdgeRef& e : constrained) {
        const auto [a, b] = mesh.endpoints(e);
        if(std::minmax(a, b) == std::minmax(target.first, target.second))
            continue;
        const Point pa = mesh.position(a), pb = mesh.position(b);
        if(a == x || b == x) {
            const Point other = a == x ? pb : pa;
            if(orient2d(px, xp, other) == 0 && dot(other - px, xp - px) > 0.0)
                return false;
            continue;
        }
        if(segments_properly_cross(px, xp, pa, pb))
            return false;
    }
    return true;
}

} // namespace detail

/**
 * Every (vertex, side pair, constrained edge) triple satisfying the definition above.
 * Projections closer to an endpoint than `tolerance` times the larger of the edge length
 * and |XX'| are ignored: rounding in the projection scales with both, and the refiner
 * cannot place a Steiner point there.
 */
inline std::vector<ProblematicVertex> find_problematic_vertices(const TriMesh& mesh, double tolerance = 1e-12)
{
    std::vector<EdgeRef> constrained;
    for(TriangleId t = 0; t < mesh.triangle_count(); ++t)
        for(int i = 0; i < 3; ++i) {
            const Triangle& tri = mesh.triangle(t);
            if(tri.constrained(i) && (tri.n[i] == kNoId || tri.n[i] > t))
                constrained.push_back({t, i});
        }

    std::vector<detail::ProjectionCandidate> cands;
    for(VertexId x = 0; x < mesh.vertex_count(); ++x) {
        const Point px = mesh.position(x);
        for(const EdgeRef& e : constrained) {
            const auto [a, b] = mesh.endpoints(e);
            if(a == x || b == x)
                continue;
            const Point pa = mesh.position(a), pb = mesh.position(b);
            const auto xp = project_onto_segment_interior(px, pa, pb);
            if(!xp)
                continue;
            const double limit = tolerance * std::max(distance(pa, pb), distance(px, *xp));
            if(distance(*xp, pa) <= limit || distance(*xp, pb) <= limit)
                continue;
            if(!detail::visible(mesh, constrained, x, *xp, {a, b}))
                continue;
            cands.push_back({x, e, *xp, squared_distance(px, *xp)});
        }
    }

    std::vector<ProblematicVertex> out;
    for(TriangleId t = 0; t < mesh.triangle_count(); ++t)
        for(int a1 = 0; a1 < 3; ++a1) {
            const SidePair sp = side_pair(mesh, t, a1);
            if(!is_candidate(mesh, sp))
                continue;
            const Point A1 = mesh.corner(t, sp.a1), A2 = mesh.corner(t, sp.a2), A3 = mesh.corner(t, sp.a3);
            const double l12 = squared_distance(A1, A2);
            const int side = orient2d(A2, A3, A1);
            for(const auto& c : cands) {
                const Point X = mesh.position(c.x);
                if(c.dist2 >= l12 || orient2d(A2, A3, X) != side)
                    continue;
                if(!(c.dist2 < squared_distance(X, A2) && c.dist2 < squared_distance(X, A3)))
                    continue;
                if(!segments_properly_cross(X, c.projection, A2, A3))
                    continue;
                out.push_back({c.x, sp, c.edge, c.projection});
            }
        }
    return out;
}

} // namespace clearway
