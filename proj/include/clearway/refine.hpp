#pragma once

/**
 * @file
 * Steiner-point refinement of a constrained Delaunay triangulation.
 *
 * For every triangle A1A2A3 whose sides A1A2 and A1A3 are both unconstrained (with
 * |A1A2| <= |A1A3|) the refiner asks whether some vertex near A1 could be closer to a
 * constrained segment beyond A2A3 than the traversed sides are long. The question is
 * answered by a walk through the triangulation from A2A3, first for A1 and then for the
 * point P where the line through A1 parallel to A2A3 meets the circumcircle again. A hit
 * inserts the projection of A1 onto the constrained edge found, splits the triangles on
 * both sides of that edge and restores the Delaunay property around the new vertex.
 *
 * Afterwards the dual graph of the mesh is a clearance roadmap: a disk of radius c fits
 * through a channel whenever every traversed side is at least 2c long.
 */

#include "clearway/error.hpp"
#include "clearway/geom.hpp"
#include "clearway/mesh.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

namespace clearway {

struct CheckResult {
    bool found = false;
    /// The constrained edge hit by the walk, seen from the side the walk came from.
    std::optional<EdgeRef> hit_edge;
};

enum class Schedule {
    /// Triangles with exactly one constrained side are inspected first, then FIFO.
    OneConstrainedSideFirst,
    /// Plain triangle-id order with no prioritisation; a test mode for worst-case studies.
    Naive,
};

struct RefineOptions {
    Schedule schedule = Schedule::OneConstrainedSideFirst;
    /// Relative tolerance for Steiner placement: projections within this fraction of the
    /// segment length of an existing vertex are skipped.
    double tolerance = 1e-12;
    /// Run a full Delaunay and topology scan after every insertion (slow; for tests).
    bool verify_each_step = false;
};

struct RefineStats {
    std::size_t steiner_inserted = 0;
    std::size_t points_before = 0;
    std::size_t points_after = 0;
    std::size_t triangles_before = 0;
    std::size_t triangles_after = 0;
    std::size_t check_calls = 0;
    std::size_t flips = 0;
    std::size_t skipped_near_endpoint = 0;
    std::size_t skipped_duplicate = 0;
    std::size_t rounds = 0;
    std::chrono::nanoseconds wall_time{0};
};

/// The side pair of triangle `tri` meeting at corner `a1`, shorter side first.
struct SidePair {
    TriangleId tri = kNoId;
    int a1 = 0;
    /// Corner of the shorter side's far endpoint (A2); A3 is the remaining corner.
    int a2 = 0;
    int a3 = 0;
};

/// Orders the sides at corner `a1` of triangle `t`. Equal lengths keep the ccw corner as A2.
inline SidePair side_pair(const TriMesh& mesh, TriangleId t, int a1)
{
    const Point p1 = mesh.corner(t, a1);
    int a2 = ccw(a1), a3 = cw(a1);
    if(squared_distance(p1, mesh.corner(t, a3)) < squared_distance(p1, mesh.corner(t, a2)))
        std::swap(a2, a3);
    return {t, a1, a2, a3};
}

/// Both sides at the A1 corner are unconstrained.
inline bool is_candidate(const TriMesh& mesh, const SidePair& sp)
{
    const Triangle& tri = mesh.triangle(sp.tri);
    return !tri.constrained(ccw(sp.a1)) && !tri.constrained(cw(sp.a1));
}

/// The pair can only admit problematic vertices if A1 projects inside [A2A3].
inline bool needs_check(const TriMesh& mesh, const SidePair& sp)
{
    return project_onto_segment_interior(mesh.corner(sp.tri, sp.a1), mesh.corner(sp.tri, sp.a2),
                                         mesh.corner(sp.tri, sp.a3))
        .has_value();
}

/**
 * Looks for a constrained edge, reached by crossing `start`, that contains a point closer
 * than `lambda` to x. `start` is seen from the triangle on x's side. At each unconstrained
 * edge the walk continues into the longer of the two far sides of the next triangle.
 */
inline CheckResult check(const TriMesh& mesh, Point x, EdgeRef start, double lambda)
{
    const double lambda2 = lambda * lambda;
    EdgeRef e = start;
    for(std::size_t steps = 0; steps <= mesh.triangle_count(); ++steps) {
        const auto [vi, vj] = mesh.endpoints(e);
        const Point pi = mesh.position(vi), pj = mesh.position(vj);
        const auto xp = project_onto_segment_interior(x, pi, pj);
        if(!xp || squared_distance(x, *xp) >= lambda2)
            return {};
        if(mesh.is_constrained(e))
            return {true, e};
        const auto tw = mesh.twin(e);
        if(!tw)
            throw InvariantViolation("check walked onto an unconstrained border edge");
        const Triangle& far = mesh.triangle(tw->tri);
        const Point pk = mesh.position(far.v[tw->index]);
        if(squared_distance(pk, pi) >= squared_distance(pk, pj))
            e = EdgeRef{tw->tri, far.index_of(vj)};
        else
            e = EdgeRef{tw->tri, far.index_of(vi)};
    }
    throw InvariantViolation("check walk did not terminate");
}

/**
 * Restores the Delaunay property around vertex `a1` starting from `edge`, which must be
 * the side opposite `a1` in its triangle. Each illegal edge is flipped and the two sides
 * of the new triangles facing away from `a1` are examined in turn.
 * Returns the number of flips performed.
 */
inline std::size_t flip_if_needed(TriMesh& mesh, VertexId a1, EdgeRef edge, std::vector<TriangleId>* touched = nullptr)
{
    std::size_t flips = 0;
    std::vector<EdgeRef> stack{edge};
    while(!stack.empty()) {
        const EdgeRef e = stack.back();
        stack.pop_back();
        const Triangle& t = mesh.triangle(e.tri);
        if(t.v[e.index] != a1)
            throw InvariantViolation("flip_if_needed edge is not opposite the new vertex");
        if(t.constrained(e.index) || t.n[e.index] == kNoId)
            continue;
        const auto tw = mesh.twin(e);
        const Point a4 = mesh.position(mesh.opposite(*tw));
        if(incircle(mesh.position(a1), mesh.corner(e.tri, ccw(e.index)), mesh.corner(e.tri, cw(e.index)), a4) <= 0)
            continue;
        const TriangleId u = tw->tri;
        mesh.flip(e);
        ++flips;
        if(touched) {
            touched->push_back(e.tri);
            touched->push_back(u);
        }
        // Now (a1,A2,A4) in e.tri and (A4,A3,a1) in u: [A2A4] first, then [A4A3].
        stack.push_back(EdgeRef{u, 2});
        stack.push_back(EdgeRef{e.tri, 0});
    }
    return flips;
}

enum class SidePairOutcome { NotCandidate, NoCheckNeeded, NoHit, Inserted, SkippedNearEndpoint, SkippedDuplicate };

struct SidePairResult {
    SidePairOutcome outcome = SidePairOutcome::NotCandidate;
    VertexId steiner = kNoId;
    /// Triangles created or reshaped by the insertion and its flips.
    std::vector<TriangleId> touched;
};

/**
 * One iteration of the refinement loop body for the side pair at corner `a1` of `t`.
 * On a hit the projection of A1 onto the constrained edge is inserted, not the projection
 * of P.
 */
inline SidePairResult process_side_pair(TriMesh& mesh, TriangleId t, int a1, RefineStats& stats,
                                        const RefineOptions& opt = {})
{
    SidePairResult res;
    const SidePair sp = side_pair(mesh, t, a1);
    if(!is_candidate(mesh, sp))
        return res;
    if(!needs_check(mesh, sp)) {
        res.outcome = SidePairOutcome::NoCheckNeeded;
        return res;
    }

    const VertexId v1 = mesh.triangle(t).v[a1];
    const Point A1 = mesh.position(v1), A2 = mesh.corner(t, sp.a2), A3 = mesh.corner(t, sp.a3);
    const double lambda = distance(A1, A2);
    const EdgeRef base{t, a1};

    ++stats.check_calls;
    CheckResult hit = check(mesh, A1, base, lambda);
    if(!hit.found) {
        const Point P = apex_point(A1, A2, A3);
        if(P != A1) {
            ++stats.check_calls;
            hit = check(mesh, P, base, lambda);
        }
    }
    if(!hit.found) {
        res.outcome = SidePairOutcome::NoHit;
        return res;
    }

    // A1 is projected onto the line of the whole obstacle segment; after earlier splits the
    // projection can lie in a neighbouring link of the chain rather than the edge hit.
    EdgeRef e = *hit.hit_edge;
    const MeshSegment& seg = mesh.segment(mesh.segment_of(e));
    const Point A = mesh.position(seg.a), B = mesh.position(seg.b);
    const double s = projection_parameter(A1, A, B);
    const Point proj = A + s * (B - A);
    const double limit = opt.tolerance * distance(A, B);
    auto skip = [&](VertexId near) {
        if(near != kNoId && mesh.vertex(near).kind == VertexKind::Steiner) {
            res.outcome = SidePairOutcome::SkippedDuplicate;
            ++stats.skipped_duplicate;
        } else {
            res.outcome = SidePairOutcome::SkippedNearEndpoint;
            ++stats.skipped_near_endpoint;
        }
        return res;
    };
    if(!(s > 0.0 && s < 1.0))
        return skip(kNoId);

    auto [vi, vj] = mesh.endpoints(e);
    auto param = [&](VertexId v) { return projection_parameter(mesh.position(v), A, B); };
    if(!(std::min(param(vi), param(vj)) < s && s < std::max(param(vi), param(vj)))) {
        const auto& chain = seg.chain;
        const auto it = std::upper_bound(chain.begin() + 1, chain.end() - 1, s,
                                         [&](double x, VertexId v) { return x < param(v); });
        vi = *(it - 1);
        vj = *it;
        const auto link = mesh.find_edge(vi, vj);
        if(!link)
            throw InvariantViolation("segment chain link is not a mesh edge");
        e = *link;
    }
    for(VertexId end : {vi, vj})
        if(!(distance(proj, mesh.position(end)) > limit))
            return skip(end);

    const SplitResult split = mesh.split_constrained_edge(e, proj, opt.tolerance);
    ++stats.steiner_inserted;
    res.outcome = SidePairOutcome::Inserted;
    res.steiner = split.vertex;
    res.touched = split.touched;
    for(const EdgeRef& o : split.outer)
        stats.flips += flip_if_needed(mesh, split.vertex, o, &res.touched);

    if(opt.verify_each_step) {
        if(const auto bad = delaunay_violations(mesh); !bad.empty())
            throw InvariantViolation("Delaunay property lost after inserting Steiner vertex "
                                     + std::to_string(split.vertex));
        if(const auto probs = topology_problems(mesh); !probs.empty())
            throw InvariantViolation("topology broken after Steiner insertion: " + probs.front());
    }
    return res;
}

/**
 * Refines the mesh to a fixpoint: rounds over a work queue are repeated until a full
 * round inserts nothing. The mesh must be a constrained Delaunay triangulation.
 */
inline RefineStats refine(TriMesh& mesh, const RefineOptions& opt = {})
{
    RefineStats stats;
    const auto t0 = std::chrono::steady_clock::now();
    stats.points_before = mesh.vertex_count();
    stats.triangles_before = mesh.triangle_count();

    std::deque<TriangleId> queue;
    std::vector<char> queued;
    auto push = [&](TriangleId t) {
        if(t >= queued.size())
            queued.resize(mesh.triangle_count(), 0);
        if(!queued[t]) {
            queued[t] = 1;
            queue.push_back(t);
        }
    };

    for(;;) {
        ++stats.rounds;
        queued.assign(mesh.triangle_count(), 0);
        if(opt.schedule == Schedule::OneConstrainedSideFirst) {
            for(TriangleId t = 0; t < mesh.triangle_count(); ++t)
                if(mesh.triangle(t).constrained_count() == 1)
                    push(t);
        }
        for(TriangleId t = 0; t < mesh.triangle_count(); ++t)
            push(t);

        std::size_t inserted = 0;
        while(!queue.empty()) {
            const TriangleId t = queue.front();
            queue.pop_front();
            queued[t] = 0;
            for(int a1 = 0; a1 < 3; ++a1) {
                SidePairResult r = process_side_pair(mesh, t, a1, stats, opt);
                if(r.outcome != SidePairOutcome::Inserted)
                    continue;
                ++inserted;
                for(TriangleId s : r.touched)
                    push(s);
                break;
            }
        }
        if(inserted == 0)
            break;
    }

    stats.points_after = mesh.vertex_count();
    stats.triangles_after = mesh.triangle_count();
    stats.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0);
    return stats;
}

} // namespace clearway
