#pragma once

/**
 * @file
 * Dual graph of a refined triangulation and clearance-parametric queries on it.
 *
 * Nodes are triangles, edges are shared unconstrained sides ("gates"). A disk of radius c
 * can move between two triangles of a refined mesh iff they are joined by a path whose
 * gates all have length at least 2c.
 */

#include "clearway/error.hpp"
#include "clearway/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <vector>

namespace clearway {

struct RoadmapNode {
    TriangleId tri = kNoId;
    /// Circumcenter, or the centroid when the circumcenter lies outside the triangle.
    Point anchor;
};

struct RoadmapEdge {
    TriangleId a = kNoId;
    TriangleId b = kNoId;
    /// Index of the shared side in triangle a and in triangle b.
    int side_a = -1;
    int side_b = -1;
    double width = 0.0;
    /// Distance between the two anchors.
    double cost = 0.0;

    TriangleId other(TriangleId t) const { return t == a ? b : a; }
    /// The shared side as seen from t, which must be a or b.
    EdgeRef gate_from(TriangleId t) const { return t == a ? EdgeRef{a, side_a} : EdgeRef{b, side_b}; }
};

/// An ordered run of adjacent triangles. gates[i] is the side of triangles[i] shared with
/// triangles[i + 1].
struct Channel {
    std::vector<TriangleId> triangles;
    std::vector<EdgeRef> gates;
    double cost = 0.0;
};

inline Point triangle_anchor(const TriMesh& mesh, TriangleId t)
{
    const Point a = mesh.corner(t, 0), b = mesh.corner(t, 1), c = mesh.corner(t, 2);
    const Point cc = circumcircle(a, b, c).center;
    if(is_finite(cc) && orient2d(a, b, cc) >= 0 && orient2d(b, c, cc) >= 0 && orient2d(c, a, cc) >= 0)
        return cc;
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

class RoadmapGraph {
public:
    RoadmapGraph() = default;

    explicit RoadmapGraph(const TriMesh& mesh)
    {
        const std::size_t n = mesh.triangle_count();
        nodes_.reserve(n);
        for(TriangleId t = 0; t < n; ++t)
            nodes_.push_back({t, triangle_anchor(mesh, t)});
        for(TriangleId t = 0; t < n; ++t) {
            const Triangle& tri = mesh.triangle(t);
            for(int i = 0; i < 3; ++i) {
                const TriangleId u = tri.n[i];
                if(u == kNoId || u < t || tri.constrained(i))
                    continue;
                const EdgeRef g{t, i};
                const auto tw = mesh.twin(g);
                if(!tw)
                    throw InvariantViolation("triangle " + std::to_string(u) + " does not point back to "
                                             + std::to_string(t));
                edges_.push_back({t, u, i, tw->index, mesh.length(g), distance(nodes_[t].anchor, nodes_[u].anchor)});
            }
        }
        index_edges();
    }

    /// A graph over explicit nodes and edges; node ids must equal their positions.
    RoadmapGraph(std::vector<RoadmapNode> nodes, std::vector<RoadmapEdge> edges)
        : nodes_(std::move(nodes))
        , edges_(std::move(edges))
    {
        for(std::size_t i = 0; i < nodes_.size(); ++i)
            if(nodes_[i].tri != i)
                throw InputError("node " + std::to_string(i) + " has id " + std::to_string(nodes_[i].tri));
        for(const RoadmapEdge& e : edges_) {
            require_node(e.a);
            require_node(e.b);
        }
        index_edges();
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const RoadmapNode& node(TriangleId t) const { return nodes_.at(t); }
    const std::vector<RoadmapNode>& nodes() const { return nodes_; }
    const std::vector<RoadmapEdge>& edges() const { return edges_; }
    const RoadmapEdge& edge(std::size_t k) const { return edges_[k]; }

    /// Indices into edges() of the gates of triangle t, in increasing order.
    std::span<const std::size_t> incident(TriangleId t) const
    {
        return {incidence_.data() + offsets_[t], incidence_.data() + offsets_[t + 1]};
    }

    void require_node(TriangleId t) const
    {
        if(t >= nodes_.size())
            throw InputError("unknown triangle id " + std::to_string(t));
    }

private:
    void index_edges()
    {
        const std::size_t n = nodes_.size();
        offsets_.assign(n + 1, 0);
        for(const RoadmapEdge& e : edges_) {
            ++offsets_[e.a + 1];
            ++offsets_[e.b + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        incidence_.resize(2 * edges_.size());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for(std::size_t k = 0; k < edges_.size(); ++k) {
            incidence_[fill[edges_[k].a]++] = k;
            incidence_[fill[edges_[k].b]++] = k;
        }
    }

    std::vector<RoadmapNode> nodes_;
    std::vector<RoadmapEdge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> incidence_;
};

inline RoadmapGraph build_roadmap(const TriMesh& mesh) { return RoadmapGraph(mesh); }

namespace detail {

inline bool passable(const RoadmapEdge& e, double c) { return e.width >= 2.0 * c; }

inline void require_clearance(double c)
{
    if(!(c >= 0.0))
        throw InputError("clearance must be a non-negative number");
}

} // namespace detail

/// Breadth-first search over gates of width at least 2c.
inline bool reachable(const RoadmapGraph& g, TriangleId src, TriangleId dst, double c)
{
    g.require_node(src);
    g.require_node(dst);
    detail::require_clearance(c);
    if(src == dst)
        return true;
    std::vector<char> seen(g.node_count(), 0);
    std::vector<TriangleId> queue{src};
    seen[src] = 1;
    for(std::size_t head = 0; head < queue.size(); ++head)
        for(std::size_t k : g.incident(queue[head])) {
            const RoadmapEdge& e = g.edge(k);
            const TriangleId v = e.other(queue[head]);
            if(seen[v] || !detail::passable(e, c))
                continue;
            if(v == dst)
                return true;
            seen[v] = 1;
            queue.push_back(v);
        }
    return false;
}

/// Per triangle, 1 when it is reachable from src through gates of width at least 2c.
inline std::vector<char> reachable_from(const RoadmapGraph& g, TriangleId src, double c)
{
    g.require_node(src);
    detail::require_clearance(c);
    std::vector<char> seen(g.node_count(), 0);
    std::vector<TriangleId> queue{src};
    seen[src] = 1;
    for(std::size_t head = 0; head < queue.size(); ++head)
        for(std::size_t k : g.incident(queue[head])) {
            const RoadmapEdge& e = g.edge(k);
            const TriangleId v = e.other(queue[head]);
            if(!seen[v] && detail::passable(e, c)) {
                seen[v] = 1;
                queue.push_back(v);
            }
        }
    return seen;
}

/**
 * Dijkstra over anchor distances restricted to gates of width at least 2c. Among channels
 * of equal cost the one whose predecessors have the lowest ids wins.
 */
inline std::optional<Channel> shortest_channel(const RoadmapGraph& g, TriangleId src, TriangleId dst, double c)
{
    g.require_node(src);
    g.require_node(dst);
    detail::require_clearance(c);
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.node_count(), inf);
    std::vector<std::size_t> via(g.node_count(), std::numeric_limits<std::size_t>::max());
    std::vector<char> done(g.node_count(), 0);
    using Item = std::pair<double, TriangleId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.push({0.0, src});
    while(!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if(done[u])
            continue;
        done[u] = 1;
        if(u == dst)
            break;
        for(std::size_t k : g.incident(u)) {
            const RoadmapEdge& e = g.edge(k);
            const TriangleId v = e.other(u);
            if(done[v] || !detail::passable(e, c))
                continue;
            const double nd = d + e.cost;
            const bool better = nd < dist[v] || (nd == dist[v] && u < g.edge(via[v]).other(v));
            if(better) {
                if(nd < dist[v])
                    heap.push({nd, v});
                dist[v] = nd;
                via[v] = k;
            }
        }
    }
    if(dist[dst] == inf)
        return std::nullopt;

    Channel ch;
    ch.cost = dist[dst];
    for(TriangleId t = dst; t != src; t = g.edge(via[t]).other(t))
        ch.triangles.push_back(t);
    ch.triangles.push_back(src);
    std::reverse(ch.triangles.begin(), ch.triangles.end());
    for(std::size_t i = 0; i + 1 < ch.triangles.size(); ++i)
        ch.gates.push_back(g.edge(via[ch.triangles[i + 1]]).gate_from(ch.triangles[i]));
    return ch;
}

/**
 * Precomputed bottleneck structure for repeated clearance queries: the Kruskal tree of the
 * widest-gate spanning forest. The bottleneck between two triangles is the weight of their
 * lowest common ancestor.
 */
class ClearanceIndex {
public:
    explicit ClearanceIndex(const RoadmapGraph& g)
        : leaves_(g.node_count())
    {
        std::vector<std::size_t> order(g.edge_count());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return g.edge(x).width > g.edge(y).width; });

        std::vector<std::size_t> set(leaves_);
        std::iota(set.begin(), set.end(), 0);
        auto find = [&](std::size_t x) {
            while(set[x] != x)
                x = set[x] = set[set[x]];
            return x;
        };
        // top[r]: tree node at the root of the component whose representative is r.
        std::vector<std::size_t> top(leaves_);
        std::iota(top.begin(), top.end(), 0);
        parent_.assign(leaves_, kNone);
        weight_.assign(leaves_, std::numeric_limits<double>::infinity());
        for(std::size_t k : order) {
            const std::size_t ra = find(g.edge(k).a), rb = find(g.edge(k).b);
            if(ra == rb)
                continue;
            const std::size_t node = parent_.size();
            parent_.push_back(kNone);
            weight_.push_back(g.edge(k).width);
            parent_[top[ra]] = node;
            parent_[top[rb]] = node;
            set[rb] = ra;
            top[ra] = node;
        }

        depth_.assign(parent_.size(), 0);
        for(std::size_t v = parent_.size(); v-- > 0;)
            if(parent_[v] != kNone)
                depth_[v] = depth_[parent_[v]] + 1;
        std::size_t levels = 1;
        while((std::size_t{1} << levels) < parent_.size())
            ++levels;
        up_.assign(levels, std::vector<std::size_t>(parent_.size()));
        for(std::size_t v = 0; v < parent_.size(); ++v)
            up_[0][v] = parent_[v] == kNone ? v : parent_[v];
        for(std::size_t l = 1; l < levels; ++l)
            for(std::size_t v = 0; v < parent_.size(); ++v)
                up_[l][v] = up_[l - 1][up_[l - 1][v]];
    }

    /// Widest achievable bottleneck gate between two triangles; +inf when equal, nullopt
    /// when disconnected.
    std::optional<double> bottleneck(TriangleId src, TriangleId dst) const
    {
        for(TriangleId t : {src, dst})
            if(t >= leaves_)
                throw InputError("unknown triangle id " + std::to_string(t));
        if(src == dst)
            return std::numeric_limits<double>::infinity();
        std::size_t a = src, b = dst;
        if(depth_[a] < depth_[b])
            std::swap(a, b);
        for(std::size_t l = up_.size(); l-- > 0;)
            if(depth_[a] >= depth_[b] + (std::size_t{1} << l))
                a = up_[l][a];
        if(a == b)
            return weight_[a];
        for(std::size_t l = up_.size(); l-- > 0;)
            if(up_[l][a] != up_[l][b]) {
                a = up_[l][a];
                b = up_[l][b];
            }
        if(parent_[a] == kNone || parent_[a] != parent_[b])
            return std::nullopt;
        return weight_[parent_[a]];
    }

    bool reachable(TriangleId src, TriangleId dst, double c) const
    {
        detail::require_clearance(c);
        const auto w = bottleneck(src, dst);
        return w && *w >= 2.0 * c;
    }

    std::optional<double> max_clearance(TriangleId src, TriangleId dst) const
    {
        const auto w = bottleneck(src, dst);
        if(!w)
            return std::nullopt;
        return *w / 2.0;
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::size_t leaves_ = 0;
    std::vector<std::size_t> parent_;
    std::vector<double> weight_;
    std::vector<std::size_t> depth_;
    std::vector<std::vector<std::size_t>> up_;
};

/// Largest c for which dst is reachable from src: half the widest-path bottleneck.
inline std::optional<double> max_clearance(const RoadmapGraph& g, TriangleId src, TriangleId dst)
{
    return ClearanceIndex(g).max_clearance(src, dst);
}

/// One `node id x y` line per triangle, then one `edge a b width cost` line per gate.
inline void write_graph(std::ostream& out, const RoadmapGraph& g)
{
    char buf[160];
    for(const RoadmapNode& n : g.nodes()) {
        std::snprintf(buf, sizeof buf, "node %u %.17g %.17g\n", n.tri, n.anchor.x, n.anchor.y);
        out << buf;
    }
    for(const RoadmapEdge& e : g.edges()) {
        std::snprintf(buf, sizeof buf, "edge %u %u %.17g %.17g\n", e.a, e.b, e.width, e.cost);
        out << buf;
    }
}

} // namespace clearway
