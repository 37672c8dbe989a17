#include "clearway/cdt.hpp"
#include "clearway/channel.hpp"
#include "clearway/refine.hpp"
#include "clearway/roadmap.hpp"
#include "support/paths.hpp"
#include "support/scenes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <queue>
#include <random>

using namespace clearway;

namespace {

ObstacleSet square(double s)
{
    ObstacleSet obs;
    obs.points = {{0, 0}, {s, 0}, {s, s}, {0, s}};
    obs.boundary = {0, 1, 2, 3};
    return obs;
}

// Room [0,10]^2 with a wall rising from the floor to V = (5,6).
ObstacleSet wall_room()
{
    ObstacleSet obs;
    obs.points = {{0, 0}, {5, 0}, {10, 0}, {10, 10}, {0, 10}, {5, 6}};
    obs.boundary = {0, 1, 2, 3, 4};
    obs.segments = {{1, 5}};
    return obs;
}

TriMesh refined(const ObstacleSet& obs)
{
    TriMesh m = build_cdt(obs);
    refine(m);
    return m;
}

ClearancePath plan(const TriMesh& m, Point s, Point e, double c)
{
    const RoadmapGraph g(m);
    const auto ch = shortest_channel(g, *m.locate(s), *m.locate(e), c);
    if(!ch)
        throw InfeasibleQuery("no channel");
    return extract_path(m, *ch, s, e, c);
}

// Shortest path inside the union of the channel triangles through visibility between the
// endpoints and the channel vertices. Visibility is decided by dense sampling.
double sleeve_shortest_path(const TriMesh& m, const Channel& ch, Point s, Point e)
{
    std::vector<Point> nodes{s, e};
    std::vector<VertexId> seen;
    for(TriangleId t : ch.triangles)
        for(VertexId v : m.triangle(t).v)
            if(std::find(seen.begin(), seen.end(), v) == seen.end()) {
                seen.push_back(v);
                nodes.push_back(m.position(v));
            }
    auto inside = [&](Point p) {
        for(TriangleId t : ch.triangles) {
            const Point a = m.corner(t, 0), b = m.corner(t, 1), c = m.corner(t, 2);
            const double eps = 1e-12;
            if(cross(b - a, p - a) >= -eps && cross(c - b, p - b) >= -eps && cross(a - c, p - c) >= -eps)
                return true;
        }
        return false;
    };
    auto visible = [&](Point p, Point q) {
        for(int k = 1; k < 2000; ++k)
            if(!inside(p + (k / 2000.0) * (q - p)))
                return false;
        return true;
    };
    std::vector<double> dist(nodes.size(), INFINITY);
    std::vector<char> done(nodes.size(), 0);
    dist[0] = 0.0;
    for(;;) {
        std::size_t u = nodes.size();
        for(std::size_t i = 0; i < nodes.size(); ++i)
            if(!done[i] && (u == nodes.size() || dist[i] < dist[u]))
                u = i;
        if(u == nodes.size() || dist[u] == INFINITY)
            break;
        done[u] = 1;
        for(std::size_t v = 0; v < nodes.size(); ++v)
            if(!done[v] && dist[u] + distance(nodes[u], nodes[v]) < dist[v] && visible(nodes[u], nodes[v]))
                dist[v] = dist[u] + distance(nodes[u], nodes[v]);
    }
    return dist[1];
}

Point element_start(const PathElement& e)
{
    if(const auto* s = std::get_if<PathSegment>(&e))
        return s->from;
    return std::get<PathArc>(e).point(0.0);
}

Point element_end(const PathElement& e)
{
    if(const auto* s = std::get_if<PathSegment>(&e))
        return s->to;
    return std::get<PathArc>(e).point(1.0);
}

struct RandomCase {
    ObstacleSet obs;
    TriMesh mesh;
    Channel channel;
    Point start, end;
    double c;
};

// Random refined scene, clearance and pair of free endpoints joined by a channel.
std::optional<RandomCase> random_case(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    test::SceneParams prm;
    prm.vertices = 40;
    prm.walls = 6;
    prm.polygons = 2;
    RandomCase rc{test::random_scene(seed, prm), {}, {}, {}, {}, 0.0};
    rc.mesh = refined(rc.obs);
    const auto segs = constraint_segments(rc.obs);
    rc.c = std::uniform_real_distribution<double>(0.02, 0.3)(rng);
    const RoadmapGraph g(rc.mesh);
    for(int attempt = 0; attempt < 50; ++attempt) {
        const auto s = test::random_free_point(rng, rc.mesh, rc.obs, segs, rc.c);
        const auto e = test::random_free_point(rng, rc.mesh, rc.obs, segs, rc.c);
        if(!s || !e)
            continue;
        auto ch = shortest_channel(g, *rc.mesh.locate(*s), *rc.mesh.locate(*e), rc.c);
        if(!ch || ch->triangles.size() < 3)
            continue;
        rc.channel = *ch;
        rc.start = *s;
        rc.end = *e;
        return rc;
    }
    return std::nullopt;
}

} // namespace

TEST(ExtractPath, StraightWhenUnobstructed)
{
    const TriMesh m = build_cdt(square(10.0));
    const ClearancePath p = plan(m, {2, 3}, {8, 6}, 0.5);
    ASSERT_EQ(p.elements.size(), 1u);
    const auto& seg = std::get<PathSegment>(p.elements[0]);
    EXPECT_EQ(seg.from, (Point{2, 3}));
    EXPECT_EQ(seg.to, (Point{8, 6}));
    EXPECT_DOUBLE_EQ(path_length(p), std::sqrt(45.0));
    EXPECT_TRUE(p.contacts.empty());
}

TEST(ExtractPath, ZeroClearanceBendsAtTheWallTip)
{
    const TriMesh m = refined(wall_room());
    const Point s{2, 2}, e{8, 2}, v{5, 6};
    const ClearancePath p = plan(m, s, e, 0.0);
    ASSERT_EQ(p.elements.size(), 2u);
    EXPECT_EQ(std::get<PathSegment>(p.elements[0]).to, v);
    EXPECT_EQ(std::get<PathSegment>(p.elements[1]).from, v);
    EXPECT_NEAR(path_length(p), distance(s, v) + distance(v, e), 1e-12);
}

TEST(ExtractPath, SingleBlockingVertexMatchesTangentFormula)
{
    const TriMesh m = refined(wall_room());
    const Point s{2, 2}, e{8, 2}, v{5, 6};
    for(double c : {0.25, 1.0, 1.5}) {
        const ClearancePath p = plan(m, s, e, c);
        ASSERT_EQ(p.elements.size(), 3u) << c;
        const auto& arc = std::get<PathArc>(p.elements[1]);
        EXPECT_EQ(arc.center, v);
        EXPECT_EQ(arc.radius, c);
        EXPECT_EQ(arc.turn, -1);
        const double ds = distance(s, v), de = distance(e, v);
        const double angle_svE = std::acos(dot(s - v, e - v) / (ds * de));
        const double turn = std::numbers::pi - angle_svE + std::asin(c / ds) + std::asin(c / de);
        const double expected = std::sqrt(ds * ds - c * c) + std::sqrt(de * de - c * c) + c * turn;
        EXPECT_NEAR(path_length(p), expected, 1e-12 * expected) << c;
        EXPECT_NEAR(arc.sweep, turn, 1e-12);
    }
}

TEST(ExtractPath, WrapsMoreThanHalfATurnAroundAPoint)
{
    // P and Q are too close to pass between, and the endpoints sit just below and above that
    // gap, so the path circles P the long way.
    ObstacleSet obs = square(10.0);
    obs.points.push_back({5, 5});
    obs.points.push_back({5.9, 5});
    const TriMesh m = refined(obs);
    const Point pt{5, 5}, s{5.45, 4.6}, e{5.45, 5.4};
    const double c = 0.5;
    const ClearancePath p = plan(m, s, e, c);

    const double d = distance(s, pt);
    const double phi = std::atan2(pt.y - s.y, s.x - pt.x);
    const double turn = 2.0 * (0.5 * std::numbers::pi - phi + std::asin(c / d));
    ASSERT_GT(turn, std::numbers::pi);
    ASSERT_EQ(p.elements.size(), 3u);
    const auto& arc = std::get<PathArc>(p.elements[1]);
    EXPECT_EQ(arc.center, pt);
    EXPECT_EQ(arc.turn, -1);
    EXPECT_NEAR(arc.sweep, turn, 1e-12);
    const double expected = 2.0 * std::sqrt(d * d - c * c) + c * turn;
    EXPECT_NEAR(path_length(p), expected, 1e-12 * expected);
    EXPECT_NEAR(path_clearance(p, obs), c, 1e-9);
}

TEST(ExtractPath, PreconditionErrors)
{
    const TriMesh m = refined(wall_room());
    const RoadmapGraph g(m);
    const Point s{2, 2}, e{8, 2};
    const auto ch = shortest_channel(g, *m.locate(s), *m.locate(e), 0.0);
    ASSERT_TRUE(ch);
    EXPECT_THROW(extract_path(m, *ch, e, s, 0.1), InputError);
    EXPECT_THROW(extract_path(m, *ch, s, e, -1.0), InputError);
    Channel broken = *ch;
    broken.gates.pop_back();
    EXPECT_THROW(extract_path(m, broken, s, e, 0.1), InputError);
    try {
        extract_path(m, *ch, s, e, 3.0);
        ADD_FAILURE() << "wide clearance accepted";
    } catch(const InfeasibleQuery& err) {
        EXPECT_NE(std::string(err.what()).find("gate"), std::string::npos);
    }
    // An endpoint within c of a channel vertex.
    const Point near_tip{4.9, 5.9};
    const auto ch2 = shortest_channel(g, *m.locate(near_tip), *m.locate(e), 0.0);
    EXPECT_THROW(extract_path(m, *ch2, near_tip, e, 0.5), InfeasibleQuery);
}

TEST(PathLength, KnownElements)
{
    ClearancePath seg{{0, 0}, {3, 4}, 0.0, {PathSegment{{0, 0}, {3, 4}}}, {}};
    EXPECT_DOUBLE_EQ(path_length(seg), 5.0);
    ClearancePath circle{{1, 0}, {1, 0}, 1.0, {PathArc{{0, 0}, 1.0, 0.0, 2.0 * std::numbers::pi, 1}}, {}};
    EXPECT_DOUBLE_EQ(path_length(circle), 2.0 * std::numbers::pi);
}

TEST(PathLength, AgreesWithDensePolyline)
{
    const TriMesh m = refined(wall_room());
    for(double c : {0.3, 1.0}) {
        const ClearancePath p = plan(m, {2, 2}, {8, 2}, c);
        const double dense = test::polyline_length(sample_path(p, 1e-4));
        EXPECT_NEAR(dense, path_length(p), 1e-6 * path_length(p));
    }
}

TEST(PathClearance, KnownDistances)
{
    ObstacleSet point;
    point.points = {{0, 1}};
    ClearancePath seg{{-2, 0}, {2, 0}, 0.0, {PathSegment{{-2, 0}, {2, 0}}}, {}};
    EXPECT_DOUBLE_EQ(path_clearance(seg, point), 1.0);

    ObstacleSet vertex;
    vertex.points = {{0, 0}, {0, -3}};
    vertex.segments = {{0, 1}};
    ClearancePath arc{{0.5, 0}, {-0.5, 0}, 0.5, {PathArc{{0, 0}, 0.5, 0.0, std::numbers::pi, 1}}, {}};
    EXPECT_NEAR(path_clearance(arc, vertex), 0.5, 1e-12);
}

TEST(ExtractPath, RandomPathsAreFeasibleTangentAndShortest)
{
    int cases = 0, compared = 0;
    for(std::uint64_t seed = 1; cases < 25 && seed < 200; ++seed) {
        const auto rc = random_case(seed);
        if(!rc)
            continue;
        ++cases;
        const ClearancePath p = extract_path(rc->mesh, rc->channel, rc->start, rc->end, rc->c);
        EXPECT_GE(path_clearance(p, rc->obs), rc->c * (1.0 - 1e-6)) << "seed " << seed;

        // Consecutive elements meet, and a segment meeting an arc runs along its tangent.
        ASSERT_FALSE(p.elements.empty());
        EXPECT_NEAR(distance(element_start(p.elements.front()), rc->start), 0.0, 1e-12);
        EXPECT_NEAR(distance(element_end(p.elements.back()), rc->end), 0.0, 1e-12);
        for(std::size_t i = 0; i + 1 < p.elements.size(); ++i) {
            EXPECT_NEAR(distance(element_end(p.elements[i]), element_start(p.elements[i + 1])), 0.0, 1e-9)
                << "seed " << seed << " element " << i;
            const PathElement& a = p.elements[i];
            const PathElement& b = p.elements[i + 1];
            if(std::holds_alternative<PathSegment>(a) && std::holds_alternative<PathArc>(b)) {
                const auto& s = std::get<PathSegment>(a);
                const auto& arc = std::get<PathArc>(b);
                EXPECT_NEAR(dot(s.to - s.from, s.to - arc.center) / distance(s.from, s.to), 0.0, 1e-9);
            }
        }
        for(const PathElement& e : p.elements)
            if(const auto* arc = std::get_if<PathArc>(&e)) {
                EXPECT_EQ(arc->radius, rc->c);
                bool is_vertex = false;
                for(TriangleId t : rc->channel.triangles)
                    for(int k = 0; k < 3; ++k)
                        is_vertex = is_vertex || rc->mesh.corner(t, k) == arc->center;
                EXPECT_TRUE(is_vertex);
            }

        std::mt19937_64 rng(seed * 7919);
        const auto segs = constraint_segments(rc->obs);
        int found = 0;
        for(int k = 0; k < 4000 && found < 100; ++k) {
            const auto line = test::random_homotopic_polyline(rng, rc->mesh, rc->channel, rc->start, rc->end, rc->c,
                                                              rc->obs, segs);
            if(!line)
                continue;
            ++found;
            EXPECT_LE(path_length(p), test::polyline_length(*line) * (1.0 + 1e-12)) << "seed " << seed;
        }
        compared += found;
    }
    EXPECT_EQ(cases, 25);
    EXPECT_GT(compared, 1000);
}

TEST(ExtractPath, ZeroClearanceMatchesSleeveVisibilityGraph)
{
    int cases = 0;
    for(std::uint64_t seed = 1; cases < 15 && seed < 200; ++seed) {
        auto rc = random_case(seed);
        if(!rc)
            continue;
        ++cases;
        const ClearancePath p = extract_path(rc->mesh, rc->channel, rc->start, rc->end, 0.0);
        for(const PathElement& e : p.elements)
            EXPECT_TRUE(std::holds_alternative<PathSegment>(e));
        const double oracle = sleeve_shortest_path(rc->mesh, rc->channel, rc->start, rc->end);
        EXPECT_NEAR(path_length(p), oracle, 1e-9 * oracle) << "seed " << seed;
    }
}

TEST(ExtractPath, ConvergesToStringPulledPathAsClearanceVanishes)
{
    int cases = 0;
    for(std::uint64_t seed = 1; cases < 10 && seed < 200; ++seed) {
        auto rc = random_case(seed);
        if(!rc)
            continue;
        ++cases;
        const ClearancePath p0 = extract_path(rc->mesh, rc->channel, rc->start, rc->end, 0.0);
        const auto a = sample_path(p0, 1e-2);
        double previous = INFINITY;
        for(double c : {1e-2, 1e-3, 1e-4}) {
            const ClearancePath pc = extract_path(rc->mesh, rc->channel, rc->start, rc->end, c);
            const auto b = sample_path(pc, 1e-2);
            auto directed = [](const std::vector<Point>& x, const std::vector<Point>& y) {
                double worst = 0.0;
                for(Point q : x) {
                    double best = INFINITY;
                    for(std::size_t i = 0; i + 1 < y.size(); ++i)
                        best = std::min(best, distance_to_segment(q, y[i], y[i + 1]));
                    worst = std::max(worst, best);
                }
                return worst;
            };
            const double h = std::max(directed(a, b), directed(b, a));
            EXPECT_LE(h, previous + 1e-12) << "seed " << seed;
            previous = h;
        }
        EXPECT_LT(previous, 1e-3) << "seed " << seed;
    }
}

TEST(ExtractPath, JunctionPerturbationsNeverShorten)
{
    // Move each arc end along its circle by +-eps; where the perturbed path stays clear of
    // every obstacle, it must not be shorter.
    int checked = 0;
    for(std::uint64_t seed = 1; seed < 60; ++seed) {
        auto rc = random_case(seed);
        if(!rc)
            continue;
        const ClearancePath p = extract_path(rc->mesh, rc->channel, rc->start, rc->end, rc->c);
        const auto segs = constraint_segments(rc->obs);
        for(std::size_t i = 0; i < p.elements.size(); ++i) {
            const auto* arc = std::get_if<PathArc>(&p.elements[i]);
            if(!arc)
                continue;
            const Point before = element_start(p.elements[i - 1]);
            const Point after = element_end(p.elements[i + 1]);
            const double base = distance(before, arc->point(0.0)) + arc->radius * arc->sweep
                + distance(arc->point(1.0), after);
            for(double eps : {1e-3, -1e-3}) {
                for(int end = 0; end < 2; ++end) {
                    PathArc q = *arc;
                    if(end == 0) {
                        q.from += q.turn * eps;
                        q.sweep -= eps;
                    } else {
                        q.sweep += eps;
                    }
                    if(q.sweep < 0.0)
                        continue;
                    const std::vector<Point> leg_in{before, q.point(0.0)}, leg_out{q.point(1.0), after};
                    const double clear = std::min(test::polyline_clearance(rc->obs, segs, leg_in),
                                                  test::polyline_clearance(rc->obs, segs, leg_out));
                    if(clear < rc->c * (1.0 - 1e-9))
                        continue;
                    const double len = distance(before, q.point(0.0)) + q.radius * q.sweep + distance(q.point(1.0), after);
                    EXPECT_GE(len, base - 1e-12 * base) << "seed " << seed;
                    ++checked;
                }
            }
        }
    }
    EXPECT_GT(checked, 20);
}
