#include "clearway/cdt.hpp"
#include "support/mesh_checks.hpp"
#include "support/scenes.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace clearway;

namespace {

ObstacleSet square(double s = 1.0)
{
    ObstacleSet obs;
    obs.points = {{0, 0}, {s, 0}, {s, s}, {0, s}};
    obs.boundary = {0, 1, 2, 3};
    return obs;
}

std::size_t constrained_edges(const TriMesh& m)
{
    std::size_t n = 0;
    for(TriangleId t = 0; t < m.triangle_count(); ++t)
        for(int i = 0; i < 3; ++i)
            if(m.triangle(t).constrained(i) && (m.triangle(t).n[i] == kNoId || m.triangle(t).n[i] > t))
                ++n;
    return n;
}

// The quadrilateral (0,0),(1,-1),(2,0),(1,1) as two triangles around the diagonal (0,0)-(2,0).
ObstacleSet kite()
{
    ObstacleSet obs;
    obs.points = {{0, 0}, {1, -1}, {2, 0}, {1, 1}};
    obs.boundary = {0, 1, 2, 3};
    return obs;
}

} // namespace

TEST(BuildCdt, SquareGivesTwoTriangles)
{
    const TriMesh m = build_cdt(square());
    EXPECT_EQ(m.triangle_count(), 2u);
    EXPECT_EQ(m.vertex_count(), 4u);
    EXPECT_EQ(constrained_edges(m), 4u);
    EXPECT_EQ(test::interior_unconstrained_edges(m), 1u);
    EXPECT_TRUE(topology_problems(m).empty());
}

TEST(BuildCdt, SquareWithCentreGivesFan)
{
    ObstacleSet obs = square(2.0);
    obs.points.push_back({1.0, 1.0});
    const TriMesh m = build_cdt(obs);
    EXPECT_EQ(m.triangle_count(), 4u);
    for(TriangleId t = 0; t < 4; ++t)
        EXPECT_GE(m.triangle(t).index_of(4), 0);
    EXPECT_TRUE(is_cdt(m));
}

TEST(BuildCdt, RejectsCrossingSegmentsNamingBoth)
{
    ObstacleSet obs = square(4.0);
    obs.points.insert(obs.points.end(), {{1, 1}, {3, 3}, {1, 3}, {3, 1}});
    obs.segments = {{4, 5}, {6, 7}};
    try {
        build_cdt(obs);
        FAIL() << "expected InputError";
    } catch(const InputError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("segment 0"), std::string::npos) << msg;
        EXPECT_NE(msg.find("segment 1"), std::string::npos) << msg;
    }
}

TEST(BuildCdt, RejectsDuplicatesAndOpenRegions)
{
    ObstacleSet dup = square();
    dup.points.push_back({0.5, 0.5});
    dup.points.push_back({0.5, 0.5});
    EXPECT_THROW(build_cdt(dup), InputError);

    ObstacleSet open = square();
    open.boundary.clear();
    EXPECT_THROW(build_cdt(open), InputError);
}

TEST(BuildCdt, RemovesPolygonInteriors)
{
    ObstacleSet obs = square(10.0);
    obs.points.insert(obs.points.end(), {{4, 4}, {6, 4}, {6, 6}, {4, 6}});
    obs.polygons = {{4, 5, 6, 7}};
    const TriMesh m = build_cdt(obs);
    EXPECT_NEAR(m.area(), 96.0, 1e-12);
    for(TriangleId t = 0; t < m.triangle_count(); ++t) {
        const Point c = (1.0 / 3.0) * (m.corner(t, 0) + m.corner(t, 1) + m.corner(t, 2));
        EXPECT_FALSE(c.x > 4 && c.x < 6 && c.y > 4 && c.y < 6);
    }
    EXPECT_FALSE(m.locate({5, 5}));
    const auto e = test::euler(m);
    EXPECT_EQ(e.chi, e.expected);
    EXPECT_EQ(e.chi, 0);
}

TEST(BuildCdt, DropsPointsInsideObstacles)
{
    ObstacleSet obs = square(10.0);
    obs.points.insert(obs.points.end(), {{4, 4}, {6, 4}, {6, 6}, {4, 6}, {5, 5}});
    obs.polygons = {{4, 5, 6, 7}};
    const TriMesh m = build_cdt(obs);
    EXPECT_EQ(m.vertex_count(), 8u);
    for(const Vertex& v : m.vertices())
        EXPECT_NE(v.source, 8u);
}

TEST(BuildCdt, RandomScenesSatisfyInvariants)
{
    for(std::uint64_t seed = 1; seed <= 100; ++seed) {
        test::SceneParams prm;
        prm.vertices = 100;
        prm.walls = 10;
        const ObstacleSet obs = test::random_scene(seed, prm);
        const TriMesh m = build_cdt(obs);
        ASSERT_TRUE(topology_problems(m).empty()) << "seed " << seed << ": " << topology_problems(m).front();
        ASSERT_TRUE(is_cdt(m)) << "seed " << seed;
        EXPECT_NEAR(m.area(), test::free_area(obs), 1e-9 * test::free_area(obs)) << "seed " << seed;
        const auto e = test::euler(m);
        EXPECT_EQ(e.chi, e.expected) << "seed " << seed;
        for(const MeshSegment& s : m.segments())
            EXPECT_EQ(s.chain.size(), 2u) << "seed " << seed << " " << s.label;
    }
}

TEST(BuildCdt, GridOfCocircularPoints)
{
    ObstacleSet obs = square(8.0);
    for(int i = 1; i < 8; ++i)
        for(int j = 1; j < 8; ++j)
            obs.points.push_back({double(i), double(j)});
    obs.points.insert(obs.points.end(), {{0.5, 0.5}, {7.5, 7.5}});
    obs.segments = {{obs.points.size() - 2, obs.points.size() - 1}};
    EXPECT_THROW(build_cdt(obs), InputError); // the diagonal passes through grid points
    obs.points.back() = {7.5, 7.25};
    const TriMesh m = build_cdt(obs);
    EXPECT_TRUE(topology_problems(m).empty());
    EXPECT_TRUE(is_cdt(m));
    EXPECT_NEAR(m.area(), 64.0, 1e-12);
}

TEST(LocallyDelaunay, PerturbedSquare)
{
    ObstacleSet obs;
    obs.points = {{0, 0}, {3, 0}, {3.2, 1}, {0, 1}};
    obs.boundary = {0, 1, 2, 3};
    TriMesh m = build_cdt(obs);
    ASSERT_EQ(m.triangle_count(), 2u);
    const auto diag = m.find_edge(0, 2) ? m.find_edge(0, 2) : m.find_edge(1, 3);
    ASSERT_TRUE(diag);
    EXPECT_TRUE(is_locally_delaunay(m, *diag));
    // The other diagonal is illegal: flip to it and check, then flip back.
    const EdgeRef other = m.flip(*diag);
    EXPECT_FALSE(is_locally_delaunay(m, other));
    const EdgeRef back = m.flip(other);
    EXPECT_TRUE(is_locally_delaunay(m, back));
    EXPECT_TRUE(m.find_edge(1, 3).has_value());
}

TEST(LocallyDelaunay, ConstrainedAndBoundaryEdges)
{
    const TriMesh m = build_cdt(square());
    for(TriangleId t = 0; t < m.triangle_count(); ++t)
        for(int i = 0; i < 3; ++i)
            if(m.triangle(t).n[i] == kNoId) {
                EXPECT_THROW(is_locally_delaunay(m, {t, i}), MeshError);
            }

    ObstacleSet obs;
    obs.points = {{0, 0}, {3, 0}, {3.2, 1}, {0, 1}, {1.5, 3}, {1.5, -3}};
    obs.boundary = {0, 5, 1, 2, 4, 3};
    obs.segments = {{0, 2}};
    const TriMesh c = build_cdt(obs);
    const auto e = c.find_edge(0, 2);
    ASSERT_TRUE(e);
    EXPECT_TRUE(c.is_constrained(*e));
    EXPECT_TRUE(is_locally_delaunay(c, *e));
}

TEST(Flip, KiteDiagonalAndInvolution)
{
    TriMesh m = build_cdt(kite());
    const auto d = m.find_edge(0, 2) ? m.find_edge(0, 2) : m.find_edge(1, 3);
    ASSERT_TRUE(d);
    const auto [a0, b0] = m.endpoints(*d);
    const double area = m.area();
    const EdgeRef e = m.flip(*d);
    const auto [a1, b1] = m.endpoints(e);
    EXPECT_NE(std::minmax(a0, b0), std::minmax(a1, b1));
    EXPECT_TRUE(topology_problems(m).empty());
    EXPECT_NEAR(m.area(), area, 1e-12 * area);
    const EdgeRef r = m.flip(e);
    const auto [a2, b2] = m.endpoints(r);
    EXPECT_EQ(std::minmax(a0, b0), std::minmax(a2, b2));
    EXPECT_TRUE(topology_problems(m).empty());
}

TEST(Flip, RejectsConstrainedAndNonConvex)
{
    TriMesh m = build_cdt(square());
    for(TriangleId t = 0; t < m.triangle_count(); ++t)
        for(int i = 0; i < 3; ++i)
            if(m.triangle(t).constrained(i)) {
                EXPECT_THROW(m.flip({t, i}), MeshError);
            }

    ObstacleSet dart;
    dart.points = {{0, 0}, {4, 0}, {1, 1}, {0, 4}};
    dart.boundary = {0, 1, 2, 3};
    TriMesh d = build_cdt(dart);
    const auto diag = d.find_edge(0, 2);
    ASSERT_TRUE(diag);
    EXPECT_THROW(d.flip(*diag), MeshError);
}

TEST(Flip, RandomLegalFlipsPreserveAreaAndTopology)
{
    TriMesh m = build_cdt(test::random_scene(5));
    const double area = m.area();
    std::mt19937_64 rng(5);
    int flipped = 0;
    for(int k = 0; k < 2000; ++k) {
        const TriangleId t = std::uniform_int_distribution<TriangleId>(0, TriangleId(m.triangle_count() - 1))(rng);
        const int i = std::uniform_int_distribution<int>(0, 2)(rng);
        if(m.triangle(t).n[i] == kNoId || m.triangle(t).constrained(i))
            continue;
        try {
            m.flip({t, i});
            ++flipped;
        } catch(const MeshError&) {
        }
    }
    EXPECT_GT(flipped, 100);
    EXPECT_TRUE(topology_problems(m).empty());
    EXPECT_NEAR(m.area(), area, 1e-12 * area);
}

TEST(SplitConstrainedEdge, TriangleSplitAtTheFoot)
{
    ObstacleSet obs;
    obs.points = {{0, 2}, {-1, 0}, {3, 0}};
    obs.boundary = {1, 2, 0};
    TriMesh m = build_cdt(obs);
    ASSERT_EQ(m.triangle_count(), 1u);
    const auto e = m.find_edge(1, 2);
    ASSERT_TRUE(e);
    const SplitResult r = m.split_constrained_edge(*e, {0, 0});
    EXPECT_EQ(m.triangle_count(), 2u);
    EXPECT_EQ(m.position(r.vertex), (Point{0, 0}));
    EXPECT_EQ(m.vertex(r.vertex).kind, VertexKind::Steiner);

    // Triangles {(0,2),(-1,0),(0,0)} and {(0,2),(0,0),(3,0)}.
    auto has = [&](Point p, Point q, Point s) {
        for(TriangleId t = 0; t < m.triangle_count(); ++t) {
            int hits = 0;
            for(int i = 0; i < 3; ++i)
                hits += m.corner(t, i) == p || m.corner(t, i) == q || m.corner(t, i) == s;
            if(hits == 3)
                return true;
        }
        return false;
    };
    EXPECT_TRUE(has({0, 2}, {-1, 0}, {0, 0}));
    EXPECT_TRUE(has({0, 2}, {0, 0}, {3, 0}));
    for(VertexId end : {VertexId{1}, VertexId{2}}) {
        const auto sub = m.find_edge(end, r.vertex);
        ASSERT_TRUE(sub);
        EXPECT_TRUE(m.is_constrained(*sub));
    }
    EXPECT_TRUE(topology_problems(m).empty());
    EXPECT_EQ(m.segment(m.segment_of(*m.find_edge(1, r.vertex))).chain.size(), 3u);
}

TEST(SplitConstrainedEdge, TwoSidedSplitAndErrors)
{
    ObstacleSet obs;
    obs.points = {{0, 0}, {4, 0}, {2, 3}, {2, -3}, {1, 0.5}};
    obs.boundary = {0, 3, 1, 2};
    obs.segments = {{0, 1}};
    TriMesh m = build_cdt(obs);
    const std::size_t before = m.triangle_count();
    const auto e = m.find_edge(0, 1);
    ASSERT_TRUE(e);
    EXPECT_THROW(m.split_constrained_edge(*e, {4, 0}), MeshError);
    EXPECT_THROW(m.split_constrained_edge(*e, {2, 0.5}), MeshError);
    const auto un = m.find_edge(0, 4);
    ASSERT_TRUE(un);
    EXPECT_THROW(m.split_constrained_edge(*un, {0.5, 0.25}), MeshError);
    EXPECT_EQ(m.triangle_count(), before);
    EXPECT_TRUE(topology_problems(m).empty());

    const SplitResult r = m.split_constrained_edge(*e, {3, 1e-14});
    EXPECT_EQ(m.triangle_count(), before + 2);
    EXPECT_EQ(m.position(r.vertex), (Point{3, 0}));
    EXPECT_EQ(r.outer.size(), 4u);
    EXPECT_TRUE(topology_problems(m).empty());
}

TEST(Locate, CentroidsObstaclesAndBruteForce)
{
    ObstacleSet obs = test::random_scene(9);
    const TriMesh m = build_cdt(obs);
    for(TriangleId t = 0; t < m.triangle_count(); ++t) {
        const Point c = (1.0 / 3.0) * (m.corner(t, 0) + m.corner(t, 1) + m.corner(t, 2));
        ASSERT_EQ(m.locate(c), std::optional<TriangleId>(t));
    }
    EXPECT_FALSE(m.locate({-1, -1}));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ux(-0.5, 10.5), uy(-0.5, 8.5);
    for(int k = 0; k < 10000; ++k) {
        const Point p{ux(rng), uy(rng)};
        const auto t = m.locate(p);
        std::optional<TriangleId> first;
        for(TriangleId s = 0; s < m.triangle_count() && !first; ++s) {
            // Barycentric containment.
            const Point a = m.corner(s, 0), b = m.corner(s, 1), c = m.corner(s, 2);
            const double d = cross(b - a, c - a);
            const double l1 = cross(b - p, c - p) / d, l2 = cross(c - p, a - p) / d, l3 = cross(a - p, b - p) / d;
            if(l1 >= 0 && l2 >= 0 && l3 >= 0)
                first = s;
        }
        ASSERT_EQ(t, first);
    }
    for(const auto& poly : obs.polygons) {
        Point c{0, 0};
        for(std::size_t i : poly)
            c = c + obs.points[i];
        c = (1.0 / double(poly.size())) * c;
        if(inside_cycle(c, obs.points, poly)) {
            EXPECT_FALSE(m.locate(c));
        }
    }
}
