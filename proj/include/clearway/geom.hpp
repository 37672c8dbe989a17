#pragma once

/**
 * @file
 * Points, robust predicates and floating-point constructions.
 *
 * orient2d and incircle are exact: a floating-point filter answers almost every
 * call and an expansion-arithmetic evaluation settles the rest. Exactness assumes no
 * intermediate product underflows, which holds for coordinates above about 1e-145 in
 * magnitude (or exactly zero). Constructions
 * (projections, circumcircles, apex points) are plain double precision.
 */

#include "clearway/detail/expansion.hpp"
#include "clearway/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>

namespace clearway {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const Point&, const Point&) = default;
    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }
};

struct Circle {
    Point center;
    double radius = 0.0;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
constexpr double squared_norm(Point a) { return dot(a, a); }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }
constexpr double squared_distance(Point a, Point b) { return squared_norm(b - a); }
/// Counter-clockwise quarter turn.
constexpr Point perp(Point a) { return {-a.y, a.x}; }
constexpr Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// +1 if c lies strictly left of the directed line a->b, -1 if strictly right, 0 if collinear.
inline int orient2d(Point a, Point b, Point c)
{
    const double detleft = (a.x - c.x) * (b.y - c.y);
    const double detright = (a.y - c.y) * (b.x - c.x);
    const double det = detleft - detright;

    double detsum;
    if(detleft > 0.0) {
        if(detright <= 0.0)
            return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
        detsum = detleft + detright;
    } else if(detleft < 0.0) {
        if(detright >= 0.0)
            return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
        detsum = -detleft - detright;
    } else {
        return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    }

    const double errbound = detail::kOrientErrBound * detsum;
    if(det >= errbound)
        return 1;
    if(-det >= errbound)
        return -1;

    using detail::Expansion;
    const Expansion acx = Expansion::difference(a.x, c.x);
    const Expansion bcy = Expansion::difference(b.y, c.y);
    const Expansion acy = Expansion::difference(a.y, c.y);
    const Expansion bcx = Expansion::difference(b.x, c.x);
    return (acx * bcy - acy * bcx).sign();
}

/// +1 if d lies strictly inside the circumcircle of the counter-clockwise triangle abc,
/// -1 if strictly outside, 0 if on it.
inline int incircle(Point a, Point b, Point c, Point d)
{
    assert(orient2d(a, b, c) > 0 && "incircle expects a counter-clockwise triangle");

    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double alift = adx * adx + ady * ady;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double blift = bdx * bdx + bdy * bdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift
        + (std::abs(cdxady) + std::abs(adxcdy)) * blift + (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    const double errbound = detail::kInCircleErrBound * permanent;
    if(det > errbound)
        return 1;
    if(-det > errbound)
        return -1;

    using detail::Expansion;
    const Expansion eadx = Expansion::difference(a.x, d.x), eady = Expansion::difference(a.y, d.y);
    const Expansion ebdx = Expansion::difference(b.x, d.x), ebdy = Expansion::difference(b.y, d.y);
    const Expansion ecdx = Expansion::difference(c.x, d.x), ecdy = Expansion::difference(c.y, d.y);
    const Expansion ealift = eadx * eadx + eady * eady;
    const Expansion eblift = ebdx * ebdx + ebdy * ebdy;
    const Expansion eclift = ecdx * ecdx + ecdy * ecdy;
    const Expansion exact = ealift * (ebdx * ecdy - ecdx * ebdy) + eblift * (ecdx * eady - eadx * ecdy)
        + eclift * (eadx * ebdy - ebdx * eady);
    return exact.sign();
}

/// Parameter t of the orthogonal projection of p onto the line a + t (b - a).
inline double projection_parameter(Point p, Point a, Point b)
{
    const Point ab = b - a;
    const double len2 = squared_norm(ab);
    if(len2 == 0.0)
        throw GeometryError("projection onto a degenerate segment");
    return dot(p - a, ab) / len2;
}

/// Orthogonal projection of p onto segment [ab] when it falls strictly inside (0 < t < 1).
inline std::optional<Point> project_onto_segment_interior(Point p, Point a, Point b)
{
    const double t = projection_parameter(p, a, b);
    if(!(t > 0.0 && t < 1.0))
        return std::nullopt;
    return a + t * (b - a);
}

inline Circle circumcircle(Point a, Point b, Point c)
{
    if(orient2d(a, b, c) == 0)
        throw GeometryError("circumcircle of collinear points");
    const Point ba = b - a;
    const Point ca = c - a;
    const double bl = squared_norm(ba);
    const double cl = squared_norm(ca);
    const double d = 2.0 * cross(ba, ca);
    const Point offset{(ca.y * bl - ba.y * cl) / d, (ba.x * cl - ca.x * bl) / d};
    const Point center = a + offset;
    return {center, norm(offset)};
}

/**
 * Second intersection of the circumcircle of a1 a2 a3 with the line through a1
 * parallel to a2 a3.
 *
 * The chord a2 a3 makes the circle symmetric about its perpendicular bisector, so the
 * point is the mirror image of a1 across that bisector. Returns a1 itself when the line
 * is tangent (a1 on the bisector).
 */
inline Point apex_point(Point a1, Point a2, Point a3)
{
    if(orient2d(a1, a2, a3) == 0)
        throw GeometryError("apex point of collinear points");
    const Point dir = a3 - a2;
    const double t = 2.0 * dot(midpoint(a2, a3) - a1, dir) / squared_norm(dir);
    if(t == 0.0)
        return a1;
    return a1 + t * dir;
}

namespace detail {

// q collinear with [pr]: does it lie within the closed bounding box?
inline bool on_collinear_segment(Point p, Point q, Point r)
{
    return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) && std::min(p.y, r.y) <= q.y
        && q.y <= std::max(p.y, r.y);
}

} // namespace detail

/// True iff the closed segments [pq] and [rs] share at least one point.
inline bool segments_properly_cross(Point p, Point q, Point r, Point s)
{
    const int o1 = orient2d(p, q, r);
    const int o2 = orient2d(p, q, s);
    const int o3 = orient2d(r, s, p);
    const int o4 = orient2d(r, s, q);
    if(o1 * o2 < 0 && o3 * o4 < 0)
        return true;
    if(o1 == 0 && detail::on_collinear_segment(p, r, q))
        return true;
    if(o2 == 0 && detail::on_collinear_segment(p, s, q))
        return true;
    if(o3 == 0 && detail::on_collinear_segment(r, p, s))
        return true;
    if(o4 == 0 && detail::on_collinear_segment(r, q, s))
        return true;
    return false;
}

/// Euclidean distance from p to the closed segment [ab].
inline double distance_to_segment(Point p, Point a, Point b)
{
    const Point ab = b - a;
    const double len2 = squared_norm(ab);
    if(len2 == 0.0)
        return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

/// Distance between closed segments [ab] and [cd].
inline double segment_distance(Point a, Point b, Point c, Point d)
{
    if(segments_properly_cross(a, b, c, d))
        return 0.0;
    return std::min({distance_to_segment(a, c, d), distance_to_segment(b, c, d), distance_to_segment(c, a, b),
                     distance_to_segment(d, a, b)});
}

} // namespace clearway
