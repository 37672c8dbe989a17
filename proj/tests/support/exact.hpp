#pragma once

// Rational-arithmetic reference predicates. Every double is exactly representable as
// an mpq_class, so these signs are ground truth.

#include "clearway/geom.hpp"

#include <gmpxx.h>

namespace clearway::test {

inline int exact_orient2d(Point a, Point b, Point c)
{
    const mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    const mpq_class det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
    return sgn(det);
}

inline int exact_incircle(Point a, Point b, Point c, Point d)
{
    const mpq_class adx = mpq_class(a.x) - d.x, ady = mpq_class(a.y) - d.y;
    const mpq_class bdx = mpq_class(b.x) - d.x, bdy = mpq_class(b.y) - d.y;
    const mpq_class cdx = mpq_class(c.x) - d.x, cdy = mpq_class(c.y) - d.y;
    const mpq_class det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
    return sgn(det);
}

} // namespace clearway::test
