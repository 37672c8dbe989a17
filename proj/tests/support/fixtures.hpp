#pragma once

#include "clearway/obstacles.hpp"

namespace clearway::test {

/// Rectangle [-1,3]x[0,2] whose top edge has a vertex at A1=(0,2); the bottom edge is
/// the constrained segment [A2A3] with A2=(-1,0), A3=(3,0).
inline ObstacleSet pentagon_fixture()
{
    ObstacleSet obs;
    obs.points = {{-1, 0}, {3, 0}, {3, 2}, {0, 2}, {-1, 2}};
    obs.boundary = {0, 1, 2, 3, 4};
    return obs;
}

/// The single triangle A1=(0,2), A2=(-1,0), A3=(3,0), all sides on the boundary.
inline ObstacleSet triangle_fixture()
{
    ObstacleSet obs;
    obs.points = {{0, 2}, {-1, 0}, {3, 0}};
    obs.boundary = {1, 2, 0};
    return obs;
}

} // namespace clearway::test
