#pragma once

#include "clearway/bench.hpp"
#include "clearway/cdt.hpp"
#include "clearway/channel.hpp"
#include "clearway/error.hpp"
#include "clearway/geom.hpp"
#include "clearway/mesh.hpp"
#include "clearway/obstacles.hpp"
#include "clearway/planner.hpp"
#include "clearway/problematic.hpp"
#include "clearway/refine.hpp"
#include "clearway/roadmap.hpp"
#include "clearway/scenario.hpp"
#include "clearway/svg.hpp"
