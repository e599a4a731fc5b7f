#pragma once

#include "leonet/constellation.hpp"
#include "leonet/experiment.hpp"
#include "leonet/export.hpp"
#include "leonet/geometry.hpp"
#include "leonet/metrics.hpp"
#include "leonet/routing.hpp"
#include "leonet/scenario.hpp"
#include "leonet/topology.hpp"
#include "leonet/trajectory.hpp"
#include "leonet/units.hpp"
#include "leonet/vec3.hpp"
