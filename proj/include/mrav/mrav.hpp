#pragma once

#include "mrav/types.hpp"
#include "mrav/platform.hpp"
#include "mrav/linalg.hpp"
#include "mrav/allocation.hpp"
#include "mrav/simplex.hpp"
#include "mrav/direction_grid.hpp"
#include "mrav/parallel.hpp"
#include "mrav/wrench_sets.hpp"
#include "mrav/config.hpp"
#include "mrav/hover.hpp"
#include "mrav/local_hover.hpp"
#include "mrav/dynamics.hpp"
