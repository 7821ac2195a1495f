#pragma once

#include "minmaxlq/discretize.hpp"
#include "minmaxlq/io.hpp"
#include "minmaxlq/model.hpp"
#include "minmaxlq/riccati.hpp"
#include "minmaxlq/simplex_opt.hpp"
#include "minmaxlq/simulate.hpp"
#include "minmaxlq/solver.hpp"
#include "minmaxlq/types.hpp"
