#pragma once

#include "coopsim/controller.hpp"
#include "coopsim/csv.hpp"
#include "coopsim/model.hpp"
#include "coopsim/queueing.hpp"
#include "coopsim/region.hpp"
#include "coopsim/rng.hpp"
#include "coopsim/sim.hpp"
#include "coopsim/simplex.hpp"
#include "coopsim/sweep.hpp"
