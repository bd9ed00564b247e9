#pragma once

#include "sbm/core/error.hpp"
#include "sbm/core/parallel.hpp"
#include "sbm/core/quadrature.hpp"
#include "sbm/core/random.hpp"
#include "sbm/core/special.hpp"
#include "sbm/core/stats.hpp"
#include "sbm/experiment.hpp"
#include "sbm/habitat.hpp"
#include "sbm/hypothesis.hpp"
#include "sbm/io.hpp"
#include "sbm/ks.hpp"
#include "sbm/likelihood.hpp"
#include "sbm/limit_dist.hpp"
#include "sbm/mle.hpp"
#include "sbm/sim.hpp"
