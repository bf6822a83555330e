#pragma once

// Budget-constrained task assignment for heterogeneous crowdsourcing:
// exponential-weights worker selection with pluggable task-selection
// strategies, plus the simulation and experiment harness around it.

#include "crowdbandit/aggregation.hpp"
#include "crowdbandit/bandit.hpp"
#include "crowdbandit/core.hpp"
#include "crowdbandit/csv.hpp"
#include "crowdbandit/harness.hpp"
#include "crowdbandit/kmeans.hpp"
#include "crowdbandit/rng.hpp"
#include "crowdbandit/simulation.hpp"
#include "crowdbandit/strategies.hpp"
