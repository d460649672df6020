#pragma once

#include <array>

#include "fleetopt/fleet_sim.hpp"
#include "fleetopt/solution.hpp"

namespace fleetopt {

/// Money value of a configuration; lower is better. Approximations from the
/// surrogate reuse the same representation.
using FitnessValue = double;

/// Cost constants of the objective, in money units per unit count.
struct CostParams {
    std::array<double, kNumTypes> c_own{2050.0, 1500.0};
    std::array<double, kNumTypes> c_ext{40.0, 40.0};
    double c_park = 1500.0;
    double c_defect = 500.0;
    double c_missed_call = 200.0;
    double c_park_full = 200.0;
};

CostParams default_cost_params();

void validate(const CostParams& c);

/// Soft-constraint penalty: missed calls and full-park occurrences priced
/// linearly.
FitnessValue penalty_cost(const std::array<std::int64_t, kNumTypes>& missed_calls,
                          const std::array<std::int64_t, kNumTypes>& full_park,
                          const CostParams& c);

/// Complete cost of a configuration given its simulated outcome: owned
/// vehicles, external shipments, parking places, defects, plus the penalty.
FitnessValue total_cost(const SolutionVector& x, const SimulationOutcome& o,
                        const CostParams& c);

} // namespace fleetopt
