#pragma once

// Independent reference implementations used only by tests. These must not
// share logic with the library code they check: each one recomputes its
// answer from scratch in the most direct way available.

#include <cstdint>
#include <functional>
#include <vector>

#include "fleetopt/cost_model.hpp"
#include "fleetopt/fleet_sim.hpp"
#include "fleetopt/ga.hpp"
#include "fleetopt/solution.hpp"

namespace fleetopt::oracles {

/// Direct transcription of the cost formula: vehicle, external-shipment,
/// parking and defect terms plus the linear penalty.
double cost_oracle(const SolutionVector& x, const SimulationOutcome& o,
                   const CostParams& c);

struct QueueOracleStats {
    double mean_missed_fraction = 0.0;
    double standard_error = 0.0;
};

/// Straightforward Monte-Carlo of one site and one vehicle type with no
/// external arrivals: vehicles are busy for trip+unload per order, orders
/// finding every vehicle busy are never served and miss once their wait
/// passes the threshold inside the horizon.
QueueOracleStats mc_queue_oracle(int n_runs, double horizon_hours,
                                 double arrival_rate_per_hour, int n_vehicles,
                                 double trip_median_hours, double trip_sigma,
                                 double unload_hours, double wait_threshold_hours,
                                 std::uint64_t seed);

struct SensitivityOracleStats {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double sample_std = 0.0;
};

/// Brute-force enumeration of the one-and-two-unit perturbations with
/// feasibility skipping and deduplication, evaluated via `fn`.
SensitivityOracleStats sensitivity_oracle(
    const SolutionVector& x, const std::function<double(const SolutionVector&)>& fn,
    const Bounds& bounds, double multiplier_unit);

/// Separable quadratic toy objective with its minimum strictly inside the
/// default bounds; ignores the seed argument.
SimulationEvaluator quadratic_toy();

/// Best fitness among n uniform samples, using an RNG stream unrelated to
/// any library stream.
double random_sampling_oracle(const SimulationEvaluator& fn, const Bounds& bounds,
                              int n, std::uint64_t seed);

} // namespace fleetopt::oracles
