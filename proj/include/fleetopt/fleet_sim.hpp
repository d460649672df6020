#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fleetopt/sim_params.hpp"
#include "fleetopt/solution.hpp"

namespace fleetopt {

class Rng;

/// Counts produced by one simulation run. All counts exclude the warm-up
/// window and are per vehicle type where indexed.
struct SimulationOutcome {
    std::array<std::int64_t, kNumTypes> ext_shipments{};
    std::int64_t defects = 0;
    std::array<std::int64_t, kNumTypes> missed_calls{};
    std::array<std::int64_t, kNumTypes> full_park_events{};
    // Diagnostics, not part of the objective.
    std::array<std::int64_t, kNumTypes> orders_served{};
    std::array<std::int64_t, kNumTypes> orders_generated{}; // whole horizon
    std::array<std::int64_t, kNumTypes> waiting_at_horizon{};

    bool operator==(const SimulationOutcome&) const = default;
};

struct OrderEvent {
    double time_hours;
};

/// Non-homogeneous Poisson order stream for one (type, site) profile:
/// per-hour Poisson counts at the profile rate, timestamps uniform within
/// the hour, sorted by time.
std::vector<OrderEvent> generate_order_stream(const WeeklyProfile& profile,
                                              int horizon_days, Rng& rng);

/// Effective external-vehicle arrival rate. Rejects negative base rates.
double external_arrival_rate(double base_rate, double multiplier);

/// Runs the trailer-management process for one configuration. Deterministic
/// for fixed (x, p, seed); safe to call concurrently (no shared state).
///
/// Process model: orders arrive per (type, site); an order is served
/// immediately when an owned vehicle of its type is idle at its site,
/// otherwise it queues for the next external arrival of that type. Owned
/// trips last a log-normal duration, may produce a defect, and on return the
/// vehicle needs a free parking place to unload; when the site is full the
/// return is counted as a full-park occurrence and the vehicle waits,
/// unavailable, until a place frees. An order still waiting after
/// missed_call_wait_hours is counted as one missed call and stays queued.
SimulationOutcome simulate(const SolutionVector& x, const SimParams& p,
                           std::uint64_t seed);

} // namespace fleetopt
