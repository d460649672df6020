#pragma once

#include <array>
#include <cstdint>

#include "fleetopt/solution.hpp"

namespace fleetopt {

/// Mean order arrival rates (orders/hour) over a repeating week.
/// rate[dow][hour], dow 0 = Monday.
struct WeeklyProfile {
    std::array<std::array<double, 24>, 7> rate{};

    double at(int dow, int hour) const { return rate[dow][hour]; }
    bool all_zero() const;
};

/// Builds a weekly profile as mean_rate shaped by hour-of-day and
/// day-of-week factors (factors average to 1 so the weekly mean is
/// mean_rate).
WeeklyProfile shaped_weekly_profile(double mean_rate);

WeeklyProfile constant_weekly_profile(double rate);

struct TripDuration {
    double median_hours = 6.0;
    double sigma = 0.3; // log-space standard deviation
};

/// Simulator inputs that are scenario constants, not decision variables.
struct SimParams {
    int horizon_days = 364;
    int warmup_days = 14; // events before this are not counted

    // demand[type][site]
    std::array<std::array<WeeklyProfile, kNumSites>, kNumTypes> demand{};
    // Mean external-vehicle arrival rate (vehicles/hour); the effective rate
    // is ext_base_rate * multiplier gene, realized by thinning a master
    // stream generated at ext_base_rate * ext_multiplier_cap.
    std::array<std::array<double, kNumSites>, kNumTypes> ext_base_rate{};
    double ext_multiplier_cap = 2.5;

    std::array<TripDuration, kNumTypes> trip{};
    double defect_prob = 0.005;
    double missed_call_wait_hours = 12.0;
    // Time a returning vehicle occupies one parking place before rejoining
    // the idle pool.
    double unload_hours = 1.0;
};

/// The canonical desk-scale scenario shipped with the tool. Format-versioned
/// through the JSON config so runs stay reproducible.
SimParams default_sim_params();

/// Throws ValidationError naming the offending field.
void validate(const SimParams& p);

} // namespace fleetopt
