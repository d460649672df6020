#include "fleetopt/sim_params.hpp"

#include <cmath>
#include <string>

#include "fleetopt/errors.hpp"

namespace fleetopt {

bool WeeklyProfile::all_zero() const {
    for (const auto& day : rate)
        for (double r : day)
            if (r != 0.0) return false;
    return true;
}

WeeklyProfile constant_weekly_profile(double r) {
    WeeklyProfile p;
    for (auto& day : p.rate) day.fill(r);
    return p;
}

WeeklyProfile shaped_weekly_profile(double mean_rate) {
    // Factors average to 1 over the week: nights and weekends are quiet,
    // working hours busy.
    WeeklyProfile p;
    for (int dow = 0; dow < 7; ++dow) {
        const double day_factor = dow < 5 ? 1.2 : 0.5;
        for (int hour = 0; hour < 24; ++hour) {
            const double hour_factor = (hour >= 6 && hour < 22) ? 1.3 : 0.4;
            p.rate[dow][hour] = mean_rate * day_factor * hour_factor;
        }
    }
    return p;
}

SimParams default_sim_params() {
    SimParams p;
    // Mean order rates (orders/hour) per (type, site).
    const double demand_mean[kNumTypes][kNumSites] = {
        {2.2, 1.8, 0.9},   // trailers
        {0.7, 0.25, 0.35}, // tankers
    };
    for (int i = 0; i < kNumTypes; ++i) {
        for (int l = 0; l < kNumSites; ++l) {
            p.demand[i][l] = shaped_weekly_profile(demand_mean[i][l]);
            p.ext_base_rate[i][l] = 0.8 * demand_mean[i][l];
        }
    }
    p.trip[0] = TripDuration{6.0, 0.35};
    p.trip[1] = TripDuration{8.0, 0.30};
    return p;
}

void validate(const SimParams& p) {
    if (p.warmup_days < 0)
        throw ValidationError("sim.warmup_days must be >= 0");
    if (p.horizon_days <= p.warmup_days)
        throw ValidationError("sim.horizon_days must exceed sim.warmup_days");
    for (int i = 0; i < kNumTypes; ++i) {
        for (int l = 0; l < kNumSites; ++l) {
            for (const auto& day : p.demand[i][l].rate)
                for (double r : day)
                    if (!(r >= 0.0) || !std::isfinite(r))
                        throw ValidationError(
                            "sim.demand rates must be finite and >= 0 (type " +
                            std::string(vehicle_type_name(i)) + ", site " +
                            std::to_string(l + 1) + ")");
            if (!(p.ext_base_rate[i][l] >= 0.0) || !std::isfinite(p.ext_base_rate[i][l]))
                throw ValidationError("sim.ext_base_rate must be finite and >= 0");
        }
        if (!(p.trip[i].median_hours > 0.0))
            throw ValidationError("sim.trip.median_hours must be > 0");
        if (!(p.trip[i].sigma >= 0.0))
            throw ValidationError("sim.trip.sigma must be >= 0");
    }
    if (!(p.defect_prob >= 0.0 && p.defect_prob <= 1.0))
        throw ValidationError("sim.defect_prob must be in [0,1]");
    if (!(p.missed_call_wait_hours > 0.0))
        throw ValidationError("sim.missed_call_wait_hours must be > 0");
    if (!(p.unload_hours >= 0.0))
        throw ValidationError("sim.unload_hours must be >= 0");
    if (!(p.ext_multiplier_cap > 0.0))
        throw ValidationError("sim.ext_multiplier_cap must be > 0");
}

} // namespace fleetopt
