#include "fleetopt/cost_model.hpp"

#include "fleetopt/errors.hpp"

namespace fleetopt {

CostParams default_cost_params() { return CostParams{}; }

void validate(const CostParams& c) {
    for (int i = 0; i < kNumTypes; ++i) {
        if (c.c_own[i] < 0.0) throw ValidationError("cost.c_own must be >= 0");
        if (c.c_ext[i] < 0.0) throw ValidationError("cost.c_ext must be >= 0");
    }
    if (c.c_park < 0.0) throw ValidationError("cost.c_park must be >= 0");
    if (c.c_defect < 0.0) throw ValidationError("cost.c_defect must be >= 0");
    if (c.c_missed_call < 0.0) throw ValidationError("cost.c_missed_call must be >= 0");
    if (c.c_park_full < 0.0) throw ValidationError("cost.c_park_full must be >= 0");
}

FitnessValue penalty_cost(const std::array<std::int64_t, kNumTypes>& missed_calls,
                          const std::array<std::int64_t, kNumTypes>& full_park,
                          const CostParams& c) {
    double penalty = 0.0;
    for (int i = 0; i < kNumTypes; ++i) {
        penalty += static_cast<double>(missed_calls[i]) * c.c_missed_call;
        penalty += static_cast<double>(full_park[i]) * c.c_park_full;
    }
    return penalty;
}

FitnessValue total_cost(const SolutionVector& x, const SimulationOutcome& o,
                        const CostParams& c) {
    double cost = 0.0;
    for (int i = 0; i < kNumTypes; ++i) {
        cost += static_cast<double>(x.owned_total(i)) * c.c_own[i];
        cost += static_cast<double>(o.ext_shipments[i]) * c.c_ext[i];
    }
    for (int l = 0; l < kNumSites; ++l)
        cost += static_cast<double>(x.parking[l]) * c.c_park;
    cost += static_cast<double>(o.defects) * c.c_defect;
    cost += penalty_cost(o.missed_calls, o.full_park_events, c);
    return cost;
}

} // namespace fleetopt
