#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace fleetopt::oracles {

double cost_oracle(const SolutionVector& x, const SimulationOutcome& o,
                   const CostParams& c) {
    // Written term by term from the definition, no shared helpers.
    double owned_term = 0.0;
    for (int i = 0; i < kNumTypes; ++i) {
        double total_i = 0.0;
        for (int l = 0; l < kNumSites; ++l)
            total_i += x.owned[i * kNumSites + l];
        owned_term += total_i * c.c_own[i];
    }
    double ext_term = 0.0;
    for (int i = 0; i < kNumTypes; ++i)
        ext_term += static_cast<double>(o.ext_shipments[i]) * c.c_ext[i];
    double park_term = 0.0;
    for (int l = 0; l < kNumSites; ++l)
        park_term += static_cast<double>(x.parking[l]) * c.c_park;
    const double defect_term = static_cast<double>(o.defects) * c.c_defect;
    double penalty = 0.0;
    for (int i = 0; i < kNumTypes; ++i)
        penalty += static_cast<double>(o.missed_calls[i]) * c.c_missed_call +
                   static_cast<double>(o.full_park_events[i]) * c.c_park_full;
    return owned_term + ext_term + park_term + defect_term + penalty;
}

QueueOracleStats mc_queue_oracle(int n_runs, double horizon_hours,
                                 double arrival_rate_per_hour, int n_vehicles,
                                 double trip_median_hours, double trip_sigma,
                                 double unload_hours, double wait_threshold_hours,
                                 std::uint64_t seed) {
    std::mt19937 gen(static_cast<unsigned>(seed));
    std::exponential_distribution<double> gap(arrival_rate_per_hour);
    std::lognormal_distribution<double> trip(std::log(trip_median_hours), trip_sigma);

    std::vector<double> fractions;
    fractions.reserve(static_cast<std::size_t>(n_runs));
    for (int run = 0; run < n_runs; ++run) {
        std::vector<double> free_at(static_cast<std::size_t>(n_vehicles), 0.0);
        long generated = 0;
        long missed = 0;
        double t = gap(gen);
        while (t < horizon_hours) {
            ++generated;
            auto it = std::min_element(free_at.begin(), free_at.end());
            if (*it <= t) {
                *it = t + trip(gen) + unload_hours;
            } else if (t + wait_threshold_hours <= horizon_hours) {
                ++missed;
            }
            t += gap(gen);
        }
        fractions.push_back(generated == 0
                                ? 0.0
                                : static_cast<double>(missed) /
                                      static_cast<double>(generated));
    }

    QueueOracleStats stats;
    double sum = 0.0;
    for (double f : fractions) sum += f;
    stats.mean_missed_fraction = sum / static_cast<double>(n_runs);
    double ss = 0.0;
    for (double f : fractions) {
        const double d = f - stats.mean_missed_fraction;
        ss += d * d;
    }
    const double variance = ss / static_cast<double>(n_runs - 1);
    stats.standard_error = std::sqrt(variance / static_cast<double>(n_runs));
    return stats;
}

SensitivityOracleStats sensitivity_oracle(
    const SolutionVector& x, const std::function<double(const SolutionVector&)>& fn,
    const Bounds& bounds, double multiplier_unit) {
    std::set<std::array<double, kNumGenes>> seen;
    seen.insert(x.flatten());
    std::vector<double> fitnesses;
    for (int g = 0; g < kNumGenes; ++g) {
        for (int d : {-2, -1, 1, 2}) {
            auto genes = x.flatten();
            const bool is_mult = g >= 6 && g < 12;
            genes[g] += d * (is_mult ? multiplier_unit : 1.0);
            bool feasible = true;
            for (int k = 0; k < 6; ++k)
                if (genes[k] < bounds.owned.lo || genes[k] > bounds.owned.hi)
                    feasible = false;
            for (int k = 6; k < 12; ++k)
                if (genes[k] < bounds.multiplier.lo || genes[k] > bounds.multiplier.hi)
                    feasible = false;
            for (int k = 12; k < 15; ++k)
                if (genes[k] < bounds.parking.lo || genes[k] > bounds.parking.hi)
                    feasible = false;
            if (!feasible) continue;
            if (!seen.insert(genes).second) continue;
            fitnesses.push_back(fn(SolutionVector::from_flat(genes)));
        }
    }
    SensitivityOracleStats stats;
    stats.count = fitnesses.size();
    if (fitnesses.empty()) return stats;
    stats.min = *std::min_element(fitnesses.begin(), fitnesses.end());
    stats.max = *std::max_element(fitnesses.begin(), fitnesses.end());
    double sum = 0.0;
    for (double f : fitnesses) sum += f;
    stats.mean = sum / static_cast<double>(fitnesses.size());
    if (fitnesses.size() > 1) {
        double ss = 0.0;
        for (double f : fitnesses) ss += (f - stats.mean) * (f - stats.mean);
        stats.sample_std = std::sqrt(ss / static_cast<double>(fitnesses.size() - 1));
    }
    return stats;
}

SimulationEvaluator quadratic_toy() {
    return [](const SolutionVector& x, std::uint64_t) {
        const auto g = x.flatten();
        double f = 0.0;
        for (int k = 0; k < 6; ++k) f += 12.0 * (g[k] - 33.0) * (g[k] - 33.0);
        for (int k = 6; k < 12; ++k) f += 5.0e4 * (g[k] - 1.2) * (g[k] - 1.2);
        for (int k = 12; k < 15; ++k) f += 90.0 * (g[k] - 21.0) * (g[k] - 21.0);
        return f;
    };
}

double random_sampling_oracle(const SimulationEvaluator& fn, const Bounds& bounds,
                              int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed * 0x9e3779b97f4a7c15ULL + 12345);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        SolutionVector x;
        for (auto& v : x.owned)
            v = bounds.owned.lo +
                static_cast<int>(unit(gen) *
                                 (bounds.owned.hi - bounds.owned.lo + 1));
        for (auto& m : x.ext_multiplier)
            m = bounds.multiplier.lo +
                unit(gen) * (bounds.multiplier.hi - bounds.multiplier.lo);
        for (auto& p : x.parking)
            p = bounds.parking.lo +
                static_cast<int>(unit(gen) *
                                 (bounds.parking.hi - bounds.parking.lo + 1));
        best = std::min(best, fn(x, 0));
    }
    return best;
}

} // namespace fleetopt::oracles
