#include <doctest.h>

#include <cmath>

#include "fleetopt/errors.hpp"
#include "fleetopt/fleet_sim.hpp"
#include "fleetopt/rng.hpp"
#include "oracles.hpp"

using namespace fleetopt;

namespace {

SimParams zero_demand_params() {
    SimParams p;
    p.trip[0] = {6.0, 0.3};
    p.trip[1] = {8.0, 0.3};
    return p; // all demand and external rates zero
}

SolutionVector modest_solution() {
    SolutionVector x;
    x.owned = {5, 5, 5, 5, 5, 5};
    x.ext_multiplier.fill(1.0);
    x.parking = {10, 10, 10};
    return x;
}

/// One site, one type, no externals; everything else silent.
SimParams single_queue_params(double rate, double trip_median, double trip_sigma,
                              double unload_hours, int horizon_days) {
    SimParams p = zero_demand_params();
    p.horizon_days = horizon_days;
    p.warmup_days = 0;
    p.demand[0][0] = constant_weekly_profile(rate);
    p.trip[0] = {trip_median, trip_sigma};
    p.defect_prob = 0.0;
    p.unload_hours = unload_hours;
    return p;
}

} // namespace

TEST_CASE("zero demand produces an all-zero outcome") {
    const SimulationOutcome o = simulate(modest_solution(), zero_demand_params(), 1);
    CHECK(o == SimulationOutcome{});
}

TEST_CASE("unconstrained capacity produces no shortage events") {
    SimParams p = default_sim_params();
    for (auto& row : p.ext_base_rate)
        for (auto& r : row) r = 0.0;
    p.defect_prob = 0.0;
    SolutionVector x;
    x.owned.fill(1000000);
    x.ext_multiplier.fill(1.0);
    x.parking.fill(1000000);
    const SimulationOutcome o = simulate(x, p, 99);
    for (int i = 0; i < kNumTypes; ++i) {
        CHECK(o.missed_calls[i] == 0);
        CHECK(o.full_park_events[i] == 0);
        CHECK(o.ext_shipments[i] == 0);
        CHECK(o.orders_served[i] > 0);
    }
    CHECK(o.defects == 0);
}

TEST_CASE("simulate is deterministic for a fixed triple") {
    const SimParams p = default_sim_params();
    const SolutionVector x = modest_solution();
    const SimulationOutcome a = simulate(x, p, 1234);
    const SimulationOutcome b = simulate(x, p, 1234);
    CHECK(a == b);
    const SimulationOutcome c = simulate(x, p, 1235);
    CHECK(a != c); // different seed, different realisation
}

TEST_CASE("counts stay within the generated-order envelope across seeds") {
    const SimParams p = default_sim_params();
    const SolutionVector x = modest_solution();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const SimulationOutcome o = simulate(x, p, seed);
        for (int i = 0; i < kNumTypes; ++i) {
            CHECK(o.missed_calls[i] >= 0);
            CHECK(o.missed_calls[i] <= o.orders_generated[i]);
            CHECK(o.ext_shipments[i] <= o.orders_generated[i]);
            CHECK(o.orders_served[i] <= o.orders_generated[i]);
            CHECK(o.full_park_events[i] <= o.orders_generated[i]);
            // Conservation: served plus still-waiting never exceeds generated.
            CHECK(o.orders_served[i] + o.waiting_at_horizon[i] <=
                  o.orders_generated[i]);
        }
        CHECK(o.defects <= o.orders_generated[0] + o.orders_generated[1]);
    }
}

TEST_CASE("five extra vehicles do not worsen mean missed calls") {
    SimParams p = default_sim_params();
    p.horizon_days = 120; // shorter horizon keeps the test quick
    SolutionVector lean = modest_solution();
    lean.owned = {8, 6, 4, 3, 1, 2};
    SolutionVector richer = lean;
    richer.owned[0] += 5; // more trailers at site 1

    const int n_seeds = 20;
    double sum_lean = 0.0, sum_rich = 0.0, ss_lean = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        const auto a = simulate(lean, p, 1000 + static_cast<std::uint64_t>(s));
        const auto b = simulate(richer, p, 1000 + static_cast<std::uint64_t>(s));
        sum_lean += static_cast<double>(a.missed_calls[0]);
        sum_rich += static_cast<double>(b.missed_calls[0]);
    }
    const double mean_lean = sum_lean / n_seeds;
    const double mean_rich = sum_rich / n_seeds;
    for (int s = 0; s < n_seeds; ++s) {
        const auto a = simulate(lean, p, 1000 + static_cast<std::uint64_t>(s));
        const double d = static_cast<double>(a.missed_calls[0]) - mean_lean;
        ss_lean += d * d;
    }
    const double se = std::sqrt(ss_lean / (n_seeds - 1) / n_seeds);
    CHECK(mean_rich <= mean_lean + se);
}

TEST_CASE("order stream: all-zero profile gives an empty stream") {
    Rng rng(1);
    CHECK(generate_order_stream(WeeklyProfile{}, 30, rng).empty());
}

TEST_CASE("order stream: constant rate matches the Poisson mean") {
    const WeeklyProfile profile = constant_weekly_profile(2.0);
    const int n_seeds = 1000;
    double total = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        Rng rng(derive_seed(500, "stream-test", static_cast<std::uint64_t>(s)));
        total += static_cast<double>(generate_order_stream(profile, 7, rng).size());
    }
    const double mean = total / n_seeds;
    const double expected = 2.0 * 24 * 7; // 336
    const double se = std::sqrt(expected / n_seeds);
    CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("order stream: single active hour confines all timestamps") {
    WeeklyProfile profile{};
    for (int dow = 0; dow < 7; ++dow) profile.rate[dow][0] = 3.0;
    Rng rng(9);
    const auto events = generate_order_stream(profile, 14, rng);
    CHECK(!events.empty());
    double prev = 0.0;
    for (const auto& e : events) {
        const double day_offset = e.time_hours - std::floor(e.time_hours / 24.0) * 24.0;
        CHECK(day_offset >= 0.0);
        CHECK(day_offset < 1.0); // within [day, day + 1h)
        CHECK(e.time_hours >= prev);
        prev = e.time_hours;
    }
}

TEST_CASE("external arrival rate") {
    CHECK(external_arrival_rate(0.5, 1.0) == 0.5);
    CHECK(external_arrival_rate(0.5, 2.0) == 1.0);
    CHECK(external_arrival_rate(0.0, 1.18) == 0.0);
    CHECK_THROWS_AS(external_arrival_rate(-0.1, 1.0), ValidationError);
}

TEST_CASE("validation errors name the offending field") {
    SimParams p = default_sim_params();
    p.defect_prob = 1.5;
    CHECK_THROWS_WITH_AS(simulate(modest_solution(), p, 1),
                         doctest::Contains("defect_prob"), ValidationError);
    p = default_sim_params();
    p.warmup_days = 400;
    CHECK_THROWS_WITH_AS(simulate(modest_solution(), p, 1),
                         doctest::Contains("horizon_days"), ValidationError);
    SolutionVector x = modest_solution();
    x.owned[4] = -3;
    CHECK_THROWS_WITH_AS(simulate(x, default_sim_params(), 1),
                         doctest::Contains("owned"), ValidationError);
    x = modest_solution();
    x.ext_multiplier[0] = 10.0; // above the thinning cap
    CHECK_THROWS_WITH_AS(simulate(x, default_sim_params(), 1),
                         doctest::Contains("ext_multiplier"), ValidationError);
}

TEST_CASE("missed-call fraction matches the Monte-Carlo queue oracle") {
    // Single site, single type, rate 1/h, two vehicles, trip median 1h.
    const double rate = 1.0, median = 1.0, sigma = 0.3, unload = 0.5;
    const int horizon_days = 60;
    const SimParams p = single_queue_params(rate, median, sigma, unload, horizon_days);
    SolutionVector x;
    x.ext_multiplier.fill(1.0);
    x.owned[SolutionVector::pair_index(0, 0)] = 2;
    x.parking = {50, 0, 0};

    const int n_seeds = 100;
    double sum = 0.0;
    std::vector<double> fractions;
    for (int s = 0; s < n_seeds; ++s) {
        const auto o = simulate(x, p, 42000 + static_cast<std::uint64_t>(s));
        const double frac = o.orders_generated[0] == 0
                                ? 0.0
                                : static_cast<double>(o.missed_calls[0]) /
                                      static_cast<double>(o.orders_generated[0]);
        fractions.push_back(frac);
        sum += frac;
    }
    const double sim_mean = sum / n_seeds;
    double ss = 0.0;
    for (double f : fractions) ss += (f - sim_mean) * (f - sim_mean);
    const double sim_se = std::sqrt(ss / (n_seeds - 1) / n_seeds);

    const auto oracle = oracles::mc_queue_oracle(
        n_seeds, horizon_days * 24.0, rate, 2, median, sigma, unload, 12.0, 777);

    const double combined_se =
        std::sqrt(sim_se * sim_se + oracle.standard_error * oracle.standard_error);
    CHECK(std::abs(sim_mean - oracle.mean_missed_fraction) <= 3.0 * combined_se);
    CHECK(sim_mean > 0.0); // the scenario is genuinely loaded
}

TEST_CASE("warm-up events are excluded from counts") {
    // No vehicles and no externals: every order inside the counting window
    // whose 12h mark fits before the horizon becomes exactly one missed call.
    SimParams p = single_queue_params(1.0, 1.0, 0.3, 0.5, 28);
    SolutionVector x;
    x.ext_multiplier.fill(1.0);

    const int n_seeds = 50;
    double with_warmup = 0.0, without_warmup = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        p.warmup_days = 14;
        with_warmup += static_cast<double>(
            simulate(x, p, 600 + static_cast<std::uint64_t>(s)).missed_calls[0]);
        p.warmup_days = 0;
        without_warmup += static_cast<double>(
            simulate(x, p, 600 + static_cast<std::uint64_t>(s)).missed_calls[0]);
    }
    const double mean_with = with_warmup / n_seeds;
    const double mean_without = without_warmup / n_seeds;
    // Expected counted misses: rate * window, window shortened by the warmup
    // (14 days) or by the final 12 hours (checks past the horizon).
    const double expect_with = 1.0 * 14 * 24.0;
    const double expect_without = 1.0 * (28 * 24.0 - 12.0);
    CHECK(std::abs(mean_with - expect_with) <= 3.0 * std::sqrt(expect_with / n_seeds));
    CHECK(std::abs(mean_without - expect_without) <=
          3.0 * std::sqrt(expect_without / n_seeds));
}

TEST_CASE("full parking diverts returning vehicles and is counted") {
    // One spot and slow unloading at a busy site forces conflicts.
    SimParams p = single_queue_params(2.0, 2.0, 0.2, 4.0, 40);
    SolutionVector x;
    x.ext_multiplier.fill(1.0);
    x.owned[SolutionVector::pair_index(0, 0)] = 30;
    x.parking = {1, 0, 0};
    const auto o = simulate(x, p, 5);
    CHECK(o.full_park_events[0] > 0);
    CHECK(o.full_park_events[0] <= o.orders_served[0]);

    // With ample parking the same scenario has no conflicts.
    x.parking = {1000, 0, 0};
    const auto o2 = simulate(x, p, 5);
    CHECK(o2.full_park_events[0] == 0);
}

TEST_CASE("external arrivals serve queued orders and are counted") {
    SimParams p = single_queue_params(1.0, 2.0, 0.2, 0.5, 40);
    p.ext_base_rate[0][0] = 1.5;
    SolutionVector x; // no owned vehicles: everything must go external
    x.ext_multiplier.fill(1.0);
    const auto o = simulate(x, p, 11);
    CHECK(o.ext_shipments[0] > 0);
    CHECK(o.orders_served[0] == o.ext_shipments[0]);

    // A higher multiplier (thinned from the same master stream) serves at
    // least as many orders and cannot increase missed calls.
    SolutionVector x2 = x;
    x2.ext_multiplier[SolutionVector::pair_index(0, 0)] = 2.0;
    const auto o2 = simulate(x2, p, 11);
    CHECK(o2.ext_shipments[0] >= o.ext_shipments[0]);
    CHECK(o2.missed_calls[0] <= o.missed_calls[0]);
}
