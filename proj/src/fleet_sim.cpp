#include "fleetopt/fleet_sim.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <queue>
#include <string>
#include <vector>

#include "fleetopt/errors.hpp"
#include "fleetopt/rng.hpp"

namespace fleetopt {

std::vector<OrderEvent> generate_order_stream(const WeeklyProfile& profile,
                                              int horizon_days, Rng& rng) {
    for (const auto& day : profile.rate)
        for (double r : day)
            if (!(r >= 0.0))
                throw ValidationError("demand profile rates must be >= 0");
    std::vector<OrderEvent> events;
    for (int day = 0; day < horizon_days; ++day) {
        const int dow = day % 7;
        for (int hour = 0; hour < 24; ++hour) {
            const std::int64_t n = rng.poisson(profile.at(dow, hour));
            const double base = day * 24.0 + hour;
            for (std::int64_t k = 0; k < n; ++k)
                events.push_back(OrderEvent{base + rng.uniform()});
        }
    }
    std::sort(events.begin(), events.end(),
              [](const OrderEvent& a, const OrderEvent& b) {
                  return a.time_hours < b.time_hours;
              });
    return events;
}

double external_arrival_rate(double base_rate, double multiplier) {
    if (!(base_rate >= 0.0))
        throw ValidationError("ext_base_rate must be >= 0");
    if (!(multiplier > 0.0))
        throw ValidationError("ext_multiplier must be > 0");
    return base_rate * multiplier;
}

namespace {

enum class EventKind : std::uint8_t {
    OrderArrival,
    ExternalArrival,
    VehicleReturn,
    UnloadDone,
    MissedCheck,
};

struct Event {
    double t;
    std::uint64_t seq;
    EventKind kind;
    std::int8_t type;
    std::int8_t site;
    std::int64_t order = -1;
};

struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

struct OrderRec {
    double t_arrival;
    std::int8_t type;
    std::int8_t site;
    bool served = false;
};

} // namespace

SimulationOutcome simulate(const SolutionVector& x, const SimParams& p,
                           std::uint64_t seed) {
    validate(x);
    validate(p);
    for (int i = 0; i < kNumTypes * kNumSites; ++i) {
        if (x.ext_multiplier[i] > p.ext_multiplier_cap)
            throw ValidationError("ext_multiplier exceeds sim.ext_multiplier_cap");
    }

    const double horizon = p.horizon_days * 24.0;
    const double warmup = p.warmup_days * 24.0;

    // Pre-generate all exogenous arrivals. Their streams depend only on
    // (params, seed) — never on x — so every candidate solution sees the
    // same demand and the same master external stream (common random
    // numbers). External arrivals are thinned from rate base*cap down to
    // base*multiplier; the acceptance draw is consumed for every master
    // arrival to keep streams aligned across candidates.
    std::vector<OrderRec> orders;
    std::vector<Event> arrivals;
    std::uint64_t seq = 0;
    for (int i = 0; i < kNumTypes; ++i) {
        for (int l = 0; l < kNumSites; ++l) {
            const int pair = SolutionVector::pair_index(i, l);
            Rng demand_rng(derive_seed(seed, "demand", pair));
            auto stream = generate_order_stream(p.demand[i][l], p.horizon_days,
                                                demand_rng);
            for (const auto& ev : stream) {
                arrivals.push_back(Event{ev.time_hours, seq++,
                                         EventKind::OrderArrival,
                                         static_cast<std::int8_t>(i),
                                         static_cast<std::int8_t>(l),
                                         static_cast<std::int64_t>(orders.size())});
                orders.push_back(OrderRec{ev.time_hours,
                                          static_cast<std::int8_t>(i),
                                          static_cast<std::int8_t>(l)});
            }

            const double master_rate = p.ext_base_rate[i][l] * p.ext_multiplier_cap;
            if (master_rate > 0.0) {
                const double accept_prob =
                    x.ext_multiplier[pair] / p.ext_multiplier_cap;
                Rng ext_rng(derive_seed(seed, "external", pair));
                double t = ext_rng.exponential(master_rate);
                while (t <= horizon) {
                    const double u = ext_rng.uniform();
                    if (u < accept_prob)
                        arrivals.push_back(Event{t, seq++,
                                                 EventKind::ExternalArrival,
                                                 static_cast<std::int8_t>(i),
                                                 static_cast<std::int8_t>(l)});
                    t += ext_rng.exponential(master_rate);
                }
            }
        }
    }
    std::sort(arrivals.begin(), arrivals.end(), [](const Event& a, const Event& b) {
        return a.t != b.t ? a.t < b.t : a.seq < b.seq;
    });

    // Mutable process state.
    std::array<std::int64_t, kNumTypes * kNumSites> idle{};
    for (int i = 0; i < kNumTypes * kNumSites; ++i) idle[i] = x.owned[i];
    std::array<std::int64_t, kNumSites> spots_free{};
    for (int l = 0; l < kNumSites; ++l) spots_free[l] = x.parking[l];
    std::array<std::deque<std::int8_t>, kNumSites> diverted; // vehicle types
    std::array<std::deque<std::int64_t>, kNumTypes * kNumSites> waiting; // order ids

    std::priority_queue<Event, std::vector<Event>, EventLater> dynamic;
    SimulationOutcome out;

    std::size_t next_arrival = 0;
    const auto counted = [&](double t) { return t >= warmup; };

    const auto trip_hours = [&](std::int64_t order_id, int type) {
        return p.trip[type].median_hours *
               std::exp(p.trip[type].sigma * keyed_normal(seed, "trip", order_id));
    };

    const auto start_trip = [&](double t, const Event& ev) {
        if (counted(t)) ++out.orders_served[ev.type];
        orders[ev.order].served = true;
        dynamic.push(Event{t + trip_hours(ev.order, ev.type), seq++,
                           EventKind::VehicleReturn, ev.type, ev.site, ev.order});
    };

    while (true) {
        const Event* next = nullptr;
        bool from_arrivals = false;
        if (next_arrival < arrivals.size()) {
            next = &arrivals[next_arrival];
            from_arrivals = true;
        }
        if (!dynamic.empty()) {
            const Event& d = dynamic.top();
            if (!next || d.t < next->t || (d.t == next->t && d.seq < next->seq)) {
                next = &d;
                from_arrivals = false;
            }
        }
        if (!next || next->t > horizon) break;
        const Event ev = *next;
        if (from_arrivals)
            ++next_arrival;
        else
            dynamic.pop();

        const int pair = SolutionVector::pair_index(ev.type, ev.site);
        switch (ev.kind) {
        case EventKind::OrderArrival: {
            ++out.orders_generated[ev.type];
            if (idle[pair] > 0) {
                --idle[pair];
                start_trip(ev.t, ev);
            } else {
                waiting[pair].push_back(ev.order);
                dynamic.push(Event{ev.t + p.missed_call_wait_hours, seq++,
                                   EventKind::MissedCheck, ev.type, ev.site,
                                   ev.order});
            }
            break;
        }
        case EventKind::ExternalArrival: {
            if (!waiting[pair].empty()) {
                const std::int64_t id = waiting[pair].front();
                waiting[pair].pop_front();
                orders[id].served = true;
                if (counted(ev.t)) {
                    ++out.ext_shipments[ev.type];
                    ++out.orders_served[ev.type];
                }
            }
            break;
        }
        case EventKind::VehicleReturn: {
            if (counted(ev.t) &&
                keyed_uniform(seed, "defect", ev.order) < p.defect_prob)
                ++out.defects;
            if (spots_free[ev.site] > 0) {
                --spots_free[ev.site];
                dynamic.push(Event{ev.t + p.unload_hours, seq++,
                                   EventKind::UnloadDone, ev.type, ev.site});
            } else {
                if (counted(ev.t)) ++out.full_park_events[ev.type];
                diverted[ev.site].push_back(ev.type);
            }
            break;
        }
        case EventKind::UnloadDone: {
            ++idle[pair];
            if (!diverted[ev.site].empty()) {
                const std::int8_t t2 = diverted[ev.site].front();
                diverted[ev.site].pop_front();
                // The freed place is taken immediately by the queued vehicle.
                dynamic.push(Event{ev.t + p.unload_hours, seq++,
                                   EventKind::UnloadDone, t2, ev.site});
            } else {
                ++spots_free[ev.site];
            }
            break;
        }
        case EventKind::MissedCheck: {
            if (!orders[ev.order].served && counted(ev.t))
                ++out.missed_calls[ev.type];
            break;
        }
        }
    }

    for (int i = 0; i < kNumTypes; ++i)
        for (int l = 0; l < kNumSites; ++l)
            out.waiting_at_horizon[i] += static_cast<std::int64_t>(
                waiting[SolutionVector::pair_index(i, l)].size());
    return out;
}

} // namespace fleetopt
