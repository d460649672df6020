#include "fleetopt/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "fleetopt/errors.hpp"
#include "fleetopt/fleet_sim.hpp"
#include "fleetopt/parallel.hpp"
#include "fleetopt/rng.hpp"

namespace fleetopt {

void validate(const GaConfig& cfg) {
    if (cfg.n_elites < 0) throw ValidationError("ga.n_elites must be >= 0");
    if (cfg.population_size < cfg.n_elites || cfg.population_size < 1)
        throw ValidationError("ga.population_size must be >= max(1, n_elites)");
    if (!(cfg.ensure_prob >= 0.0 && cfg.ensure_prob <= 1.0))
        throw ValidationError("ga.ensure_prob must be in [0,1]");
    if (!(cfg.mutation_prob >= 0.0 && cfg.mutation_prob <= 1.0))
        throw ValidationError("ga.mutation_prob must be in [0,1]");
    if (!(cfg.crossover_prob >= 0.0 && cfg.crossover_prob <= 1.0))
        throw ValidationError("ga.crossover_prob must be in [0,1]");
    if (!(cfg.threshold >= 0.0)) throw ValidationError("ga.threshold must be >= 0");
    if (cfg.max_generations < 1)
        throw ValidationError("ga.max_generations must be >= 1");
    if (cfg.max_simulations < 0)
        throw ValidationError("ga.max_simulations must be >= 0");
    if (cfg.initial_random_sims < 1)
        throw ValidationError("ga.initial_random_sims must be >= 1");
    if (cfg.grid_search_interval < 1)
        throw ValidationError("ga.grid_search_interval must be >= 1");
    if (cfg.bounds.owned.lo < 0 || cfg.bounds.owned.lo > cfg.bounds.owned.hi)
        throw ValidationError("ga.bounds.owned requires 0 <= lo <= hi");
    if (cfg.bounds.parking.lo < 0 || cfg.bounds.parking.lo > cfg.bounds.parking.hi)
        throw ValidationError("ga.bounds.parking requires 0 <= lo <= hi");
    if (!(cfg.bounds.multiplier.lo > 0.0) ||
        !(cfg.bounds.multiplier.lo <= cfg.bounds.multiplier.hi))
        throw ValidationError("ga.bounds.multiplier requires 0 < lo <= hi");
}

FilterDecision filter_decision(FitnessValue f_hat, FitnessValue f_star,
                               double threshold, double ensure_prob, double u) {
    if (f_hat <= f_star + threshold) return FilterDecision::AdmitThreshold;
    if (u < ensure_prob) return FilterDecision::AdmitEnsure;
    return FilterDecision::Reject;
}

std::vector<SolutionVector> initialize_population(const TrainingSet& pool,
                                                  std::size_t population_size) {
    if (pool.size() < population_size)
        throw ValidationError("initial pool smaller than population size");
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pool.rows[a].fitness < pool.rows[b].fitness;
    });
    std::vector<SolutionVector> population;
    population.reserve(population_size);
    std::map<std::array<double, kNumGenes>, bool> seen;
    for (std::size_t i : order) {
        if (population.size() == population_size) break;
        const auto& features = pool.rows[i].features;
        if (seen.emplace(features, true).second)
            population.push_back(SolutionVector::from_flat(features));
    }
    if (population.size() < population_size)
        throw ValidationError("initial pool has fewer distinct solutions than "
                              "population size");
    return population;
}

std::pair<SolutionVector, SolutionVector> crossover(const SolutionVector& a,
                                                    const SolutionVector& b,
                                                    double p_crossover, Rng& rng) {
    const double u = rng.uniform();
    const auto ga = a.flatten();
    const auto gb = b.flatten();
    if (u >= p_crossover) {
        rng.uniform_int(1, kNumGenes - 1); // keep stream aligned with the cut draw
        return {a, b};
    }
    const int cut = static_cast<int>(rng.uniform_int(1, kNumGenes - 1));
    std::array<double, kNumGenes> c1{}, c2{};
    for (int g = 0; g < kNumGenes; ++g) {
        c1[g] = g < cut ? ga[g] : gb[g];
        c2[g] = g < cut ? gb[g] : ga[g];
    }
    return {SolutionVector::from_flat(c1), SolutionVector::from_flat(c2)};
}

namespace {

int clamp_int(int v, const IntRange& r) { return std::clamp(v, r.lo, r.hi); }

double clamp_real(double v, const RealRange& r) { return std::clamp(v, r.lo, r.hi); }

} // namespace

SolutionVector mutate(const SolutionVector& x, double p_mutation, const Bounds& bounds,
                      Rng& rng) {
    SolutionVector out = x;
    for (auto& v : out.owned) {
        if (rng.uniform() < p_mutation) {
            const int magnitude = static_cast<int>(rng.uniform_int(1, 3));
            const int sign = rng.uniform() < 0.5 ? -1 : 1;
            v = clamp_int(v + sign * magnitude, bounds.owned);
        }
    }
    for (auto& m : out.ext_multiplier) {
        if (rng.uniform() < p_mutation)
            m = clamp_real(m + 0.05 * rng.normal(), bounds.multiplier);
    }
    for (auto& p : out.parking) {
        if (rng.uniform() < p_mutation) {
            const int magnitude = static_cast<int>(rng.uniform_int(1, 3));
            const int sign = rng.uniform() < 0.5 ? -1 : 1;
            p = clamp_int(p + sign * magnitude, bounds.parking);
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> select_parents(
    const std::vector<FitnessValue>& values, std::size_t n_offspring, Rng& rng) {
    if (values.empty()) throw ValidationError("select_parents needs a population");
    const auto tournament = [&]() -> std::size_t {
        const auto i = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(values.size()) - 1));
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(values.size()) - 1));
        return values[i] <= values[j] ? i : j;
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve((n_offspring + 1) / 2);
    for (std::size_t k = 0; k < (n_offspring + 1) / 2; ++k) {
        const std::size_t p1 = tournament();
        const std::size_t p2 = tournament();
        pairs.emplace_back(p1, p2);
    }
    return pairs;
}

SimulationEvaluator make_sim_evaluator(const SimParams& sim, const CostParams& cost) {
    return [sim, cost](const SolutionVector& x, std::uint64_t seed) {
        return total_cost(x, simulate(x, sim, seed), cost);
    };
}

std::uint64_t common_sim_seed(std::uint64_t master_seed) {
    return derive_seed(master_seed, "sim-common");
}

TrainingSet build_training_pool(int n, const SimulationEvaluator& sim,
                                const Bounds& bounds, std::uint64_t seed,
                                unsigned workers) {
    if (n < 1) throw ValidationError("training pool size must be >= 1");
    const std::uint64_t sim_seed = common_sim_seed(seed);
    Rng pool_rng(derive_seed(seed, "pool"));
    std::vector<SolutionVector> xs;
    xs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs.push_back(sample_uniform(bounds, pool_rng));
    std::vector<FitnessValue> fs(xs.size());
    parallel_for(xs.size(), workers,
                 [&](std::size_t i) { fs[i] = sim(xs[i], sim_seed); });
    TrainingSet pool;
    for (std::size_t i = 0; i < xs.size(); ++i)
        pool.add(xs[i], fs[i], sim_seed, Provenance::RandomInit);
    return pool;
}

namespace {

struct ArchiveKey {
    std::array<double, kNumGenes> genes;
    std::uint64_t seed;

    bool operator<(const ArchiveKey& o) const {
        if (genes != o.genes) return genes < o.genes;
        return seed < o.seed;
    }
};

} // namespace

SoResult run_so(const GaConfig& cfg, const SimulationEvaluator& sim,
                std::uint64_t seed, const TrainingSet* initial_archive,
                unsigned workers) {
    validate(cfg);

    const std::uint64_t sim_seed = common_sim_seed(seed);
    Rng ga_rng(derive_seed(seed, "ga-ops"));
    Rng ensure_rng(derive_seed(seed, "ensure"));

    SoResult result;
    TrainingSet& archive = result.archive;
    std::map<ArchiveKey, FitnessValue> cache;

    if (initial_archive) {
        archive = *initial_archive;
        if (archive.empty())
            throw ValidationError("initial archive must not be empty");
    } else {
        archive = build_training_pool(cfg.initial_random_sims, sim, cfg.bounds,
                                      seed, workers);
    }
    for (const auto& row : archive.rows)
        cache.emplace(ArchiveKey{row.features, row.seed}, row.fitness);

    auto best_row = archive.rows[archive.best_index()];
    FitnessValue f_star = best_row.fitness;
    SolutionVector x_star = SolutionVector::from_flat(best_row.features);

    std::vector<SolutionVector> population =
        initialize_population(archive, static_cast<std::size_t>(cfg.population_size));

    SurrogateModel model;
    Hyperparams final_hp;
    const auto refresh_hyperparams = [&](std::uint64_t round) {
        const auto grid = default_grid(cfg.surrogate.base(cfg.surrogate.cv_epochs));
        const GridSearchResult gs = grid_search(
            archive, grid, cfg.surrogate.cv_folds,
            derive_seed(seed, "grid-search", round), workers);
        final_hp = gs.best;
        final_hp.epochs = cfg.surrogate.epochs;
    };

    const bool budget_left = cfg.max_simulations > 0;
    if (budget_left) {
        refresh_hyperparams(0);
        model = train(archive, final_hp, derive_seed(seed, "train", 0));
    }
    result.chosen_hyperparams = final_hp;

    for (int gen = 1; gen <= cfg.max_generations; ++gen) {
        if (result.sims_used >= cfg.max_simulations) break;
        result.generations_run = gen;

        // Fitness used for selection: simulated value when archived under
        // the run seed, surrogate approximation otherwise.
        std::vector<FitnessValue> values(population.size());
        std::vector<bool> simulated(population.size(), false);
        {
            const std::vector<FitnessValue> approx = predict_many(model, population);
            for (std::size_t i = 0; i < population.size(); ++i) {
                const auto it =
                    cache.find(ArchiveKey{population[i].flatten(), sim_seed});
                if (it != cache.end()) {
                    values[i] = it->second;
                    simulated[i] = true;
                } else {
                    values[i] = approx[i];
                }
            }
        }

        // Elites: best simulated members survive unchanged.
        std::vector<std::size_t> sim_members;
        for (std::size_t i = 0; i < population.size(); ++i)
            if (simulated[i]) sim_members.push_back(i);
        std::stable_sort(sim_members.begin(), sim_members.end(),
                         [&](std::size_t a, std::size_t b) {
                             return values[a] < values[b];
                         });
        std::vector<SolutionVector> elites;
        for (std::size_t i = 0;
             i < sim_members.size() && elites.size() <
                 static_cast<std::size_t>(cfg.n_elites);
             ++i)
            elites.push_back(population[sim_members[i]]);

        const std::size_t n_offspring =
            static_cast<std::size_t>(cfg.population_size) - elites.size();
        const auto pairs = select_parents(values, n_offspring, ga_rng);
        std::vector<SolutionVector> offspring;
        offspring.reserve(n_offspring + 1);
        for (const auto& [p1, p2] : pairs) {
            auto [c1, c2] =
                crossover(population[p1], population[p2], cfg.crossover_prob, ga_rng);
            offspring.push_back(mutate(c1, cfg.mutation_prob, cfg.bounds, ga_rng));
            if (offspring.size() < n_offspring)
                offspring.push_back(mutate(c2, cfg.mutation_prob, cfg.bounds, ga_rng));
        }

        GenerationStats stats;
        stats.generation = gen;
        stats.best_prediction = std::numeric_limits<double>::quiet_NaN();

        const std::vector<FitnessValue> predictions = predict_many(model, offspring);
        if (!predictions.empty())
            stats.best_prediction =
                *std::min_element(predictions.begin(), predictions.end());

        // Gate every candidate; the ensure draw is consumed for each one so
        // the stream stays aligned whatever the threshold decides.
        std::vector<SolutionVector> to_simulate;
        std::map<ArchiveKey, bool> pending;
        for (std::size_t k = 0; k < offspring.size(); ++k) {
            const double u = ensure_rng.uniform();
            const FilterDecision d = filter_decision(predictions[k], f_star,
                                                     cfg.threshold, cfg.ensure_prob, u);
            if (!admits(d)) {
                ++stats.rejections;
                continue;
            }
            if (d == FilterDecision::AdmitThreshold)
                ++stats.threshold_admits;
            else
                ++stats.ensure_fires;
            const ArchiveKey key{offspring[k].flatten(), sim_seed};
            if (cache.count(key) || pending.count(key)) {
                ++stats.cache_hits;
                continue;
            }
            if (result.sims_used + static_cast<int>(to_simulate.size()) >=
                cfg.max_simulations) {
                ++stats.budget_skips;
                continue;
            }
            pending.emplace(key, true);
            to_simulate.push_back(offspring[k]);
        }

        std::vector<FitnessValue> new_fitness(to_simulate.size());
        parallel_for(to_simulate.size(), workers, [&](std::size_t i) {
            new_fitness[i] = sim(to_simulate[i], sim_seed);
        });
        for (std::size_t i = 0; i < to_simulate.size(); ++i) {
            archive.add(to_simulate[i], new_fitness[i], sim_seed, Provenance::SoRun);
            cache.emplace(ArchiveKey{to_simulate[i].flatten(), sim_seed},
                          new_fitness[i]);
            if (new_fitness[i] < f_star) {
                f_star = new_fitness[i];
                x_star = to_simulate[i];
            }
        }
        result.sims_used += static_cast<int>(to_simulate.size());
        stats.simulations = static_cast<int>(to_simulate.size());
        stats.f_star = f_star;
        result.history.push_back(stats);

        population = elites;
        population.insert(population.end(), offspring.begin(), offspring.end());

        if (gen == cfg.max_generations || result.sims_used >= cfg.max_simulations)
            break;

        // Retrain on the grown archive; every grid_search_interval
        // generations the hyperparameter search is re-run as well.
        if (gen % cfg.grid_search_interval == 0) refresh_hyperparams(
            static_cast<std::uint64_t>(gen));
        model = train(archive, final_hp,
                      derive_seed(seed, "train", static_cast<std::uint64_t>(gen)));
        result.chosen_hyperparams = final_hp;
    }

    result.best = x_star;
    result.best_fitness = f_star;
    result.final_population = population;
    return result;
}

} // namespace fleetopt
