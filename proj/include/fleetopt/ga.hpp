#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "fleetopt/cost_model.hpp"
#include "fleetopt/sim_params.hpp"
#include "fleetopt/solution.hpp"
#include "fleetopt/surrogate.hpp"
#include "fleetopt/training_set.hpp"

namespace fleetopt {

class Rng;

/// Training regime used when (re)fitting the surrogate inside a run.
/// Grid-search folds train with cv_epochs; the selected candidate is then
/// trained at `epochs`.
struct SurrogateTraining {
    double learning_rate = 1e-3;
    int epochs = 300;
    int cv_epochs = 60;
    int batch_size = 32;
    int cv_folds = 10;

    Hyperparams base(int epoch_count) const {
        Hyperparams h;
        h.learning_rate = learning_rate;
        h.epochs = epoch_count;
        h.batch_size = batch_size;
        return h;
    }
};

struct GaConfig {
    int population_size = 100;
    double ensure_prob = 0.01;
    double threshold = 50000.0;
    double mutation_prob = 0.2;  // per gene
    double crossover_prob = 0.5; // per pair
    int n_elites = 2;
    int max_generations = 10;
    int max_simulations = 300; // optimisation-cycle budget, excludes the pool
    int initial_random_sims = 1000;
    int grid_search_interval = 5; // regenerate hyperparameters every N generations
    Bounds bounds;
    SurrogateTraining surrogate;
};

void validate(const GaConfig& cfg);

enum class FilterDecision { AdmitThreshold, AdmitEnsure, Reject };

constexpr bool admits(FilterDecision d) { return d != FilterDecision::Reject; }

/// Surrogate filter: simulate when the approximation is within `threshold`
/// of the best simulated fitness, otherwise let the ensure draw decide.
FilterDecision filter_decision(FitnessValue f_hat, FitnessValue f_star,
                               double threshold, double ensure_prob, double u);

/// The population is the S distinct solutions with lowest archived fitness,
/// ties by archive order.
std::vector<SolutionVector> initialize_population(const TrainingSet& pool,
                                                  std::size_t population_size);

/// Single-point crossover on the flattened 15-gene vector, applied with
/// probability p_crossover per pair; otherwise the children are copies.
std::pair<SolutionVector, SolutionVector> crossover(const SolutionVector& a,
                                                    const SolutionVector& b,
                                                    double p_crossover, Rng& rng);

/// Per-gene mutation: integer genes take a uniform step in {-3..-1, 1..3},
/// multiplier genes a Gaussian perturbation (sigma 0.05); all clamped to
/// bounds.
SolutionVector mutate(const SolutionVector& x, double p_mutation, const Bounds& bounds,
                      Rng& rng);

/// Tournament selection (size 2, with replacement) over fitness-or-approx
/// values; returns ceil(n_offspring / 2) parent index pairs.
std::vector<std::pair<std::size_t, std::size_t>> select_parents(
    const std::vector<FitnessValue>& values, std::size_t n_offspring, Rng& rng);

/// Fitness backend: must be a pure function of (solution, seed) and safe to
/// call concurrently.
using SimulationEvaluator =
    std::function<FitnessValue(const SolutionVector&, std::uint64_t)>;

SimulationEvaluator make_sim_evaluator(const SimParams& sim, const CostParams& cost);

/// Every simulation in one optimisation run shares this seed (common random
/// numbers across candidates). Pools intended as initial archives must be
/// built under the same master seed.
std::uint64_t common_sim_seed(std::uint64_t master_seed);

/// n uniform samples within bounds, each evaluated under
/// common_sim_seed(seed). run_so with no explicit archive builds exactly
/// this pool, so prebuilding it and passing it in changes nothing.
TrainingSet build_training_pool(int n, const SimulationEvaluator& sim,
                                const Bounds& bounds, std::uint64_t seed,
                                unsigned workers = 1);

struct GenerationStats {
    int generation = 0;
    int simulations = 0;
    int threshold_admits = 0;
    int ensure_fires = 0;
    int rejections = 0;
    int cache_hits = 0;
    int budget_skips = 0;
    double best_prediction = 0.0; // lowest approximation among candidates
    double f_star = 0.0;          // best simulated fitness so far
};

struct SoResult {
    SolutionVector best;
    FitnessValue best_fitness = 0.0;
    int sims_used = 0;
    int generations_run = 0;
    std::vector<GenerationStats> history;
    TrainingSet archive;
    std::vector<SolutionVector> final_population;
    Hyperparams chosen_hyperparams;
};

/// The full surrogate-filtered optimisation: random initial simulations,
/// population seeded from the best of them, surrogate trained on the
/// archive, then generations of genetic operators whose candidates are
/// approximated, filtered and (budget permitting) simulated, with the
/// surrogate retrained on the grown archive after each generation. Stops
/// after max_generations or max_simulations, whichever comes first.
///
/// When `initial_archive` is given it replaces the random initialisation
/// (studies share one pool across arms); rows must have been evaluated under
/// common_sim_seed(seed).
SoResult run_so(const GaConfig& cfg, const SimulationEvaluator& sim,
                std::uint64_t seed, const TrainingSet* initial_archive = nullptr,
                unsigned workers = 1);

} // namespace fleetopt
