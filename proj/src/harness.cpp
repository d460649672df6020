#include "fleetopt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fleetopt/csv.hpp"
#include "fleetopt/errors.hpp"
#include "fleetopt/parallel.hpp"
#include "fleetopt/rng.hpp"

namespace fleetopt {

namespace {

const char* kStudyParameters[] = {"population_size", "threshold", "ensure_prob",
                                  "mutation_prob"};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

void validate(const StudySpec& spec) {
    bool known = false;
    for (const char* p : kStudyParameters)
        if (spec.parameter == p) known = true;
    if (!known)
        throw ValidationError("study parameter must be one of population_size, "
                              "threshold, ensure_prob, mutation_prob");
    if (spec.values.empty()) throw ValidationError("study needs at least one value");
    if (spec.seeds.empty()) throw ValidationError("study needs at least one seed");
    validate(spec.base);
    for (double v : spec.values) validate(apply_parameter(spec.base, spec.parameter, v));
}

GaConfig apply_parameter(const GaConfig& base, const std::string& parameter,
                         double value) {
    GaConfig cfg = base;
    if (parameter == "population_size")
        cfg.population_size = static_cast<int>(std::llround(value));
    else if (parameter == "threshold")
        cfg.threshold = value;
    else if (parameter == "ensure_prob")
        cfg.ensure_prob = value;
    else if (parameter == "mutation_prob")
        cfg.mutation_prob = value;
    else
        throw ValidationError("unknown study parameter: " + parameter);
    return cfg;
}

std::vector<StudyAggregate> StudyResult::aggregates() const {
    std::vector<StudyAggregate> out;
    std::vector<double> seen;
    for (const auto& arm : arms) {
        if (std::find(seen.begin(), seen.end(), arm.value) != seen.end()) continue;
        seen.push_back(arm.value);
        StudyAggregate agg;
        agg.value = arm.value;
        std::vector<double> best, evals;
        for (const auto& a : arms) {
            if (a.value != arm.value) continue;
            best.push_back(a.best_fitness);
            evals.push_back(static_cast<double>(a.evaluations));
        }
        agg.median_best = median(best);
        agg.min_best = *std::min_element(best.begin(), best.end());
        agg.median_evaluations = median(evals);
        out.push_back(agg);
    }
    return out;
}

std::string StudyResult::to_csv() const {
    CsvTable table;
    table.header = {"parameter", "value", "seed", "best_fitness", "evaluations",
                    "generations", "pool_checksum"};
    for (const auto& arm : arms)
        table.rows.push_back({parameter, format_double(arm.value),
                              std::to_string(arm.seed),
                              format_double(arm.best_fitness),
                              format_int(arm.evaluations),
                              format_int(arm.generations),
                              std::to_string(arm.pool_checksum)});
    return table.to_string();
}

StudyResult run_parameter_study(const StudySpec& spec, const SimulationEvaluator& sim,
                                unsigned workers) {
    validate(spec);
    StudyResult result;
    result.parameter = spec.parameter;
    for (std::uint64_t seed : spec.seeds) {
        // One pool per repetition, shared by every value arm.
        const TrainingSet pool = build_training_pool(
            spec.base.initial_random_sims, sim, spec.base.bounds, seed, workers);
        const std::uint64_t checksum = pool.checksum();
        for (double value : spec.values) {
            const GaConfig cfg = apply_parameter(spec.base, spec.parameter, value);
            const SoResult so = run_so(cfg, sim, seed, &pool, workers);
            StudyArm arm;
            arm.value = value;
            arm.seed = seed;
            arm.best_fitness = so.best_fitness;
            arm.evaluations = so.sims_used;
            arm.generations = so.generations_run;
            arm.pool_checksum = checksum;
            result.arms.push_back(arm);
        }
    }
    return result;
}

std::string BaselineResult::to_csv() const {
    CsvTable table;
    table.header = {"budget", "best_fitness", "seed"};
    for (const auto& p : points)
        table.rows.push_back({format_int(p.budget), format_double(p.best_fitness),
                              std::to_string(seed)});
    return table.to_string();
}

BaselineResult run_random_baseline(const std::vector<int>& budgets,
                                   const SimulationEvaluator& sim, const Bounds& bounds,
                                   std::uint64_t seed, unsigned workers) {
    if (budgets.empty()) throw ValidationError("baseline needs at least one budget");
    for (int b : budgets)
        if (b < 1) throw ValidationError("baseline budgets must be >= 1");
    const int max_budget = *std::max_element(budgets.begin(), budgets.end());

    Rng sample_rng(derive_seed(seed, "baseline"));
    const std::uint64_t sim_seed = common_sim_seed(seed);
    std::vector<SolutionVector> xs;
    xs.reserve(static_cast<std::size_t>(max_budget));
    for (int i = 0; i < max_budget; ++i) xs.push_back(sample_uniform(bounds, sample_rng));
    std::vector<FitnessValue> fs(xs.size());
    parallel_for(xs.size(), workers,
                 [&](std::size_t i) { fs[i] = sim(xs[i], sim_seed); });

    BaselineResult result;
    result.seed = seed;
    result.best_so_far.resize(fs.size());
    FitnessValue best = fs[0];
    for (std::size_t i = 0; i < fs.size(); ++i) {
        best = std::min(best, fs[i]);
        result.best_so_far[i] = best;
    }
    for (int b : budgets)
        result.points.push_back(
            BaselinePoint{b, result.best_so_far[static_cast<std::size_t>(b) - 1]});
    return result;
}

GlobalSurrogateResult run_global_surrogate(int n_train, const GaConfig& ga,
                                           const SimulationEvaluator& sim,
                                           std::uint64_t seed,
                                           const TrainingSet* pool_in,
                                           unsigned workers) {
    validate(ga);
    if (n_train < ga.population_size)
        throw ValidationError("global surrogate needs n_train >= population_size");

    TrainingSet pool;
    if (pool_in) {
        if (pool_in->size() < static_cast<std::size_t>(n_train))
            throw ValidationError("provided pool smaller than n_train");
        pool.rows.assign(pool_in->rows.begin(),
                         pool_in->rows.begin() + n_train);
    } else {
        pool = build_training_pool(n_train, sim, ga.bounds, seed, workers);
    }

    GlobalSurrogateResult result;

    const auto grid = default_grid(ga.surrogate.base(ga.surrogate.cv_epochs));
    const GridSearchResult gs =
        grid_search(pool, grid, ga.surrogate.cv_folds,
                    derive_seed(seed, "grid-search", 0), workers);
    Hyperparams hp = gs.best;
    hp.epochs = ga.surrogate.epochs;
    result.chosen_hyperparams = hp;
    const SurrogateModel model = train(pool, hp, derive_seed(seed, "train", 0));

    Rng ga_rng(derive_seed(seed, "ga-ops"));
    std::vector<SolutionVector> population =
        initialize_population(pool, static_cast<std::size_t>(ga.population_size));

    // The approximation completely replaces simulation: no evaluations and
    // no retraining inside the loop.
    for (int gen = 1; gen <= ga.max_generations; ++gen) {
        const std::vector<FitnessValue> values = predict_many(model, population);
        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return values[a] < values[b];
        });
        std::vector<SolutionVector> elites;
        for (std::size_t i = 0;
             i < order.size() && elites.size() < static_cast<std::size_t>(ga.n_elites);
             ++i)
            elites.push_back(population[order[i]]);
        const std::size_t n_offspring =
            static_cast<std::size_t>(ga.population_size) - elites.size();
        const auto pairs = select_parents(values, n_offspring, ga_rng);
        std::vector<SolutionVector> offspring;
        offspring.reserve(n_offspring);
        for (const auto& [p1, p2] : pairs) {
            auto [c1, c2] =
                crossover(population[p1], population[p2], ga.crossover_prob, ga_rng);
            offspring.push_back(mutate(c1, ga.mutation_prob, ga.bounds, ga_rng));
            if (offspring.size() < n_offspring)
                offspring.push_back(mutate(c2, ga.mutation_prob, ga.bounds, ga_rng));
        }
        population = elites;
        population.insert(population.end(), offspring.begin(), offspring.end());
    }

    // Final step: simulate the distinct members of the last population.
    std::vector<SolutionVector> finals;
    std::set<std::array<double, kNumGenes>> seen;
    for (const auto& x : population)
        if (seen.insert(x.flatten()).second) finals.push_back(x);

    const std::uint64_t sim_seed = common_sim_seed(seed);
    std::vector<FitnessValue> true_fitness(finals.size());
    parallel_for(finals.size(), workers,
                 [&](std::size_t i) { true_fitness[i] = sim(finals[i], sim_seed); });

    const std::vector<FitnessValue> predicted = predict_many(model, finals);
    std::size_t best = 0;
    for (std::size_t i = 1; i < finals.size(); ++i)
        if (true_fitness[i] < true_fitness[best]) best = i;
    result.best = finals[best];
    result.best_fitness = true_fitness[best];
    result.best_predicted = predicted[best];
    result.final_evaluations = static_cast<int>(finals.size());
    result.during_run_simulations = 0;
    return result;
}

std::string SensitivityResult::to_csv() const {
    CsvTable table;
    table.header = {"gene", "gene_name", "delta_units", "fitness"};
    const auto names = feature_column_names();
    for (const auto& c : candidates)
        table.rows.push_back({format_int(c.gene),
                              names[static_cast<std::size_t>(c.gene)],
                              format_int(c.delta_units), format_double(c.fitness)});
    return table.to_string();
}

SensitivityResult sensitivity(const SolutionVector& x, const SimulationEvaluator& sim,
                              const Bounds& bounds, std::uint64_t seed,
                              double multiplier_unit, unsigned workers) {
    validate(x, bounds);
    const std::uint64_t sim_seed = common_sim_seed(seed);

    SensitivityResult result;
    std::set<std::array<double, kNumGenes>> seen;
    seen.insert(x.flatten()); // perturbations equal to the base are duplicates

    const int deltas[] = {-2, -1, 1, 2};
    const auto base_genes = x.flatten();
    for (int g = 0; g < kNumGenes; ++g) {
        const bool is_multiplier =
            g >= kNumTypes * kNumSites && g < 2 * kNumTypes * kNumSites;
        const double unit = is_multiplier ? multiplier_unit : 1.0;
        for (int d : deltas) {
            auto genes = base_genes;
            genes[g] += d * unit;
            const SolutionVector candidate = SolutionVector::from_flat(genes);
            if (!within_bounds(candidate, bounds)) continue;
            if (!seen.insert(candidate.flatten()).second) continue;
            SensitivityCandidate c;
            c.gene = g;
            c.delta_units = d;
            c.x = candidate;
            result.candidates.push_back(std::move(c));
        }
    }

    result.base_fitness = sim(x, sim_seed);
    parallel_for(result.candidates.size(), workers, [&](std::size_t i) {
        result.candidates[i].fitness = sim(result.candidates[i].x, sim_seed);
    });

    if (!result.candidates.empty()) {
        double sum = 0.0;
        result.min_fitness = result.candidates[0].fitness;
        result.max_fitness = result.candidates[0].fitness;
        for (const auto& c : result.candidates) {
            sum += c.fitness;
            result.min_fitness = std::min(result.min_fitness, c.fitness);
            result.max_fitness = std::max(result.max_fitness, c.fitness);
        }
        result.mean_fitness = sum / static_cast<double>(result.candidates.size());
        if (result.candidates.size() > 1) {
            double ss = 0.0;
            for (const auto& c : result.candidates) {
                const double d = c.fitness - result.mean_fitness;
                ss += d * d;
            }
            result.std_fitness =
                std::sqrt(ss / static_cast<double>(result.candidates.size() - 1));
        }
        result.found_better = result.min_fitness < result.base_fitness;
    }
    return result;
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
    CsvTable table;
    table.header = {"size", "r2", "mae", "alpha", "hidden_layers"};
    for (const auto& p : curve) {
        // Layer widths joined with '-' so the field stays comma-free.
        std::string layers;
        for (std::size_t i = 0; i < p.chosen.hidden_layers.size(); ++i)
            layers += (i ? "-" : "") + std::to_string(p.chosen.hidden_layers[i]);
        table.rows.push_back({format_int(static_cast<std::int64_t>(p.size)),
                              format_double(p.r2), format_double(p.mae),
                              format_double(p.chosen.alpha), layers});
    }
    return table.to_string();
}

} // namespace fleetopt
