#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fleetopt/ga.hpp"
#include "fleetopt/training_set.hpp"

namespace fleetopt {

/// One-parameter sweep specification. Within each seed repetition all value
/// arms start from one shared random pool.
struct StudySpec {
    std::string parameter; // population_size | threshold | ensure_prob | mutation_prob
    std::vector<double> values;
    GaConfig base;
    std::vector<std::uint64_t> seeds;
};

void validate(const StudySpec& spec);

/// Returns base with the named parameter set to `value` (integer parameters
/// are rounded).
GaConfig apply_parameter(const GaConfig& base, const std::string& parameter,
                         double value);

struct StudyArm {
    double value = 0.0;
    std::uint64_t seed = 0;
    FitnessValue best_fitness = 0.0;
    int evaluations = 0;
    int generations = 0;
    std::uint64_t pool_checksum = 0;
};

struct StudyAggregate {
    double value = 0.0;
    FitnessValue median_best = 0.0;
    FitnessValue min_best = 0.0;
    double median_evaluations = 0.0;
};

struct StudyResult {
    std::string parameter;
    std::vector<StudyArm> arms;

    std::vector<StudyAggregate> aggregates() const;
    std::string to_csv() const;
};

StudyResult run_parameter_study(const StudySpec& spec, const SimulationEvaluator& sim,
                                unsigned workers = 1);

struct BaselinePoint {
    int budget = 0;
    FitnessValue best_fitness = 0.0;
};

struct BaselineResult {
    std::uint64_t seed = 0;
    std::vector<BaselinePoint> points;      // one per requested budget
    std::vector<FitnessValue> best_so_far;  // trajectory over max(budgets) draws

    std::string to_csv() const;
};

/// Uniform random search: one shared sample stream, so larger budgets extend
/// smaller ones.
BaselineResult run_random_baseline(const std::vector<int>& budgets,
                                   const SimulationEvaluator& sim, const Bounds& bounds,
                                   std::uint64_t seed, unsigned workers = 1);

struct GlobalSurrogateResult {
    SolutionVector best;
    FitnessValue best_fitness = 0.0;  // true simulated fitness
    FitnessValue best_predicted = 0.0;
    int during_run_simulations = 0;   // zero by construction
    int final_evaluations = 0;        // distinct final-population members simulated
    Hyperparams chosen_hyperparams;
};

/// Single global approximation model: the surrogate is trained once on
/// n_train random simulations and then completely replaces simulation inside
/// the GA; only the distinct members of the final population are simulated
/// at the end to report a true best.
GlobalSurrogateResult run_global_surrogate(int n_train, const GaConfig& ga,
                                           const SimulationEvaluator& sim,
                                           std::uint64_t seed,
                                           const TrainingSet* pool = nullptr,
                                           unsigned workers = 1);

struct SensitivityCandidate {
    int gene = 0;
    int delta_units = 0;
    SolutionVector x;
    FitnessValue fitness = 0.0;
};

struct SensitivityResult {
    FitnessValue base_fitness = 0.0;
    std::vector<SensitivityCandidate> candidates;
    FitnessValue min_fitness = 0.0;
    FitnessValue max_fitness = 0.0;
    double mean_fitness = 0.0;
    double std_fitness = 0.0; // sample standard deviation
    bool found_better = false;

    std::string to_csv() const;
};

/// Perturbs every gene by -2,-1,+1,+2 units (multiplier genes use
/// `multiplier_unit` per unit), skips bound-violating candidates, removes
/// duplicates and evaluates the rest under one common seed.
SensitivityResult sensitivity(const SolutionVector& x, const SimulationEvaluator& sim,
                              const Bounds& bounds, std::uint64_t seed,
                              double multiplier_unit = 0.01, unsigned workers = 1);

std::string curve_to_csv(const std::vector<CurvePoint>& curve);

} // namespace fleetopt
