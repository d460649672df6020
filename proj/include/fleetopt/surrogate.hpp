#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fleetopt/solution.hpp"
#include "fleetopt/training_set.hpp"

namespace fleetopt {

struct Hyperparams {
    double alpha = 1e-4;                   // L2 strength on weights
    std::vector<int> hidden_layers{25};    // widths, input->output order
    double learning_rate = 1e-3;
    int epochs = 300;
    int batch_size = 32;
};

void validate(const Hyperparams& h);

std::string layers_to_string(const std::vector<int>& layers);

/// The Table-III style default grid: 5 regularisation strengths crossed with
/// 6 hidden-layer layouts (30 candidates). Training-regime fields are taken
/// from `base`.
std::vector<Hyperparams> default_grid(const Hyperparams& base);

/// Per-feature affine map to zero mean / unit variance (population std).
/// Constant features keep scale 1 so they map to exactly 0.
struct Normalizer {
    Eigen::RowVectorXd shift;
    Eigen::RowVectorXd scale;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const;
};

Normalizer fit_normalizer(const Eigen::MatrixXd& features);
Normalizer fit_normalizer(const TrainingSet& ts);

struct NetLayer {
    Eigen::MatrixXd weights; // fan_in x fan_out
    Eigen::RowVectorXd bias;
};

/// Plain fully connected net: ReLU on hidden layers, linear scalar output.
struct Network {
    std::vector<NetLayer> layers;

    Eigen::VectorXd forward(const Eigen::MatrixXd& inputs) const;
    std::size_t parameter_count() const;
};

Network make_network(int inputs, const std::vector<int>& hidden, std::uint64_t seed);

/// Loss of the net on (inputs, targets): mean squared error plus
/// alpha * sum of squared weights (biases unregularised). When `grad` is
/// non-null the analytic gradient is written to it, layer for layer.
double loss_with_gradient(const Network& net, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& targets, double alpha,
                          std::vector<NetLayer>* grad);

struct FitMetrics {
    double train_r2 = 0.0;
    double train_mae = 0.0;
    double validation_r2 = std::numeric_limits<double>::quiet_NaN();
    double validation_mae = std::numeric_limits<double>::quiet_NaN();
    double initial_mse = 0.0; // normalized-space, before training
    double final_mse = 0.0;   // normalized-space, after training

    bool has_validation() const { return !std::isnan(validation_r2); }
};

/// Trained approximation of the fitness function. Inputs and targets are
/// z-scored internally; predictions are returned in fitness units.
struct SurrogateModel {
    Network net;
    Normalizer input_norm;
    double target_shift = 0.0;
    double target_scale = 1.0;
    Hyperparams hyperparams;
    FitMetrics metrics;

    std::string to_json() const;
    static SurrogateModel from_json(const std::string& text);
};

/// Trains with mini-batch Adam; deterministic for a fixed seed. Throws
/// TrainingError when the loss diverges, reporting the epoch. When a holdout
/// is given its metrics are recorded in the model.
SurrogateModel train(const TrainingSet& ts, const Hyperparams& h, std::uint64_t seed,
                     const TrainingSet* holdout = nullptr);

FitnessValue predict(const SurrogateModel& m, const SolutionVector& x);
std::vector<FitnessValue> predict_many(const SurrogateModel& m,
                                       const std::vector<SolutionVector>& xs);

struct EvalMetrics {
    double r2 = 0.0;
    double mae = 0.0;
};

EvalMetrics evaluate(const SurrogateModel& m, const TrainingSet& holdout);

struct GridSearchResult {
    Hyperparams best;
    std::size_t best_index = 0;
    std::vector<double> mean_mse; // per grid candidate, original units
};

/// Shuffled disjoint folds whose union is exactly {0..n-1}; sizes differ by
/// at most one. The same (n, k, seed) always yields the same folds.
std::vector<std::vector<std::size_t>> cv_fold_indices(std::size_t n, int k,
                                                      std::uint64_t seed);

/// k-fold cross validation over the grid. Folds are a disjoint exact
/// partition of ts; every candidate sees the same folds. Ties are broken by
/// smaller parameter count, then grid order.
GridSearchResult grid_search(const TrainingSet& ts, const std::vector<Hyperparams>& grid,
                             int k, std::uint64_t seed, unsigned workers = 1);

struct CurvePoint {
    std::size_t size = 0;
    double r2 = 0.0;
    double mae = 0.0;
    Hyperparams chosen;
};

struct LearningCurveConfig {
    int cv_folds = 10;
    double holdout_fraction = 0.2;
    int final_epochs = 300; // winner is retrained at this epoch count
    unsigned workers = 1;
};

/// For each size: take the first `size` pool rows, split 80/20 with a
/// size-indexed seed, grid-search on the 80%, train the winner on the full
/// 80% and report holdout metrics.
std::vector<CurvePoint> learning_curve(const TrainingSet& pool,
                                       const std::vector<std::size_t>& sizes,
                                       const std::vector<Hyperparams>& grid,
                                       std::uint64_t seed,
                                       const LearningCurveConfig& cfg);

} // namespace fleetopt
