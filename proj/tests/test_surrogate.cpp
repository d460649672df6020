#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fleetopt/errors.hpp"
#include "fleetopt/rng.hpp"
#include "fleetopt/surrogate.hpp"

using namespace fleetopt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::array<double, kNumGenes> random_features(Rng& rng) {
    std::array<double, kNumGenes> f{};
    for (int g = 0; g < 6; ++g) f[g] = static_cast<double>(rng.uniform_int(0, 80));
    for (int g = 6; g < 12; ++g) f[g] = rng.uniform(0.5, 2.0);
    for (int g = 12; g < 15; ++g) f[g] = static_cast<double>(rng.uniform_int(0, 50));
    return f;
}

std::array<double, kNumGenes> linear_point(Rng& rng) {
    // Only the first two genes vary; the rest sit at fixed values so the
    // target truly is a function of (x1, x2).
    std::array<double, kNumGenes> f{};
    f[0] = static_cast<double>(rng.uniform_int(0, 80));
    f[1] = static_cast<double>(rng.uniform_int(0, 80));
    for (int g = 2; g < 6; ++g) f[g] = 30.0;
    for (int g = 6; g < 12; ++g) f[g] = 1.0;
    for (int g = 12; g < 15; ++g) f[g] = 20.0;
    return f;
}

TrainingSet linear_target_set(std::size_t n, std::uint64_t seed) {
    // y = 3*x1 - 2*x2 on the first two genes.
    TrainingSet ts;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        TrainingRow row;
        row.features = linear_point(rng);
        row.fitness = 3.0 * row.features[0] - 2.0 * row.features[1];
        ts.rows.push_back(row);
    }
    return ts;
}

TrainingSet constant_target_set(std::size_t n, double value, std::uint64_t seed) {
    TrainingSet ts;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        TrainingRow row;
        row.features = random_features(rng);
        row.fitness = value;
        ts.rows.push_back(row);
    }
    return ts;
}

/// Model that ignores inputs and predicts `value`: zero weights, the value
/// in the output bias, identity target scaling.
SurrogateModel constant_model(double value) {
    SurrogateModel m;
    m.net.layers.resize(2);
    m.net.layers[0].weights = MatrixXd::Zero(kNumGenes, 4);
    m.net.layers[0].bias = Eigen::RowVectorXd::Zero(4);
    m.net.layers[1].weights = MatrixXd::Zero(4, 1);
    m.net.layers[1].bias = Eigen::RowVectorXd::Constant(1, value);
    m.input_norm.shift = Eigen::RowVectorXd::Zero(kNumGenes);
    m.input_norm.scale = Eigen::RowVectorXd::Ones(kNumGenes);
    m.target_shift = 0.0;
    m.target_scale = 1.0;
    return m;
}

} // namespace

TEST_CASE("normalizer: single row maps every feature to zero") {
    TrainingSet ts = constant_target_set(1, 5.0, 3);
    const Normalizer n = fit_normalizer(ts);
    MatrixXd row(1, kNumGenes);
    for (int g = 0; g < kNumGenes; ++g) row(0, g) = ts.rows[0].features[g];
    const MatrixXd z = n.apply(row);
    for (int g = 0; g < kNumGenes; ++g) CHECK(z(0, g) == 0.0);
}

TEST_CASE("normalizer: two-point feature maps to plus and minus one") {
    MatrixXd f(2, kNumGenes);
    f.setZero();
    f(0, 0) = 0.0;
    f(1, 0) = 10.0;
    const Normalizer n = fit_normalizer(f);
    const MatrixXd z = n.apply(f);
    CHECK(z(0, 0) == doctest::Approx(-1.0));
    CHECK(z(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("normalizer: training features have zero column means afterwards") {
    Rng rng(8);
    MatrixXd f(40, kNumGenes);
    for (int r = 0; r < 40; ++r) {
        const auto feats = random_features(rng);
        for (int g = 0; g < kNumGenes; ++g) f(r, g) = feats[g];
    }
    const Normalizer n = fit_normalizer(f);
    const MatrixXd z = n.apply(f);
    for (int g = 0; g < kNumGenes; ++g)
        CHECK(std::abs(z.col(g).mean()) < 1e-9);
    // Re-fitting on normalized features is the identity map.
    const Normalizer n2 = fit_normalizer(z);
    for (int g = 0; g < kNumGenes; ++g) {
        CHECK(std::abs(n2.shift(g)) < 1e-9);
        CHECK(n2.scale(g) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("training a constant target recovers the constant") {
    const TrainingSet ts = constant_target_set(80, 42.0, 11);
    Hyperparams h;
    h.hidden_layers = {15};
    h.epochs = 200;
    h.batch_size = 16;
    const SurrogateModel m = train(ts, h, 5);
    CHECK(m.metrics.final_mse <= m.metrics.initial_mse);
    for (int i = 0; i < 10; ++i) {
        const SolutionVector x = SolutionVector::from_flat(ts.rows[i * 7].features);
        CHECK(predict(m, x) == doctest::Approx(42.0).epsilon(0.01));
    }
}

TEST_CASE("training fits a linear target to high R2") {
    TrainingSet ts = linear_target_set(500, 21);
    const TrainingSet holdout = linear_target_set(150, 22);
    Hyperparams h;
    h.hidden_layers = {25};
    h.alpha = 1e-6;
    h.epochs = 600;
    const SurrogateModel m = train(ts, h, 7, &holdout);
    CHECK(m.metrics.validation_r2 >= 0.99);

    // Spot prediction accuracy against the generating function; 5% is
    // measured against the target's own scale where the truth is near zero.
    double y_scale = 0.0;
    for (const auto& r : ts.rows) y_scale += std::abs(r.fitness);
    y_scale /= static_cast<double>(ts.size());
    Rng rng(23);
    for (int i = 0; i < 20; ++i) {
        const auto feats = linear_point(rng);
        const double truth = 3.0 * feats[0] - 2.0 * feats[1];
        const double approx = predict(m, SolutionVector::from_flat(feats));
        CHECK(std::abs(approx - truth) <=
              0.05 * std::max(y_scale, std::abs(truth)));
    }
}

TEST_CASE("huge regularisation collapses predictions toward the mean") {
    TrainingSet ts = linear_target_set(200, 31);
    double mean = 0.0;
    for (const auto& r : ts.rows) mean += r.fitness;
    mean /= static_cast<double>(ts.size());

    Hyperparams h;
    h.hidden_layers = {15};
    h.alpha = 1e6;
    h.epochs = 150;
    const SurrogateModel m = train(ts, h, 3);
    // Adam oscillates in a small band around zero instead of settling
    // exactly; the norm just has to collapse relative to a normal fit.
    double weight_norm = 0.0;
    for (const auto& l : m.net.layers) weight_norm += l.weights.squaredNorm();
    CHECK(weight_norm < 0.5);
    Rng rng(5);
    const double spread = std::abs(3.0 * 80 + 2.0 * 80); // target range scale
    for (int i = 0; i < 10; ++i) {
        const SolutionVector x = SolutionVector::from_flat(random_features(rng));
        CHECK(std::abs(predict(m, x) - mean) < 0.1 * spread);
    }
}

TEST_CASE("predict is deterministic and dimension-checked") {
    const TrainingSet ts = linear_target_set(100, 41);
    Hyperparams h;
    h.hidden_layers = {15};
    h.epochs = 50;
    const SurrogateModel m = train(ts, h, 9);
    Rng rng(2);
    const SolutionVector x = SolutionVector::from_flat(random_features(rng));
    CHECK(predict(m, x) == predict(m, x));

    SurrogateModel broken = m;
    broken.net.layers[0].weights = MatrixXd::Zero(4, 4);
    CHECK_THROWS_AS(predict(broken, x), ValidationError);
}

TEST_CASE("zero-weight model predicts its output bias") {
    const SurrogateModel m = constant_model(3.25);
    Rng rng(4);
    for (int i = 0; i < 5; ++i)
        CHECK(predict(m, SolutionVector::from_flat(random_features(rng))) == 3.25);
}

namespace {

/// Relative gap between the analytic gradient and a full central-difference
/// gradient, compared vector-to-vector (per-component ratios are meaningless
/// where the gradient crosses zero).
double gradient_check_error(Network& net, const MatrixXd& inputs,
                            const VectorXd& targets, double alpha) {
    std::vector<NetLayer> grad;
    loss_with_gradient(net, inputs, targets, alpha, &grad);

    double diff_sq = 0.0, norm_sq = 0.0;
    const double h = 1e-5;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        auto accumulate = [&](double& param, double analytic) {
            const double saved = param;
            param = saved + h;
            const double up = loss_with_gradient(net, inputs, targets, alpha, nullptr);
            param = saved - h;
            const double down = loss_with_gradient(net, inputs, targets, alpha,
                                                   nullptr);
            param = saved;
            const double numeric = (up - down) / (2.0 * h);
            diff_sq += (analytic - numeric) * (analytic - numeric);
            norm_sq += std::max(analytic * analytic, numeric * numeric);
        };
        NetLayer& layer = net.layers[li];
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
                accumulate(layer.weights(r, c), grad[li].weights(r, c));
        for (Eigen::Index c = 0; c < layer.bias.size(); ++c)
            accumulate(layer.bias(c), grad[li].bias(c));
    }
    return std::sqrt(diff_sq) / std::max(1e-12, std::sqrt(norm_sq));
}

} // namespace

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(2024);
    const int n_networks = 20;
    double worst = 0.0;
    for (int trial = 0; trial < n_networks; ++trial) {
        const int n_layers = static_cast<int>(rng.uniform_int(1, 3));
        std::vector<int> hidden;
        for (int i = 0; i < n_layers; ++i)
            hidden.push_back(static_cast<int>(rng.uniform_int(2, 50)));
        const int n_inputs = static_cast<int>(rng.uniform_int(2, 10));
        Network net = make_network(n_inputs, hidden, rng.next_u64());

        const int batch = 8;
        MatrixXd inputs(batch, n_inputs);
        VectorXd targets(batch);
        for (int r = 0; r < batch; ++r) {
            for (int c = 0; c < n_inputs; ++c) inputs(r, c) = rng.normal();
            targets(r) = rng.normal();
        }
        const double alpha = rng.uniform(0.0, 0.01);
        worst = std::max(worst, gradient_check_error(net, inputs, targets, alpha));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("divergent training reports the epoch") {
    TrainingSet ts = linear_target_set(80, 55);
    Hyperparams h;
    h.hidden_layers = {10};
    h.epochs = 50;
    h.learning_rate = 1e150; // guaranteed blow-up
    try {
        train(ts, h, 1);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(e.epoch() >= 0);
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}

TEST_CASE("default grid crosses five alphas with six layouts") {
    const auto grid = default_grid(Hyperparams{});
    CHECK(grid.size() == 30);
    std::set<double> alphas;
    std::set<std::vector<int>> layouts;
    for (const auto& h : grid) {
        alphas.insert(h.alpha);
        layouts.insert(h.hidden_layers);
    }
    CHECK(alphas.size() == 5);
    CHECK(layouts.size() == 6);
    CHECK(alphas.count(0.05) == 1);
    CHECK(alphas.count(0.00001) == 1);
    CHECK(layouts.count({50, 25, 15}) == 1);
}

TEST_CASE("single-member grid is returned without search") {
    TrainingSet ts = linear_target_set(10, 61); // too small to train; must not matter
    Hyperparams h;
    h.hidden_layers = {7};
    const GridSearchResult gs = grid_search(ts, {h}, 10, 1);
    CHECK(gs.best.hidden_layers == std::vector<int>{7});
    CHECK(gs.best_index == 0);
}

TEST_CASE("cv folds are a disjoint exact partition") {
    for (std::size_t n : {20u, 53u}) {
        const auto folds = cv_fold_indices(n, 5, 99);
        CHECK(folds.size() == 5);
        std::set<std::size_t> all;
        for (const auto& fold : folds) {
            CHECK(fold.size() >= n / 5);
            CHECK(fold.size() <= n / 5 + 1);
            for (std::size_t idx : fold) {
                CHECK(all.insert(idx).second); // disjoint
                CHECK(idx < n);
            }
        }
        CHECK(all.size() == n); // union is everything
    }
}

TEST_CASE("grid search picks a member of the grid and prefers the better one") {
    const TrainingSet ts = linear_target_set(160, 71);
    Hyperparams small;
    small.hidden_layers = {15};
    small.alpha = 1e-5;
    small.epochs = 120;
    small.batch_size = 16;
    Hyperparams crippled = small;
    crippled.alpha = 1e6; // regularised into uselessness
    const GridSearchResult gs = grid_search(ts, {crippled, small}, 4, 13);
    CHECK(gs.best_index == 1);
    CHECK(gs.mean_mse.size() == 2);
    CHECK(gs.mean_mse[1] < gs.mean_mse[0]);
}

TEST_CASE("evaluate metrics follow their definitions") {
    TrainingSet holdout;
    Rng rng(81);
    for (int i = 0; i < 12; ++i) {
        TrainingRow row;
        row.features = random_features(rng);
        row.fitness = 5.0;
        holdout.rows.push_back(row);
    }
    // Perfect predictions on a constant target.
    CHECK(evaluate(constant_model(5.0), holdout).r2 == 1.0);
    CHECK(evaluate(constant_model(5.0), holdout).mae == 0.0);

    // Predicting the holdout mean gives R2 == 0.
    holdout.rows[0].fitness = 1.0;
    holdout.rows[1].fitness = 9.0;
    double mean = 0.0;
    for (const auto& r : holdout.rows) mean += r.fitness;
    mean /= static_cast<double>(holdout.size());
    const EvalMetrics at_mean = evaluate(constant_model(mean), holdout);
    CHECK(at_mean.r2 == doctest::Approx(0.0).epsilon(1e-12));

    // A constant offset from perfect predictions shows up as the MAE.
    TrainingSet flat;
    for (int i = 0; i < 6; ++i) {
        TrainingRow row;
        row.features = random_features(rng);
        row.fitness = 5.0;
        flat.rows.push_back(row);
    }
    const EvalMetrics offset = evaluate(constant_model(5.0 + 2.5), flat);
    CHECK(offset.mae == doctest::Approx(2.5));
}

TEST_CASE("learning curve emits one sane row per size") {
    const TrainingSet pool = linear_target_set(120, 91);
    Hyperparams base;
    base.epochs = 40;
    base.batch_size = 8;
    Hyperparams a = base, b = base;
    a.hidden_layers = {10};
    b.hidden_layers = {20};
    LearningCurveConfig cfg;
    cfg.cv_folds = 3;
    cfg.final_epochs = 80;
    const auto curve = learning_curve(pool, {50, 100}, {a, b}, 17, cfg);
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].size == 50);
    CHECK(curve[1].size == 100);
    for (const auto& p : curve) {
        CHECK(p.r2 <= 1.0);
        CHECK(p.mae >= 0.0);
    }
    CHECK_THROWS_AS(learning_curve(pool, {500}, {a, b}, 17, cfg), ValidationError);
}

TEST_CASE("model JSON round-trips predictions exactly") {
    const TrainingSet ts = linear_target_set(100, 101);
    Hyperparams h;
    h.hidden_layers = {12, 5};
    h.epochs = 60;
    const SurrogateModel m = train(ts, h, 19);
    const SurrogateModel back = SurrogateModel::from_json(m.to_json());
    Rng rng(6);
    for (int i = 0; i < 10; ++i) {
        const SolutionVector x = SolutionVector::from_flat(random_features(rng));
        CHECK(predict(m, x) == predict(back, x));
    }
    CHECK(back.hyperparams.hidden_layers == m.hyperparams.hidden_layers);
}

TEST_CASE("training set must cover at least two batches") {
    const TrainingSet ts = linear_target_set(20, 111);
    Hyperparams h;
    h.batch_size = 32;
    CHECK_THROWS_AS(train(ts, h, 1), ValidationError);
}
