#include "fleetopt/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fleetopt/errors.hpp"
#include "fleetopt/parallel.hpp"
#include "fleetopt/rng.hpp"

namespace fleetopt {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

void validate(const Hyperparams& h) {
    if (!(h.alpha >= 0.0)) throw ValidationError("hyperparams.alpha must be >= 0");
    if (h.hidden_layers.empty())
        throw ValidationError("hyperparams.hidden_layers must not be empty");
    for (int w : h.hidden_layers)
        if (w < 1) throw ValidationError("hyperparams.hidden_layers widths must be >= 1");
    if (!(h.learning_rate > 0.0))
        throw ValidationError("hyperparams.learning_rate must be > 0");
    if (h.epochs < 1) throw ValidationError("hyperparams.epochs must be >= 1");
    if (h.batch_size < 1) throw ValidationError("hyperparams.batch_size must be >= 1");
}

std::string layers_to_string(const std::vector<int>& layers) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < layers.size(); ++i)
        os << layers[i] << (i + 1 < layers.size() ? "," : "");
    os << ")";
    return os.str();
}

std::vector<Hyperparams> default_grid(const Hyperparams& base) {
    const double alphas[] = {0.05, 0.01, 0.005, 0.0001, 0.00001};
    const std::vector<std::vector<int>> layouts = {
        {15}, {25}, {50}, {50, 5}, {50, 25, 15}, {25, 15}};
    std::vector<Hyperparams> grid;
    grid.reserve(30);
    for (double a : alphas) {
        for (const auto& layout : layouts) {
            Hyperparams h = base;
            h.alpha = a;
            h.hidden_layers = layout;
            grid.push_back(std::move(h));
        }
    }
    return grid;
}

MatrixXd Normalizer::apply(const MatrixXd& raw) const {
    MatrixXd out = raw.rowwise() - shift;
    out.array().rowwise() /= scale.array();
    return out;
}

Normalizer fit_normalizer(const MatrixXd& features) {
    if (features.rows() == 0) throw ValidationError("normalizer needs a nonempty set");
    Normalizer n;
    n.shift = features.colwise().mean();
    MatrixXd centered = features.rowwise() - n.shift;
    n.scale = (centered.array().square().colwise().mean()).sqrt();
    for (Eigen::Index j = 0; j < n.scale.size(); ++j)
        if (n.scale(j) == 0.0) n.scale(j) = 1.0; // constant feature maps to 0
    return n;
}

namespace {

MatrixXd features_matrix(const TrainingSet& ts) {
    MatrixXd f(static_cast<Eigen::Index>(ts.size()), kNumGenes);
    for (std::size_t r = 0; r < ts.size(); ++r)
        for (int g = 0; g < kNumGenes; ++g)
            f(static_cast<Eigen::Index>(r), g) = ts.rows[r].features[g];
    return f;
}

VectorXd targets_vector(const TrainingSet& ts) {
    VectorXd y(static_cast<Eigen::Index>(ts.size()));
    for (std::size_t r = 0; r < ts.size(); ++r)
        y(static_cast<Eigen::Index>(r)) = ts.rows[r].fitness;
    return y;
}

} // namespace

Normalizer fit_normalizer(const TrainingSet& ts) {
    return fit_normalizer(features_matrix(ts));
}

VectorXd Network::forward(const MatrixXd& inputs) const {
    MatrixXd a = inputs;
    for (std::size_t i = 0; i + 1 < layers.size(); ++i)
        a = ((a * layers[i].weights).rowwise() + layers[i].bias).cwiseMax(0.0);
    return ((a * layers.back().weights).rowwise() + layers.back().bias).col(0);
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers)
        n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

Network make_network(int inputs, const std::vector<int>& hidden, std::uint64_t seed) {
    Network net;
    Rng rng(seed);
    int fan_in = inputs;
    auto add_layer = [&](int fan_out) {
        NetLayer layer;
        layer.weights.resize(fan_in, fan_out);
        const double limit = std::sqrt(6.0 / fan_in);
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
                layer.weights(r, c) = rng.uniform(-limit, limit);
        // Small positive bias keeps units alive and pre-activations off the
        // exact ReLU kink.
        layer.bias = RowVectorXd::Constant(fan_out, 0.01);
        fan_in = fan_out;
        return layer;
    };
    for (int width : hidden) net.layers.push_back(add_layer(width));
    net.layers.push_back(add_layer(1));
    return net;
}

double loss_with_gradient(const Network& net, const MatrixXd& inputs,
                          const VectorXd& targets, double alpha,
                          std::vector<NetLayer>* grad) {
    const auto n_layers = net.layers.size();
    const double n = static_cast<double>(inputs.rows());

    // Forward, keeping activations for the backward pass.
    std::vector<MatrixXd> acts;
    acts.reserve(n_layers + 1);
    acts.push_back(inputs);
    for (std::size_t i = 0; i < n_layers; ++i) {
        MatrixXd z = (acts.back() * net.layers[i].weights).rowwise() + net.layers[i].bias;
        if (i + 1 < n_layers) z = z.cwiseMax(0.0);
        acts.push_back(std::move(z));
    }
    const VectorXd residual = acts.back().col(0) - targets;
    double loss = residual.squaredNorm() / n;
    for (const auto& l : net.layers) loss += alpha * l.weights.squaredNorm();

    if (grad) {
        grad->resize(n_layers);
        MatrixXd delta = (2.0 / n) * residual;
        for (std::size_t i = n_layers; i-- > 0;) {
            (*grad)[i].weights = acts[i].transpose() * delta +
                                 2.0 * alpha * net.layers[i].weights;
            (*grad)[i].bias = delta.colwise().sum();
            if (i > 0) {
                MatrixXd back = delta * net.layers[i].weights.transpose();
                // ReLU mask: gradient flows only where the activation fired.
                delta = ((acts[i].array() > 0.0).cast<double>() * back.array()).matrix();
            }
        }
    }
    return loss;
}

namespace {

struct AdamState {
    std::vector<NetLayer> m, v;
    long step = 0;

    explicit AdamState(const Network& net) {
        m.resize(net.layers.size());
        v.resize(net.layers.size());
        for (std::size_t i = 0; i < net.layers.size(); ++i) {
            m[i].weights = MatrixXd::Zero(net.layers[i].weights.rows(),
                                          net.layers[i].weights.cols());
            m[i].bias = RowVectorXd::Zero(net.layers[i].bias.size());
            v[i] = m[i];
        }
    }

    void update(Network& net, const std::vector<NetLayer>& grad, double lr) {
        static constexpr double kBeta1 = 0.9;
        static constexpr double kBeta2 = 0.999;
        static constexpr double kEps = 1e-8;
        ++step;
        const double bias1 = 1.0 - std::pow(kBeta1, step);
        const double bias2 = 1.0 - std::pow(kBeta2, step);
        for (std::size_t i = 0; i < net.layers.size(); ++i) {
            auto apply = [&](auto& param, auto& mi, auto& vi, const auto& g) {
                mi = kBeta1 * mi + (1.0 - kBeta1) * g;
                vi = kBeta2 * vi + (1.0 - kBeta2) * g.array().square().matrix();
                param.array() -= lr * (mi.array() / bias1) /
                                 ((vi.array() / bias2).sqrt() + kEps);
            };
            apply(net.layers[i].weights, m[i].weights, v[i].weights, grad[i].weights);
            apply(net.layers[i].bias, m[i].bias, v[i].bias, grad[i].bias);
        }
    }
};

double mse(const VectorXd& pred, const VectorXd& truth) {
    return (pred - truth).squaredNorm() / static_cast<double>(truth.size());
}

EvalMetrics metrics_against(const VectorXd& pred, const VectorXd& truth) {
    EvalMetrics m;
    m.mae = (pred - truth).cwiseAbs().mean();
    const double mean = truth.mean();
    const double ss_tot = (truth.array() - mean).square().sum();
    const double ss_res = (truth - pred).squaredNorm();
    if (ss_tot == 0.0)
        m.r2 = ss_res <= 1e-24 ? 1.0 : 0.0;
    else
        m.r2 = 1.0 - ss_res / ss_tot;
    return m;
}

} // namespace

SurrogateModel train(const TrainingSet& ts, const Hyperparams& h, std::uint64_t seed,
                     const TrainingSet* holdout) {
    validate(h);
    if (ts.size() < 2 * static_cast<std::size_t>(h.batch_size))
        throw ValidationError("training set needs at least 2*batch_size rows, has " +
                              std::to_string(ts.size()));

    SurrogateModel model;
    model.hyperparams = h;

    const MatrixXd raw = features_matrix(ts);
    const VectorXd y = targets_vector(ts);
    model.input_norm = fit_normalizer(raw);
    model.target_shift = y.mean();
    const double y_var = (y.array() - model.target_shift).square().mean();
    model.target_scale = y_var > 0.0 ? std::sqrt(y_var) : 1.0;

    const MatrixXd inputs = model.input_norm.apply(raw);
    const VectorXd targets = (y.array() - model.target_shift) / model.target_scale;

    Rng rng(derive_seed(seed, "fnn-train"));
    model.net = make_network(static_cast<int>(inputs.cols()), h.hidden_layers,
                             rng.next_u64());
    model.metrics.initial_mse = mse(model.net.forward(inputs), targets);

    AdamState adam(model.net);
    std::vector<NetLayer> grad;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(inputs.rows()));
    std::iota(order.begin(), order.end(), 0);

    const Eigen::Index n = inputs.rows();
    const Eigen::Index batch = h.batch_size;
    MatrixXd bx(batch, inputs.cols());
    VectorXd by(batch);
    for (int epoch = 0; epoch < h.epochs; ++epoch) {
        rng.shuffle(order.begin(), order.end());
        double epoch_loss = 0.0;
        for (Eigen::Index start = 0; start < n; start += batch) {
            const Eigen::Index len = std::min(batch, n - start);
            for (Eigen::Index r = 0; r < len; ++r) {
                bx.row(r) = inputs.row(order[static_cast<std::size_t>(start + r)]);
                by(r) = targets(order[static_cast<std::size_t>(start + r)]);
            }
            const double loss = loss_with_gradient(model.net, bx.topRows(len),
                                                   by.head(len), h.alpha, &grad);
            adam.update(model.net, grad, h.learning_rate);
            epoch_loss += loss * static_cast<double>(len);
        }
        if (!std::isfinite(epoch_loss))
            throw TrainingError("surrogate training diverged at epoch " +
                                    std::to_string(epoch),
                                epoch);
    }

    const VectorXd final_pred_norm = model.net.forward(inputs);
    model.metrics.final_mse = mse(final_pred_norm, targets);

    const VectorXd pred = final_pred_norm.array() * model.target_scale +
                          model.target_shift;
    const EvalMetrics train_m = metrics_against(pred, y);
    model.metrics.train_r2 = train_m.r2;
    model.metrics.train_mae = train_m.mae;
    if (holdout && !holdout->empty()) {
        const EvalMetrics val = evaluate(model, *holdout);
        model.metrics.validation_r2 = val.r2;
        model.metrics.validation_mae = val.mae;
    }
    return model;
}

FitnessValue predict(const SurrogateModel& m, const SolutionVector& x) {
    if (m.net.layers.empty() || m.net.layers.front().weights.rows() != kNumGenes)
        throw ValidationError("surrogate model input dimension mismatch");
    const auto genes = x.flatten();
    MatrixXd row(1, kNumGenes);
    for (int g = 0; g < kNumGenes; ++g) row(0, g) = genes[g];
    const double norm_pred = m.net.forward(m.input_norm.apply(row))(0);
    return norm_pred * m.target_scale + m.target_shift;
}

std::vector<FitnessValue> predict_many(const SurrogateModel& m,
                                       const std::vector<SolutionVector>& xs) {
    if (m.net.layers.empty() || m.net.layers.front().weights.rows() != kNumGenes)
        throw ValidationError("surrogate model input dimension mismatch");
    MatrixXd rows(static_cast<Eigen::Index>(xs.size()), kNumGenes);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto genes = xs[i].flatten();
        for (int g = 0; g < kNumGenes; ++g)
            rows(static_cast<Eigen::Index>(i), g) = genes[g];
    }
    const VectorXd pred = m.net.forward(m.input_norm.apply(rows));
    std::vector<FitnessValue> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = pred(static_cast<Eigen::Index>(i)) * m.target_scale + m.target_shift;
    return out;
}

EvalMetrics evaluate(const SurrogateModel& m, const TrainingSet& holdout) {
    if (holdout.empty()) throw ValidationError("evaluate needs a nonempty holdout");
    const MatrixXd raw = features_matrix(holdout);
    const VectorXd y = targets_vector(holdout);
    const VectorXd pred = (m.net.forward(m.input_norm.apply(raw)).array() *
                           m.target_scale) + m.target_shift;
    return metrics_against(pred, y);
}

namespace {

TrainingSet gather_rows(const TrainingSet& ts, const std::vector<std::size_t>& idx) {
    TrainingSet out;
    out.rows.reserve(idx.size());
    for (std::size_t i : idx) out.rows.push_back(ts.rows[i]);
    return out;
}

} // namespace

std::vector<std::vector<std::size_t>> cv_fold_indices(std::size_t n, int k,
                                                      std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng fold_rng(derive_seed(seed, "cv-folds"));
    fold_rng.shuffle(order.begin(), order.end());
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i)
        folds[i % static_cast<std::size_t>(k)].push_back(order[i]);
    return folds;
}

GridSearchResult grid_search(const TrainingSet& ts, const std::vector<Hyperparams>& grid,
                             int k, std::uint64_t seed, unsigned workers) {
    if (grid.empty()) throw ValidationError("grid_search needs a nonempty grid");
    GridSearchResult result;
    if (grid.size() == 1) { // nothing to compare
        result.best = grid[0];
        result.mean_mse.assign(1, std::numeric_limits<double>::quiet_NaN());
        return result;
    }
    if (k < 2) throw ValidationError("grid_search needs k >= 2 folds");
    if (ts.size() < static_cast<std::size_t>(k))
        throw ValidationError("grid_search needs at least k rows");

    // One fold partition shared by every candidate.
    const auto folds = cv_fold_indices(ts.size(), k, seed);

    struct Task {
        std::size_t candidate;
        std::size_t fold;
    };
    std::vector<Task> tasks;
    tasks.reserve(grid.size() * static_cast<std::size_t>(k));
    for (std::size_t c = 0; c < grid.size(); ++c)
        for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f)
            tasks.push_back(Task{c, f});

    std::vector<double> fold_mse(tasks.size(), 0.0);
    parallel_for(tasks.size(), workers, [&](std::size_t t) {
        const auto [c, f] = tasks[t];
        std::vector<std::size_t> train_idx;
        train_idx.reserve(ts.size() - folds[f].size());
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f)
                train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        const TrainingSet fold_train = gather_rows(ts, train_idx);
        const TrainingSet fold_val = gather_rows(ts, folds[f]);
        const SurrogateModel m =
            train(fold_train, grid[c], derive_seed(seed, "cv-train", t));
        const VectorXd pred_v = [&] {
            const MatrixXd raw = features_matrix(fold_val);
            return VectorXd(((m.net.forward(m.input_norm.apply(raw)).array() *
                              m.target_scale) + m.target_shift).matrix());
        }();
        fold_mse[t] = mse(pred_v, targets_vector(fold_val));
    });

    result.mean_mse.assign(grid.size(), 0.0);
    for (std::size_t t = 0; t < tasks.size(); ++t)
        result.mean_mse[tasks[t].candidate] += fold_mse[t] / static_cast<double>(k);

    const auto param_count = [](const std::vector<int>& hidden) {
        std::size_t count = 0;
        int fan_in = kNumGenes;
        for (int width : hidden) {
            count += static_cast<std::size_t>((fan_in + 1) * width);
            fan_in = width;
        }
        return count + static_cast<std::size_t>(fan_in + 1);
    };
    std::size_t best = 0;
    for (std::size_t c = 1; c < grid.size(); ++c) {
        const double diff = result.mean_mse[c] - result.mean_mse[best];
        if (diff < 0.0) {
            best = c;
        } else if (diff == 0.0 &&
                   param_count(grid[c].hidden_layers) <
                       param_count(grid[best].hidden_layers)) {
            best = c;
        }
    }
    result.best = grid[best];
    result.best_index = best;
    return result;
}

std::vector<CurvePoint> learning_curve(const TrainingSet& pool,
                                       const std::vector<std::size_t>& sizes,
                                       const std::vector<Hyperparams>& grid,
                                       std::uint64_t seed,
                                       const LearningCurveConfig& cfg) {
    for (std::size_t s : sizes)
        if (s > pool.size())
            throw ValidationError("learning_curve size exceeds pool size");
    std::vector<CurvePoint> curve;
    curve.reserve(sizes.size());
    for (std::size_t s : sizes) {
        // Holdout split is re-drawn with a size-indexed seed.
        std::vector<std::size_t> idx(s);
        std::iota(idx.begin(), idx.end(), 0);
        Rng split_rng(derive_seed(seed, "curve-split", s));
        split_rng.shuffle(idx.begin(), idx.end());
        const std::size_t n_val = static_cast<std::size_t>(
            std::llround(cfg.holdout_fraction * static_cast<double>(s)));
        const TrainingSet holdout =
            gather_rows(pool, {idx.begin(), idx.begin() + static_cast<long>(n_val)});
        const TrainingSet fit_set =
            gather_rows(pool, {idx.begin() + static_cast<long>(n_val), idx.end()});

        const GridSearchResult gs = grid_search(fit_set, grid, cfg.cv_folds,
                                                derive_seed(seed, "curve-grid", s),
                                                cfg.workers);
        Hyperparams final_hp = gs.best;
        final_hp.epochs = cfg.final_epochs;
        const SurrogateModel m =
            train(fit_set, final_hp, derive_seed(seed, "curve-final", s), &holdout);
        CurvePoint p;
        p.size = s;
        p.r2 = m.metrics.validation_r2;
        p.mae = m.metrics.validation_mae;
        p.chosen = gs.best;
        curve.push_back(std::move(p));
    }
    return curve;
}

namespace {

nlohmann::json layer_to_json(const NetLayer& l) {
    nlohmann::json j;
    j["rows"] = l.weights.rows();
    j["cols"] = l.weights.cols();
    std::vector<double> w(static_cast<std::size_t>(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weights.cols(); ++c)
            w[static_cast<std::size_t>(r * l.weights.cols() + c)] = l.weights(r, c);
    j["weights"] = w;
    std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
    j["bias"] = b;
    return j;
}

NetLayer layer_from_json(const nlohmann::json& j) {
    NetLayer l;
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto w = j.at("weights").get<std::vector<double>>();
    const auto b = j.at("bias").get<std::vector<double>>();
    if (w.size() != static_cast<std::size_t>(rows * cols) ||
        b.size() != static_cast<std::size_t>(cols))
        throw ValidationError("surrogate JSON layer shape mismatch");
    l.weights.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            l.weights(r, c) = w[static_cast<std::size_t>(r * cols + c)];
    l.bias = Eigen::Map<const RowVectorXd>(b.data(), cols);
    return l;
}

} // namespace

std::string SurrogateModel::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["layers"] = nlohmann::json::array();
    for (const auto& l : net.layers) j["layers"].push_back(layer_to_json(l));
    j["normalizer"]["shift"] = std::vector<double>(
        input_norm.shift.data(), input_norm.shift.data() + input_norm.shift.size());
    j["normalizer"]["scale"] = std::vector<double>(
        input_norm.scale.data(), input_norm.scale.data() + input_norm.scale.size());
    j["target"]["shift"] = target_shift;
    j["target"]["scale"] = target_scale;
    j["hyperparams"]["alpha"] = hyperparams.alpha;
    j["hyperparams"]["hidden_layers"] = hyperparams.hidden_layers;
    j["hyperparams"]["learning_rate"] = hyperparams.learning_rate;
    j["hyperparams"]["epochs"] = hyperparams.epochs;
    j["hyperparams"]["batch_size"] = hyperparams.batch_size;
    j["metrics"]["train_r2"] = metrics.train_r2;
    j["metrics"]["train_mae"] = metrics.train_mae;
    if (metrics.has_validation()) {
        j["metrics"]["validation_r2"] = metrics.validation_r2;
        j["metrics"]["validation_mae"] = metrics.validation_mae;
    }
    j["metrics"]["initial_mse"] = metrics.initial_mse;
    j["metrics"]["final_mse"] = metrics.final_mse;
    return j.dump(2) + "\n";
}

SurrogateModel SurrogateModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("surrogate JSON parse error: ") + e.what());
    }
    if (j.value("format_version", 0) != 1)
        throw ValidationError("unsupported surrogate model format_version");
    SurrogateModel m;
    for (const auto& lj : j.at("layers")) m.net.layers.push_back(layer_from_json(lj));
    const auto shift = j.at("normalizer").at("shift").get<std::vector<double>>();
    const auto scale = j.at("normalizer").at("scale").get<std::vector<double>>();
    m.input_norm.shift = Eigen::Map<const RowVectorXd>(shift.data(),
                                                       static_cast<Eigen::Index>(shift.size()));
    m.input_norm.scale = Eigen::Map<const RowVectorXd>(scale.data(),
                                                       static_cast<Eigen::Index>(scale.size()));
    m.target_shift = j.at("target").at("shift").get<double>();
    m.target_scale = j.at("target").at("scale").get<double>();
    const auto& hj = j.at("hyperparams");
    m.hyperparams.alpha = hj.at("alpha").get<double>();
    m.hyperparams.hidden_layers = hj.at("hidden_layers").get<std::vector<int>>();
    m.hyperparams.learning_rate = hj.at("learning_rate").get<double>();
    m.hyperparams.epochs = hj.at("epochs").get<int>();
    m.hyperparams.batch_size = hj.at("batch_size").get<int>();
    const auto& mj = j.at("metrics");
    m.metrics.train_r2 = mj.at("train_r2").get<double>();
    m.metrics.train_mae = mj.at("train_mae").get<double>();
    if (mj.contains("validation_r2")) {
        m.metrics.validation_r2 = mj.at("validation_r2").get<double>();
        m.metrics.validation_mae = mj.at("validation_mae").get<double>();
    }
    m.metrics.initial_mse = mj.at("initial_mse").get<double>();
    m.metrics.final_mse = mj.at("final_mse").get<double>();
    return m;
}

} // namespace fleetopt
