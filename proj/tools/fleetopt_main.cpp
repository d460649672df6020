// Command-line front end: configuration ingestion, pipeline orchestration,
// artifact persistence. Exit codes: 0 success, 2 validation error, 3 runtime
// failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fleetopt/config.hpp"
#include "fleetopt/cost_model.hpp"
#include "fleetopt/csv.hpp"
#include "fleetopt/errors.hpp"
#include "fleetopt/fleet_sim.hpp"
#include "fleetopt/ga.hpp"
#include "fleetopt/harness.hpp"
#include "fleetopt/rng.hpp"
#include "fleetopt/surrogate.hpp"
#include "fleetopt/svg.hpp"
#include "fleetopt/training_set.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fleetopt;

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir;
    unsigned workers = 1;

    // Config overrides layered on top of the file (file < flags).
    std::optional<int> population_size;
    std::optional<double> threshold;
    std::optional<double> ensure_prob;
    std::optional<double> mutation_prob;
    std::optional<int> max_simulations;
    std::optional<int> max_generations;
    std::optional<int> initial_random_sims;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--seed", args.seed, "master seed");
    auto* out = cmd->add_option("--out", args.out_dir, "output directory");
    if (needs_out) out->required();
    cmd->add_option("--workers", args.workers,
                    "concurrent evaluations (results are identical for any value)");
    cmd->add_option("--pop-size", args.population_size, "override ga.population_size");
    cmd->add_option("--threshold", args.threshold, "override ga.threshold");
    cmd->add_option("--ensure-prob", args.ensure_prob, "override ga.ensure_prob");
    cmd->add_option("--mutation-prob", args.mutation_prob, "override ga.mutation_prob");
    cmd->add_option("--max-sims", args.max_simulations, "override ga.max_simulations");
    cmd->add_option("--max-gens", args.max_generations, "override ga.max_generations");
    cmd->add_option("--initial-sims", args.initial_random_sims,
                    "override ga.initial_random_sims");
}

AppConfig resolve_config(const CommonArgs& args) {
    AppConfig cfg = load_app_config(args.config_path);
    if (args.population_size) cfg.ga.population_size = *args.population_size;
    if (args.threshold) cfg.ga.threshold = *args.threshold;
    if (args.ensure_prob) cfg.ga.ensure_prob = *args.ensure_prob;
    if (args.mutation_prob) cfg.ga.mutation_prob = *args.mutation_prob;
    if (args.max_simulations) cfg.ga.max_simulations = *args.max_simulations;
    if (args.max_generations) cfg.ga.max_generations = *args.max_generations;
    if (args.initial_random_sims) cfg.ga.initial_random_sims = *args.initial_random_sims;
    validate(cfg);
    return cfg;
}

/// Opens the manifest as incomplete, runs the body, then marks it complete.
/// A throwing body leaves the incomplete manifest behind.
template <typename Body>
void with_manifest(const std::string& command, const CommonArgs& args,
                   const AppConfig& cfg, Body&& body) {
    fs::create_directories(args.out_dir);
    RunManifest manifest;
    manifest.command = command;
    manifest.config_path = args.config_path;
    manifest.config_snapshot = to_json(cfg);
    manifest.seed = args.seed;
    manifest.workers = args.workers;
    manifest.out_dir = args.out_dir;
    manifest.started_at = iso8601_now();
    write_manifest(manifest);
    body();
    manifest.finished_at = iso8601_now();
    manifest.status = "complete";
    write_manifest(manifest);
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    return (fs::path(args.out_dir) / name).string();
}

json outcome_to_json(const SimulationOutcome& o) {
    json j;
    for (int i = 0; i < kNumTypes; ++i) {
        const char* type = vehicle_type_name(i);
        j["ext_shipments"][type] = o.ext_shipments[i];
        j["missed_calls"][type] = o.missed_calls[i];
        j["full_park_events"][type] = o.full_park_events[i];
        j["orders_served"][type] = o.orders_served[i];
        j["orders_generated"][type] = o.orders_generated[i];
        j["waiting_at_horizon"][type] = o.waiting_at_horizon[i];
    }
    j["defects"] = o.defects;
    return j;
}

std::string history_to_csv(const std::vector<GenerationStats>& history) {
    CsvTable table;
    table.header = {"generation",  "simulations", "threshold_admits",
                    "ensure_fires", "rejections",  "cache_hits",
                    "budget_skips", "best_prediction", "f_star"};
    for (const auto& g : history)
        table.rows.push_back({format_int(g.generation), format_int(g.simulations),
                              format_int(g.threshold_admits),
                              format_int(g.ensure_fires), format_int(g.rejections),
                              format_int(g.cache_hits), format_int(g.budget_skips),
                              format_double(g.best_prediction),
                              format_double(g.f_star)});
    return table.to_string();
}

json so_summary_json(const SoResult& result, const AppConfig& cfg,
                     std::uint64_t seed) {
    json j;
    j["seed"] = seed;
    j["best"] = solution_to_json(result.best);
    j["best_fitness"] = result.best_fitness;
    j["sims_used"] = result.sims_used;
    j["generations_run"] = result.generations_run;
    j["archive_size"] = result.archive.size();
    j["chosen_hyperparams"] = {
        {"alpha", result.chosen_hyperparams.alpha},
        {"hidden_layers", result.chosen_hyperparams.hidden_layers}};
    j["config"] = to_json(cfg);
    return j;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string field = text.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!field.empty()) {
            try {
                values.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw ValidationError(std::string("bad ") + what + " value: '" +
                                      field + "'");
            }
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (values.empty())
        throw ValidationError(std::string(what) + " list must not be empty");
    return values;
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, int count) {
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
    return seeds;
}

int cmd_simulate(const CommonArgs& args, const std::string& x_inline,
                 const std::string& x_file) {
    const AppConfig cfg = resolve_config(args);
    const SolutionVector x = parse_solution_arg(x_inline, x_file);
    const SimulationOutcome outcome = simulate(x, cfg.sim, args.seed);
    json j;
    j["solution"] = solution_to_json(x);
    j["seed"] = args.seed;
    j["outcome"] = outcome_to_json(outcome);
    j["penalty"] = penalty_cost(outcome.missed_calls, outcome.full_park_events,
                                cfg.cost);
    j["fitness"] = total_cost(x, outcome, cfg.cost);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_dataset(const CommonArgs& args, int n) {
    const AppConfig cfg = resolve_config(args);
    with_manifest("dataset", args, cfg, [&] {
        const auto sim = make_sim_evaluator(cfg.sim, cfg.cost);
        const TrainingSet pool =
            build_training_pool(n, sim, cfg.ga.bounds, args.seed, args.workers);
        write_file(out_path(args, "dataset.csv"), pool.to_csv());
    });
    return 0;
}

int cmd_train(const CommonArgs& args, const std::string& data_path,
              const std::string& curve_sizes) {
    const AppConfig cfg = resolve_config(args);
    with_manifest("train", args, cfg, [&] {
        const TrainingSet data = TrainingSet::from_csv(read_file(data_path));
        const auto grid = default_grid(cfg.ga.surrogate.base(cfg.ga.surrogate.cv_epochs));
        if (!curve_sizes.empty()) {
            std::vector<std::size_t> sizes;
            for (double v : parse_double_list(curve_sizes, "curve size"))
                sizes.push_back(static_cast<std::size_t>(v));
            LearningCurveConfig curve_cfg;
            curve_cfg.cv_folds = cfg.ga.surrogate.cv_folds;
            curve_cfg.final_epochs = cfg.ga.surrogate.epochs;
            curve_cfg.workers = args.workers;
            const auto curve = learning_curve(data, sizes, grid, args.seed, curve_cfg);
            write_file(out_path(args, "curve.csv"), curve_to_csv(curve));
            return;
        }
        const GridSearchResult gs =
            grid_search(data, grid, cfg.ga.surrogate.cv_folds,
                        derive_seed(args.seed, "grid-search", 0), args.workers);
        Hyperparams hp = gs.best;
        hp.epochs = cfg.ga.surrogate.epochs;
        const SurrogateModel model =
            train(data, hp, derive_seed(args.seed, "train", 0));
        write_file(out_path(args, "model.json"), model.to_json());
        json metrics;
        metrics["train_r2"] = model.metrics.train_r2;
        metrics["train_mae"] = model.metrics.train_mae;
        metrics["chosen"] = {{"alpha", hp.alpha}, {"hidden_layers", hp.hidden_layers}};
        write_file(out_path(args, "metrics.json"), metrics.dump(2) + "\n");
    });
    return 0;
}

int cmd_run(const CommonArgs& args, const std::string& pool_path) {
    const AppConfig cfg = resolve_config(args);
    with_manifest("run", args, cfg, [&] {
        const auto sim = make_sim_evaluator(cfg.sim, cfg.cost);
        std::optional<TrainingSet> pool;
        if (!pool_path.empty())
            pool = TrainingSet::from_csv(read_file(pool_path));
        const SoResult result = run_so(cfg.ga, sim, args.seed,
                                       pool ? &*pool : nullptr, args.workers);
        write_file(out_path(args, "summary.json"),
                   so_summary_json(result, cfg, args.seed).dump(2) + "\n");
        write_file(out_path(args, "history.csv"), history_to_csv(result.history));
        write_file(out_path(args, "archive.csv"), result.archive.to_csv());
    });
    return 0;
}

int cmd_study(const CommonArgs& args, const std::string& param,
              const std::string& values_text, int n_seeds) {
    const AppConfig cfg = resolve_config(args);
    with_manifest("study", args, cfg, [&] {
        StudySpec spec;
        spec.parameter = param;
        spec.values = parse_double_list(values_text, "study");
        spec.base = cfg.ga;
        spec.seeds = seed_list(args.seed, n_seeds);
        const auto sim = make_sim_evaluator(cfg.sim, cfg.cost);
        const StudyResult result = run_parameter_study(spec, sim, args.workers);
        write_file(out_path(args, "study.csv"), result.to_csv());
        json summary;
        summary["parameter"] = result.parameter;
        for (const auto& agg : result.aggregates())
            summary["aggregates"].push_back({{"value", agg.value},
                                             {"median_best", agg.median_best},
                                             {"min_best", agg.min_best},
                                             {"median_evaluations",
                                              agg.median_evaluations}});
        write_file(out_path(args, "summary.json"), summary.dump(2) + "\n");
    });
    return 0;
}

int cmd_baseline(const CommonArgs& args, const std::string& budgets_text) {
    const AppConfig cfg = resolve_config(args);
    with_manifest("baseline", args, cfg, [&] {
        std::vector<int> budgets;
        for (double v : parse_double_list(budgets_text, "budget"))
            budgets.push_back(static_cast<int>(v));
        const auto sim = make_sim_evaluator(cfg.sim, cfg.cost);
        const BaselineResult result =
            run_random_baseline(budgets, sim, cfg.ga.bounds, args.seed, args.workers);
        write_file(out_path(args, "baseline.csv"), result.to_csv());
    });
    return 0;
}

int cmd_global(const CommonArgs& args, const std::string& n_train_text, int n_seeds) {
    const AppConfig cfg = resolve_config(args);
    with_manifest("global", args, cfg, [&] {
        std::vector<int> n_trains;
        for (double v : parse_double_list(n_train_text, "n-train"))
            n_trains.push_back(static_cast<int>(v));
        const int max_train = *std::max_element(n_trains.begin(), n_trains.end());
        const auto sim = make_sim_evaluator(cfg.sim, cfg.cost);

        CsvTable table;
        table.header = {"seed", "method", "n_train", "best_fitness",
                        "during_run_sims", "final_evaluations"};
        for (std::uint64_t seed : seed_list(args.seed, n_seeds)) {
            // One pool per seed; arms read prefixes of it.
            const TrainingSet pool = build_training_pool(
                std::max(max_train, cfg.ga.initial_random_sims), sim, cfg.ga.bounds,
                seed, args.workers);
            for (int n_train : n_trains) {
                const GlobalSurrogateResult g = run_global_surrogate(
                    n_train, cfg.ga, sim, seed, &pool, args.workers);
                table.rows.push_back({std::to_string(seed), "global-surrogate",
                                      format_int(n_train),
                                      format_double(g.best_fitness),
                                      format_int(g.during_run_simulations),
                                      format_int(g.final_evaluations)});
            }
            TrainingSet so_pool;
            so_pool.rows.assign(pool.rows.begin(),
                                pool.rows.begin() + cfg.ga.initial_random_sims);
            const SoResult so = run_so(cfg.ga, sim, seed, &so_pool, args.workers);
            table.rows.push_back({std::to_string(seed), "filtered-so",
                                  format_int(cfg.ga.initial_random_sims),
                                  format_double(so.best_fitness),
                                  format_int(so.sims_used), "0"});
        }
        write_file(out_path(args, "comparison.csv"), table.to_string());
    });
    return 0;
}

int cmd_sensitivity(const CommonArgs& args, const std::string& x_inline,
                    const std::string& x_file, double multiplier_unit) {
    const AppConfig cfg = resolve_config(args);
    with_manifest("sensitivity", args, cfg, [&] {
        const SolutionVector x = parse_solution_arg(x_inline, x_file);
        const auto sim = make_sim_evaluator(cfg.sim, cfg.cost);
        const SensitivityResult result = sensitivity(
            x, sim, cfg.ga.bounds, args.seed, multiplier_unit, args.workers);
        write_file(out_path(args, "sensitivity.csv"), result.to_csv());
        json summary;
        summary["base_fitness"] = result.base_fitness;
        summary["candidates"] = result.candidates.size();
        summary["min_fitness"] = result.min_fitness;
        summary["max_fitness"] = result.max_fitness;
        summary["mean_fitness"] = result.mean_fitness;
        summary["std_fitness"] = result.std_fitness;
        summary["found_better_than_base"] = result.found_better;
        write_file(out_path(args, "summary.json"), summary.dump(2) + "\n");
    });
    return 0;
}

int cmd_plot(const std::string& history_path, const std::string& out_file) {
    const std::string svg = render_history_chart(read_file(history_path));
    write_file(out_file, svg);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surrogate-assisted simulation optimisation of a synthetic "
                 "multi-site trailer fleet"};
    app.require_subcommand(0, 1);

    bool dump_defaults = false;
    app.add_flag("--dump-default-params", dump_defaults,
                 "print the canonical default configuration as JSON and exit");

    CommonArgs sim_args;
    std::string sim_x, sim_x_file;
    auto* c_sim = app.add_subcommand("simulate",
                                     "simulate one configuration and print its "
                                     "outcome and cost");
    add_common(c_sim, sim_args, false);
    c_sim->add_option("--x", sim_x, "15 comma-separated genes");
    c_sim->add_option("--x-file", sim_x_file, "solution JSON file");

    CommonArgs dataset_args;
    int dataset_n = 0;
    auto* c_dataset = app.add_subcommand("dataset",
                                         "simulate n random configurations into a "
                                         "training CSV");
    add_common(c_dataset, dataset_args, true);
    c_dataset->add_option("--n", dataset_n, "number of configurations")->required();

    CommonArgs train_args;
    std::string train_data, train_curve;
    auto* c_train = app.add_subcommand("train",
                                       "grid-search and train the surrogate on a "
                                       "dataset CSV");
    add_common(c_train, train_args, true);
    c_train->add_option("--data", train_data, "training CSV")->required();
    c_train->add_option("--curve", train_curve,
                        "comma-separated sizes: emit a learning curve instead of "
                        "a model");

    CommonArgs run_args;
    std::string run_pool;
    auto* c_run = app.add_subcommand("run", "one surrogate-filtered optimisation run");
    add_common(c_run, run_args, true);
    c_run->add_option("--pool", run_pool, "initial archive CSV (replaces random "
                                          "initialisation)");

    CommonArgs study_args;
    std::string study_param, study_values;
    int study_seeds = 5;
    auto* c_study = app.add_subcommand("study", "one-parameter sweep");
    add_common(c_study, study_args, true);
    c_study->add_option("--param", study_param,
                        "population_size | threshold | ensure_prob | mutation_prob")
        ->required();
    c_study->add_option("--values", study_values, "comma-separated values")->required();
    c_study->add_option("--seeds", study_seeds, "number of seed repetitions");

    CommonArgs baseline_args;
    std::string baseline_budgets = "1000,1250,1500,1750,2000";
    auto* c_baseline = app.add_subcommand("baseline", "random-search baseline");
    add_common(c_baseline, baseline_args, true);
    c_baseline->add_option("--budgets", baseline_budgets, "comma-separated budgets");

    CommonArgs global_args;
    std::string global_n_train = "1000,2000";
    int global_seeds = 5;
    auto* c_global = app.add_subcommand("global",
                                        "single global surrogate comparison against "
                                        "the filtered optimiser");
    add_common(c_global, global_args, true);
    c_global->add_option("--n-train", global_n_train, "comma-separated training sizes");
    c_global->add_option("--seeds", global_seeds, "number of seed repetitions");

    CommonArgs sens_args;
    std::string sens_x, sens_x_file;
    double sens_unit = 0.01;
    auto* c_sens = app.add_subcommand("sensitivity",
                                      "perturb each variable of a solution by one "
                                      "and two units");
    add_common(c_sens, sens_args, true);
    c_sens->add_option("--x", sens_x, "15 comma-separated genes");
    c_sens->add_option("--x-file", sens_x_file, "solution JSON file");
    c_sens->add_option("--multiplier-unit", sens_unit,
                       "one unit for multiplier genes");

    std::string plot_history, plot_out;
    auto* c_plot = app.add_subcommand("plot", "render a run history CSV as SVG");
    c_plot->add_option("--history", plot_history, "history CSV")->required();
    c_plot->add_option("--out-file", plot_out, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dump_defaults) {
            std::cout << to_json(default_app_config()).dump(2) << "\n";
            return 0;
        }
        if (c_sim->parsed()) return cmd_simulate(sim_args, sim_x, sim_x_file);
        if (c_dataset->parsed()) return cmd_dataset(dataset_args, dataset_n);
        if (c_train->parsed()) return cmd_train(train_args, train_data, train_curve);
        if (c_run->parsed()) return cmd_run(run_args, run_pool);
        if (c_study->parsed())
            return cmd_study(study_args, study_param, study_values, study_seeds);
        if (c_baseline->parsed()) return cmd_baseline(baseline_args, baseline_budgets);
        if (c_global->parsed())
            return cmd_global(global_args, global_n_train, global_seeds);
        if (c_sens->parsed())
            return cmd_sensitivity(sens_args, sens_x, sens_x_file, sens_unit);
        if (c_plot->parsed()) return cmd_plot(plot_history, plot_out);
        std::cout << app.help();
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
