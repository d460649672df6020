#include "fleetopt/config.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>

#include "fleetopt/csv.hpp"
#include "fleetopt/errors.hpp"

namespace fleetopt {

using nlohmann::json;

AppConfig default_app_config() {
    AppConfig cfg;
    cfg.sim = default_sim_params();
    return cfg;
}

namespace {

json profile_to_json(const WeeklyProfile& p) {
    json rows = json::array();
    for (const auto& day : p.rate) rows.push_back(day);
    return json{{"kind", "matrix"}, {"rate", rows}};
}

WeeklyProfile profile_from_json(const json& j) {
    const std::string kind = j.value("kind", "matrix");
    if (kind == "shaped") return shaped_weekly_profile(j.at("mean_rate").get<double>());
    if (kind == "constant") return constant_weekly_profile(j.at("rate").get<double>());
    if (kind != "matrix")
        throw ValidationError("demand profile kind must be matrix, shaped or constant");
    WeeklyProfile p;
    const auto& rows = j.at("rate");
    if (rows.size() != 7)
        throw ValidationError("demand profile matrix needs 7 day rows");
    for (int d = 0; d < 7; ++d) {
        if (rows[d].size() != 24)
            throw ValidationError("demand profile day rows need 24 hourly rates");
        for (int h = 0; h < 24; ++h) p.rate[d][h] = rows[d][h].get<double>();
    }
    return p;
}

template <typename T>
void maybe(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

json sim_to_json(const SimParams& p) {
    json j;
    j["horizon_days"] = p.horizon_days;
    j["warmup_days"] = p.warmup_days;
    j["defect_prob"] = p.defect_prob;
    j["missed_call_wait_hours"] = p.missed_call_wait_hours;
    j["unload_hours"] = p.unload_hours;
    j["ext_multiplier_cap"] = p.ext_multiplier_cap;
    for (int i = 0; i < kNumTypes; ++i) {
        const char* type = vehicle_type_name(i);
        j["trip"][type] = {{"median_hours", p.trip[i].median_hours},
                           {"sigma", p.trip[i].sigma}};
        for (int l = 0; l < kNumSites; ++l) {
            const std::string site = "site" + std::to_string(l + 1);
            j["demand"][type][site] = profile_to_json(p.demand[i][l]);
            j["ext_base_rate"][type][site] = p.ext_base_rate[i][l];
        }
    }
    return j;
}

void sim_from_json(const json& j, SimParams& p) {
    maybe(j, "horizon_days", p.horizon_days);
    maybe(j, "warmup_days", p.warmup_days);
    maybe(j, "defect_prob", p.defect_prob);
    maybe(j, "missed_call_wait_hours", p.missed_call_wait_hours);
    maybe(j, "unload_hours", p.unload_hours);
    maybe(j, "ext_multiplier_cap", p.ext_multiplier_cap);
    for (int i = 0; i < kNumTypes; ++i) {
        const char* type = vehicle_type_name(i);
        if (j.contains("trip") && j["trip"].contains(type)) {
            maybe(j["trip"][type], "median_hours", p.trip[i].median_hours);
            maybe(j["trip"][type], "sigma", p.trip[i].sigma);
        }
        for (int l = 0; l < kNumSites; ++l) {
            const std::string site = "site" + std::to_string(l + 1);
            if (j.contains("demand") && j["demand"].contains(type) &&
                j["demand"][type].contains(site))
                p.demand[i][l] = profile_from_json(j["demand"][type][site]);
            if (j.contains("ext_base_rate") && j["ext_base_rate"].contains(type) &&
                j["ext_base_rate"][type].contains(site))
                p.ext_base_rate[i][l] = j["ext_base_rate"][type][site].get<double>();
        }
    }
}

json cost_to_json(const CostParams& c) {
    json j;
    for (int i = 0; i < kNumTypes; ++i) {
        const char* type = vehicle_type_name(i);
        j["c_own"][type] = c.c_own[i];
        j["c_ext"][type] = c.c_ext[i];
    }
    j["c_park"] = c.c_park;
    j["c_defect"] = c.c_defect;
    j["c_missed_call"] = c.c_missed_call;
    j["c_park_full"] = c.c_park_full;
    return j;
}

void cost_from_json(const json& j, CostParams& c) {
    for (int i = 0; i < kNumTypes; ++i) {
        const char* type = vehicle_type_name(i);
        if (j.contains("c_own")) maybe(j["c_own"], type, c.c_own[i]);
        if (j.contains("c_ext")) maybe(j["c_ext"], type, c.c_ext[i]);
    }
    maybe(j, "c_park", c.c_park);
    maybe(j, "c_defect", c.c_defect);
    maybe(j, "c_missed_call", c.c_missed_call);
    maybe(j, "c_park_full", c.c_park_full);
}

json bounds_to_json(const Bounds& b) {
    return json{{"owned", {b.owned.lo, b.owned.hi}},
                {"multiplier", {b.multiplier.lo, b.multiplier.hi}},
                {"parking", {b.parking.lo, b.parking.hi}}};
}

void bounds_from_json(const json& j, Bounds& b) {
    if (j.contains("owned")) {
        b.owned.lo = j["owned"][0].get<int>();
        b.owned.hi = j["owned"][1].get<int>();
    }
    if (j.contains("multiplier")) {
        b.multiplier.lo = j["multiplier"][0].get<double>();
        b.multiplier.hi = j["multiplier"][1].get<double>();
    }
    if (j.contains("parking")) {
        b.parking.lo = j["parking"][0].get<int>();
        b.parking.hi = j["parking"][1].get<int>();
    }
}

json ga_to_json(const GaConfig& g) {
    json j;
    j["population_size"] = g.population_size;
    j["ensure_prob"] = g.ensure_prob;
    j["threshold"] = g.threshold;
    j["mutation_prob"] = g.mutation_prob;
    j["crossover_prob"] = g.crossover_prob;
    j["n_elites"] = g.n_elites;
    j["max_generations"] = g.max_generations;
    j["max_simulations"] = g.max_simulations;
    j["initial_random_sims"] = g.initial_random_sims;
    j["grid_search_interval"] = g.grid_search_interval;
    j["bounds"] = bounds_to_json(g.bounds);
    j["surrogate"] = {{"learning_rate", g.surrogate.learning_rate},
                      {"epochs", g.surrogate.epochs},
                      {"cv_epochs", g.surrogate.cv_epochs},
                      {"batch_size", g.surrogate.batch_size},
                      {"cv_folds", g.surrogate.cv_folds}};
    return j;
}

void ga_from_json(const json& j, GaConfig& g) {
    maybe(j, "population_size", g.population_size);
    maybe(j, "ensure_prob", g.ensure_prob);
    maybe(j, "threshold", g.threshold);
    maybe(j, "mutation_prob", g.mutation_prob);
    maybe(j, "crossover_prob", g.crossover_prob);
    maybe(j, "n_elites", g.n_elites);
    maybe(j, "max_generations", g.max_generations);
    maybe(j, "max_simulations", g.max_simulations);
    maybe(j, "initial_random_sims", g.initial_random_sims);
    maybe(j, "grid_search_interval", g.grid_search_interval);
    if (j.contains("bounds")) bounds_from_json(j["bounds"], g.bounds);
    if (j.contains("surrogate")) {
        const auto& s = j["surrogate"];
        maybe(s, "learning_rate", g.surrogate.learning_rate);
        maybe(s, "epochs", g.surrogate.epochs);
        maybe(s, "cv_epochs", g.surrogate.cv_epochs);
        maybe(s, "batch_size", g.surrogate.batch_size);
        maybe(s, "cv_folds", g.surrogate.cv_folds);
    }
}

} // namespace

json to_json(const AppConfig& cfg) {
    json j;
    j["format_version"] = kConfigFormatVersion;
    j["sim"] = sim_to_json(cfg.sim);
    j["cost"] = cost_to_json(cfg.cost);
    j["ga"] = ga_to_json(cfg.ga);
    return j;
}

AppConfig app_config_from_json(const json& j) {
    if (j.contains("format_version") &&
        j["format_version"].get<int>() != kConfigFormatVersion)
        throw ValidationError("unsupported config format_version");
    AppConfig cfg;
    cfg.sim = default_sim_params();
    if (j.contains("sim")) sim_from_json(j["sim"], cfg.sim);
    if (j.contains("cost")) cost_from_json(j["cost"], cfg.cost);
    if (j.contains("ga")) ga_from_json(j["ga"], cfg.ga);
    return cfg;
}

AppConfig load_app_config(const std::string& path) {
    AppConfig cfg;
    cfg.sim = default_sim_params();
    if (path.empty()) return cfg;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse error in " + path + ": " + e.what());
    }
    return app_config_from_json(j);
}

void validate(const AppConfig& cfg) {
    validate(cfg.sim);
    validate(cfg.cost);
    validate(cfg.ga);
}

json RunManifest::to_json() const {
    json j;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["config_path"] = config_path;
    j["config"] = config_snapshot;
    j["seed"] = seed;
    j["workers"] = workers;
    j["out_dir"] = out_dir;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["status"] = status;
    return j;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec);
    return buf;
}

void write_manifest(const RunManifest& manifest) {
    const auto path = std::filesystem::path(manifest.out_dir) / "manifest.json";
    write_file(path.string(), manifest.to_json().dump(2) + "\n");
}

json solution_to_json(const SolutionVector& x) {
    json j;
    for (int i = 0; i < kNumTypes; ++i) {
        const char* type = vehicle_type_name(i);
        for (int l = 0; l < kNumSites; ++l) {
            j["owned"][type].push_back(x.owned_at(i, l));
            j["multiplier"][type].push_back(x.multiplier_at(i, l));
        }
    }
    for (int l = 0; l < kNumSites; ++l) j["parking"].push_back(x.parking[l]);
    j["genes"] = x.flatten();
    return j;
}

SolutionVector solution_from_json(const json& j) {
    SolutionVector x;
    if (j.contains("genes")) {
        const auto genes = j.at("genes").get<std::vector<double>>();
        if (genes.size() != kNumGenes)
            throw ValidationError("solution genes must have exactly 15 values");
        std::array<double, kNumGenes> arr{};
        std::copy(genes.begin(), genes.end(), arr.begin());
        return SolutionVector::from_flat(arr);
    }
    for (int i = 0; i < kNumTypes; ++i) {
        const char* type = vehicle_type_name(i);
        for (int l = 0; l < kNumSites; ++l) {
            x.owned[SolutionVector::pair_index(i, l)] =
                j.at("owned").at(type).at(l).get<int>();
            x.ext_multiplier[SolutionVector::pair_index(i, l)] =
                j.at("multiplier").at(type).at(l).get<double>();
        }
    }
    for (int l = 0; l < kNumSites; ++l)
        x.parking[l] = j.at("parking").at(l).get<int>();
    return x;
}

SolutionVector parse_solution_arg(const std::string& inline_genes,
                                  const std::string& json_path) {
    if (!inline_genes.empty() && !json_path.empty())
        throw ValidationError("give either --x or --x-file, not both");
    if (!json_path.empty()) {
        try {
            return solution_from_json(json::parse(read_file(json_path)));
        } catch (const json::exception& e) {
            throw ValidationError("solution file " + json_path + ": " + e.what());
        }
    }
    if (inline_genes.empty())
        throw ValidationError("a solution is required (--x or --x-file)");
    std::array<double, kNumGenes> genes{};
    std::size_t start = 0;
    int g = 0;
    while (start <= inline_genes.size()) {
        const std::size_t comma = inline_genes.find(',', start);
        const std::string field =
            inline_genes.substr(start, comma == std::string::npos
                                           ? std::string::npos
                                           : comma - start);
        if (g >= kNumGenes)
            throw ValidationError("solution needs exactly 15 genes");
        try {
            genes[static_cast<std::size_t>(g++)] = std::stod(field);
        } catch (const std::exception&) {
            throw ValidationError("bad gene value: '" + field + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (g != kNumGenes) throw ValidationError("solution needs exactly 15 genes");
    return SolutionVector::from_flat(genes);
}

} // namespace fleetopt
