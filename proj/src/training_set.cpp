#include "fleetopt/training_set.hpp"

#include <charconv>
#include <limits>

#include "fleetopt/csv.hpp"
#include "fleetopt/errors.hpp"
#include "fleetopt/rng.hpp"

namespace fleetopt {

const char* provenance_name(Provenance p) {
    return p == Provenance::RandomInit ? "random-init" : "so-run";
}

Provenance provenance_from_name(const std::string& name) {
    if (name == "random-init") return Provenance::RandomInit;
    if (name == "so-run") return Provenance::SoRun;
    throw ValidationError("unknown provenance: " + name);
}

void TrainingSet::add(const SolutionVector& x, FitnessValue fitness,
                      std::uint64_t seed, Provenance provenance) {
    rows.push_back(TrainingRow{x.flatten(), fitness, seed, provenance});
}

std::size_t TrainingSet::best_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].fitness < rows[best].fitness) best = i;
    return best;
}

std::uint64_t TrainingSet::checksum() const { return fnv1a(to_csv()); }

std::array<std::string, kNumGenes> feature_column_names() {
    std::array<std::string, kNumGenes> names;
    int g = 0;
    for (int i = 0; i < kNumTypes; ++i)
        for (int l = 0; l < kNumSites; ++l)
            names[g++] = std::string("owned_") + vehicle_type_name(i) + "_site" +
                         std::to_string(l + 1);
    for (int i = 0; i < kNumTypes; ++i)
        for (int l = 0; l < kNumSites; ++l)
            names[g++] = std::string("mult_") + vehicle_type_name(i) + "_site" +
                         std::to_string(l + 1);
    for (int l = 0; l < kNumSites; ++l)
        names[g++] = "parking_site" + std::to_string(l + 1);
    return names;
}

std::string TrainingSet::to_csv() const {
    CsvTable table;
    for (const auto& name : feature_column_names()) table.header.push_back(name);
    table.header.insert(table.header.end(), {"fitness", "seed", "provenance"});
    table.rows.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<std::string> fields;
        fields.reserve(kNumGenes + 3);
        for (double f : row.features) fields.push_back(format_double(f));
        fields.push_back(format_double(row.fitness));
        fields.push_back(std::to_string(row.seed));
        fields.push_back(provenance_name(row.provenance));
        table.rows.push_back(std::move(fields));
    }
    return table.to_string();
}

namespace {

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError("bad numeric field in CSV: '" + s + "'");
    return v;
}

} // namespace

TrainingSet TrainingSet::from_csv(const std::string& text) {
    const CsvTable table = parse_csv(text);
    const auto names = feature_column_names();
    std::array<int, kNumGenes> cols{};
    for (int g = 0; g < kNumGenes; ++g) {
        cols[g] = table.column(names[g]);
        if (cols[g] < 0)
            throw ValidationError("training CSV missing column: " + names[g]);
    }
    const int fit_col = table.column("fitness");
    const int seed_col = table.column("seed");
    const int prov_col = table.column("provenance");
    if (fit_col < 0 || seed_col < 0 || prov_col < 0)
        throw ValidationError("training CSV missing fitness/seed/provenance column");

    TrainingSet ts;
    ts.rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        TrainingRow r;
        for (int g = 0; g < kNumGenes; ++g) r.features[g] = parse_double(row[cols[g]]);
        r.fitness = parse_double(row[fit_col]);
        r.seed = std::stoull(row[seed_col]);
        r.provenance = provenance_from_name(row[prov_col]);
        ts.rows.push_back(r);
    }
    return ts;
}

} // namespace fleetopt
