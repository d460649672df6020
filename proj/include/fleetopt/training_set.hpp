#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fleetopt/cost_model.hpp"
#include "fleetopt/solution.hpp"

namespace fleetopt {

enum class Provenance : std::uint8_t { RandomInit, SoRun };

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

/// One simulated configuration with its fitness and the simulation seed it
/// was evaluated under.
struct TrainingRow {
    std::array<double, kNumGenes> features{};
    FitnessValue fitness = 0.0;
    std::uint64_t seed = 0;
    Provenance provenance = Provenance::RandomInit;
};

/// Archive of simulated solutions; doubles as the surrogate training set.
struct TrainingSet {
    std::vector<TrainingRow> rows;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }

    void add(const SolutionVector& x, FitnessValue fitness, std::uint64_t seed,
             Provenance provenance);

    /// Index of the row with lowest fitness, ties by insertion order.
    std::size_t best_index() const;

    /// FNV-1a checksum of the serialized content, for shared-pool checks.
    std::uint64_t checksum() const;

    std::string to_csv() const;
    static TrainingSet from_csv(const std::string& text);
};

/// Canonical CSV feature column names, in gene order.
std::array<std::string, kNumGenes> feature_column_names();

} // namespace fleetopt
