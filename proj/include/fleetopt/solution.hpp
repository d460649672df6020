#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace fleetopt {

inline constexpr int kNumTypes = 2;  // 0 = trailer, 1 = tanker
inline constexpr int kNumSites = 3;
inline constexpr int kNumGenes = kNumTypes * kNumSites * 2 + kNumSites; // 15

enum class VehicleType : int { Trailer = 0, Tanker = 1 };

const char* vehicle_type_name(int type);

/// Decision variables of one fleet configuration: owned-vehicle counts and
/// external-arrival multipliers per (type, site), parking capacity per site.
///
/// Flattened gene order (used by the GA, the surrogate and all CSV files):
/// owned[type][site] row-major (6), multiplier[type][site] row-major (6),
/// parking[site] (3).
struct SolutionVector {
    std::array<int, kNumTypes * kNumSites> owned{};
    std::array<double, kNumTypes * kNumSites> ext_multiplier{};
    std::array<int, kNumSites> parking{};

    static int pair_index(int type, int site) { return type * kNumSites + site; }

    int owned_at(int type, int site) const { return owned[pair_index(type, site)]; }
    double multiplier_at(int type, int site) const {
        return ext_multiplier[pair_index(type, site)];
    }

    /// Total owned vehicles of one type across all sites.
    int owned_total(int type) const;

    std::array<double, kNumGenes> flatten() const;
    static SolutionVector from_flat(const std::array<double, kNumGenes>& genes);

    bool operator==(const SolutionVector&) const = default;
};

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-field gene bounds. The same range applies to every gene of a field.
struct Bounds {
    IntRange owned{0, 120};
    RealRange multiplier{0.5, 2.0};
    IntRange parking{0, 60};
};

/// Throws ValidationError naming the offending field. Structural checks only
/// (non-negative counts, positive finite multipliers).
void validate(const SolutionVector& x);

/// Structural checks plus bounds membership for every gene.
void validate(const SolutionVector& x, const Bounds& b);

bool within_bounds(const SolutionVector& x, const Bounds& b);

/// Uniform sample: integer genes uniform on [lo, hi], multipliers uniform
/// real on [lo, hi).
class Rng;
SolutionVector sample_uniform(const Bounds& b, Rng& rng);

std::string to_string(const SolutionVector& x);

} // namespace fleetopt
