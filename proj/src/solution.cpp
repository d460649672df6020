#include "fleetopt/solution.hpp"

#include <cmath>
#include <sstream>

#include "fleetopt/errors.hpp"
#include "fleetopt/rng.hpp"

namespace fleetopt {

const char* vehicle_type_name(int type) {
    return type == 0 ? "trailer" : "tanker";
}

int SolutionVector::owned_total(int type) const {
    int total = 0;
    for (int site = 0; site < kNumSites; ++site) total += owned_at(type, site);
    return total;
}

std::array<double, kNumGenes> SolutionVector::flatten() const {
    std::array<double, kNumGenes> genes{};
    int g = 0;
    for (int v : owned) genes[g++] = static_cast<double>(v);
    for (double m : ext_multiplier) genes[g++] = m;
    for (int p : parking) genes[g++] = static_cast<double>(p);
    return genes;
}

SolutionVector SolutionVector::from_flat(const std::array<double, kNumGenes>& genes) {
    SolutionVector x;
    int g = 0;
    for (auto& v : x.owned) v = static_cast<int>(std::llround(genes[g++]));
    for (auto& m : x.ext_multiplier) m = genes[g++];
    for (auto& p : x.parking) p = static_cast<int>(std::llround(genes[g++]));
    return x;
}

namespace {

std::string pair_name(const char* field, int idx) {
    std::ostringstream os;
    os << field << "[" << vehicle_type_name(idx / kNumSites) << ",site"
       << (idx % kNumSites + 1) << "]";
    return os.str();
}

} // namespace

void validate(const SolutionVector& x) {
    for (int i = 0; i < kNumTypes * kNumSites; ++i) {
        if (x.owned[i] < 0)
            throw ValidationError(pair_name("owned", i) + " must be >= 0");
        if (!(x.ext_multiplier[i] > 0.0) || !std::isfinite(x.ext_multiplier[i]))
            throw ValidationError(pair_name("ext_multiplier", i) +
                                  " must be positive and finite");
    }
    for (int l = 0; l < kNumSites; ++l) {
        if (x.parking[l] < 0)
            throw ValidationError("parking[site" + std::to_string(l + 1) +
                                  "] must be >= 0");
    }
}

void validate(const SolutionVector& x, const Bounds& b) {
    validate(x);
    if (!(b.multiplier.lo > 0.0) || !(b.multiplier.lo <= b.multiplier.hi))
        throw ValidationError("bounds.multiplier requires 0 < lo <= hi");
    for (int i = 0; i < kNumTypes * kNumSites; ++i) {
        if (x.owned[i] < b.owned.lo || x.owned[i] > b.owned.hi)
            throw ValidationError(pair_name("owned", i) + " outside bounds");
        if (x.ext_multiplier[i] < b.multiplier.lo || x.ext_multiplier[i] > b.multiplier.hi)
            throw ValidationError(pair_name("ext_multiplier", i) + " outside bounds");
    }
    for (int l = 0; l < kNumSites; ++l) {
        if (x.parking[l] < b.parking.lo || x.parking[l] > b.parking.hi)
            throw ValidationError("parking[site" + std::to_string(l + 1) +
                                  "] outside bounds");
    }
}

bool within_bounds(const SolutionVector& x, const Bounds& b) {
    for (int i = 0; i < kNumTypes * kNumSites; ++i) {
        if (x.owned[i] < b.owned.lo || x.owned[i] > b.owned.hi) return false;
        if (x.ext_multiplier[i] < b.multiplier.lo || x.ext_multiplier[i] > b.multiplier.hi)
            return false;
    }
    for (int l = 0; l < kNumSites; ++l) {
        if (x.parking[l] < b.parking.lo || x.parking[l] > b.parking.hi) return false;
    }
    return true;
}

SolutionVector sample_uniform(const Bounds& b, Rng& rng) {
    SolutionVector x;
    for (auto& v : x.owned)
        v = static_cast<int>(rng.uniform_int(b.owned.lo, b.owned.hi));
    for (auto& m : x.ext_multiplier)
        m = rng.uniform(b.multiplier.lo, b.multiplier.hi);
    for (auto& p : x.parking)
        p = static_cast<int>(rng.uniform_int(b.parking.lo, b.parking.hi));
    return x;
}

std::string to_string(const SolutionVector& x) {
    std::ostringstream os;
    os << "owned=[";
    for (int i = 0; i < kNumTypes * kNumSites; ++i)
        os << x.owned[i] << (i + 1 < kNumTypes * kNumSites ? "," : "]");
    os << " mult=[";
    for (int i = 0; i < kNumTypes * kNumSites; ++i)
        os << x.ext_multiplier[i] << (i + 1 < kNumTypes * kNumSites ? "," : "]");
    os << " parking=[";
    for (int l = 0; l < kNumSites; ++l)
        os << x.parking[l] << (l + 1 < kNumSites ? "," : "]");
    return os.str();
}

} // namespace fleetopt
