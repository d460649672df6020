#include <doctest.h>

#include "fleetopt/errors.hpp"
#include "fleetopt/rng.hpp"
#include "fleetopt/solution.hpp"

using namespace fleetopt;

TEST_CASE("flatten and from_flat round-trip in canonical gene order") {
    SolutionVector x;
    x.owned = {1, 2, 3, 4, 5, 6};
    x.ext_multiplier = {1.1, 1.2, 1.3, 1.4, 1.5, 1.6};
    x.parking = {7, 8, 9};
    const auto genes = x.flatten();
    CHECK(genes[0] == 1.0);
    CHECK(genes[5] == 6.0);
    CHECK(genes[6] == 1.1);
    CHECK(genes[11] == 1.6);
    CHECK(genes[12] == 7.0);
    CHECK(genes[14] == 9.0);
    CHECK(SolutionVector::from_flat(genes) == x);
}

TEST_CASE("owned totals sum across sites per type") {
    SolutionVector x;
    x.owned = {1, 2, 3, 10, 20, 30};
    CHECK(x.owned_total(0) == 6);
    CHECK(x.owned_total(1) == 60);
}

TEST_CASE("validation names the offending field") {
    SolutionVector x;
    x.ext_multiplier.fill(1.0);
    x.owned[2] = -1;
    CHECK_THROWS_WITH_AS(validate(x), doctest::Contains("owned"), ValidationError);
    x.owned[2] = 0;
    x.ext_multiplier[3] = 0.0;
    CHECK_THROWS_WITH_AS(validate(x), doctest::Contains("ext_multiplier"),
                         ValidationError);
    x.ext_multiplier[3] = 1.0;
    x.parking[1] = -2;
    CHECK_THROWS_WITH_AS(validate(x), doctest::Contains("parking"), ValidationError);
}

TEST_CASE("bounds validation rejects out-of-range genes") {
    Bounds b;
    SolutionVector x;
    x.ext_multiplier.fill(1.0);
    validate(x, b); // zero owned/parking are inside the defaults
    x.owned[0] = b.owned.hi + 1;
    CHECK_THROWS_AS(validate(x, b), ValidationError);
    x.owned[0] = 0;
    x.ext_multiplier[5] = b.multiplier.hi + 0.5;
    CHECK_THROWS_AS(validate(x, b), ValidationError);
    CHECK_FALSE(within_bounds(x, b));
}

TEST_CASE("uniform samples satisfy the bounds") {
    Bounds b;
    b.owned = {2, 9};
    b.multiplier = {0.8, 1.3};
    b.parking = {1, 4};
    Rng rng(77);
    for (int i = 0; i < 500; ++i) {
        const SolutionVector x = sample_uniform(b, rng);
        CHECK(within_bounds(x, b));
        validate(x, b);
    }
}

TEST_CASE("uniform integer genes reach both endpoints") {
    Bounds b;
    b.owned = {0, 3};
    b.parking = {0, 2};
    Rng rng(78);
    bool lo = false, hi = false;
    for (int i = 0; i < 300; ++i) {
        const SolutionVector x = sample_uniform(b, rng);
        for (int v : x.owned) {
            lo = lo || v == 0;
            hi = hi || v == 3;
        }
    }
    CHECK(lo);
    CHECK(hi);
}
