#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "susco/power.hpp"
#include "susco/rng.hpp"

using namespace susco;

TEST_CASE("wear increment matches quadrature of the stated integrand") {
    // Frozen oracle value for shape 1, discharge 0.8 -> 0.7:
    // adaptive Simpson of 10^(-x)(1 + ln10 (1-x)) over [0.7, 0.8].
    double frozen = 0.0281600055998441;
    REQUIRE(wear_increment(0.8, 0.7, 1.0) == Catch::Approx(frozen).epsilon(1e-10));
    REQUIRE(oracle::wear_by_quadrature(0.8, 0.7, 1.0) == Catch::Approx(frozen).margin(1e-11));

    Rng rng(12345);
    for (int i = 0; i < 2000; ++i) {
        double shape = rng.uniform(0.2, 3.0);
        double hi = rng.uniform(0.05, 1.0);
        double lo = rng.uniform(0.0, hi);
        double closed = wear_increment(hi, lo, shape);
        double quad = oracle::wear_by_quadrature(hi, lo, shape);
        REQUIRE(std::fabs(closed - quad) <= 1e-9);
        REQUIRE(closed >= 0.0);
    }
}

TEST_CASE("charging or holding the level causes no wear") {
    REQUIRE(wear_increment(0.5, 0.5, 1.0) == 0.0);
    REQUIRE(wear_increment(0.4, 0.9, 2.0) == 0.0);
}

TEST_CASE("wear is additive over adjacent discharge segments") {
    double whole = wear_increment(0.9, 0.3, 1.5);
    double split = wear_increment(0.9, 0.6, 1.5) + wear_increment(0.6, 0.3, 1.5);
    REQUIRE(whole == Catch::Approx(split).epsilon(1e-12));
}

TEST_CASE("service life cost weights wear by remaining life") {
    BatteryState fresh{.level = 1.0, .life = 2.0, .life_max = 2.0};
    REQUIRE(service_life_cost(0.01, fresh) == Catch::Approx(0.01));

    BatteryState worn{.level = 1.0, .life = 0.5, .life_max = 2.0};
    REQUIRE(service_life_cost(0.01, worn) == Catch::Approx(0.01 * std::exp(3.0)));

    BatteryState dead{.level = 1.0, .life = 0.0, .life_max = 2.0};
    REQUIRE(std::isinf(service_life_cost(0.01, dead)));
    REQUIRE(std::isinf(service_life_cost(0.0, dead)));
}

TEST_CASE("path energy is traffic times summed per-node cost") {
    std::vector<double> eps(4, 0.08);
    REQUIRE(path_energy_j(1000.0, eps) == Catch::Approx(4 * 1000.0 * 0.08));
    REQUIRE(path_energy_j(0.0, eps) == 0.0);
}

TEST_CASE("offload energy validates the split sum") {
    std::vector<double> splits{600.0, 400.0};
    std::vector<double> prefix_eps{0.08, 0.16};
    REQUIRE(offload_energy_j(splits, prefix_eps, 1000.0) ==
            Catch::Approx(600.0 * 0.08 + 400.0 * 0.16));

    std::vector<double> bad{600.0, 300.0};
    REQUIRE_THROWS_AS(offload_energy_j(bad, prefix_eps, 1000.0), SplitMismatch);
    REQUIRE_THROWS_AS(offload_energy_j(splits, {0.08}, 1000.0), SplitMismatch);
}

TEST_CASE("battery stepping charges in sunlight and wears on discharge") {
    BatteryState b{.level = 0.5, .life = 1.0, .life_max = 1.0, .wear_shape = 1.0,
                   .capacity_j = 1000.0};

    SECTION("sunlit surplus raises the level and costs no life") {
        step_battery(b, 100.0, 300.0, false, 1.0);
        REQUIRE(b.level == Catch::Approx(0.7));
        REQUIRE(b.life == 1.0);
    }

    SECTION("eclipse discharges and consumes life") {
        step_battery(b, 100.0, 300.0, true, 1.0);
        REQUIRE(b.level == Catch::Approx(0.4));
        double k = wear_increment(0.5, 0.4, 1.0);
        REQUIRE(b.life == Catch::Approx(1.0 - k));
    }

    SECTION("level clamps to [0, 1]") {
        step_battery(b, 0.0, 1000.0, false, 10.0);
        REQUIRE(b.level == 1.0);
        step_battery(b, 1000.0, 0.0, true, 10.0);
        REQUIRE(b.level == 0.0);
    }
}
