#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracle_values.hpp"
#include "polcascade/model.hpp"

using namespace polcascade;

TEST_CASE("fold_deviation reduces modulo pi into (-pi/2, pi/2]") {
    CHECK(fold_deviation(3 * kPi / 4) == doctest::Approx(-kPi / 4).epsilon(1e-15));
    CHECK(fold_deviation(kPi) == doctest::Approx(0.0));
    CHECK(fold_deviation(-kPi / 3) == -kPi / 3);
    CHECK(fold_deviation(kHalfPi) == kHalfPi);
    CHECK(fold_deviation(-kHalfPi) == doctest::Approx(kHalfPi));
    CHECK_THROWS_AS(fold_deviation(NAN), std::invalid_argument);
    CHECK_THROWS_AS(fold_deviation(INFINITY), std::invalid_argument);
}

TEST_CASE("fold is idempotent and stays in range") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = dist(gen);
        const double f = fold_deviation(x);
        REQUIRE(f > -kHalfPi);
        REQUIRE(f <= kHalfPi);
        REQUIRE(fold_deviation(f) == f);
        // same residue class
        const double k = (x - f) / kPi;
        REQUIRE(std::abs(k - std::round(k)) < 1e-9);
    }
}

TEST_CASE("Angle stores axes canonically in [0, pi)") {
    CHECK(Angle::degrees(190.0).deg() == doctest::Approx(10.0));
    CHECK(Angle::degrees(-30.0).deg() == doctest::Approx(150.0));
    CHECK(Angle::degrees(180.0).rad() == 0.0);
    CHECK(Angle::radians(kPi / 4).rad() == kPi / 4);
}

TEST_CASE("malus") {
    CHECK(malus(0.0, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(malus(kHalfPi, 0.02) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(malus(kPi / 4, 0.02) == doctest::Approx(0.51).epsilon(1e-12));
    CHECK_THROWS_AS(malus(0.1, -0.01), std::invalid_argument);
    CHECK_THROWS_AS(malus(0.1, 1.5), std::invalid_argument);

    for (int i = 0; i <= 2000; ++i) {
        const double d = -kPi + i * kPi / 1000.0;
        const double c = std::cos(d);
        REQUIRE(std::abs(malus(d, 0.0) - c * c) <= 1e-15);
    }
}

TEST_CASE("hv_response against the scalar oracle") {
    const HvResponseParams defaults;
    CHECK(hv_response(0.0, defaults) == 1.0);
    CHECK(std::abs(hv_response(kHalfPi, defaults) - oracle::kHvResponseHalfPi) < 1e-3);
    CHECK(std::abs(hv_response(kPi / 4, defaults) - oracle::kHvResponseQuarterPi) < 1e-3);
    // tighter than the contract: plain double evaluation of the same formula
    CHECK(hv_response(kHalfPi, defaults) == doctest::Approx(oracle::kHvResponseHalfPi).epsilon(1e-12));
}

TEST_CASE("hv_response is non-increasing on [0, pi/2] for the defaults") {
    const HvResponseParams defaults;
    double prev = hv_response(0.0, defaults);
    for (int i = 1; i < 1000; ++i) {
        const double v = hv_response(i * kHalfPi / 999.0, defaults);
        REQUIRE(v <= prev);
        prev = v;
    }
}

TEST_CASE("hv parameters are validated") {
    CHECK_THROWS_AS(hv_response(0.1, HvResponseParams{-1.0, 3.56, 500.0}), std::invalid_argument);
    CHECK_THROWS_AS(hv_response(0.1, HvResponseParams{1.95, 0.0, 500.0}), std::invalid_argument);
    CHECK_THROWS_AS(hv_response(0.1, HvResponseParams{1.95, 3.56, -1.0}), std::invalid_argument);
    CHECK_NOTHROW(hv_response(0.1, HvResponseParams{1.95, 3.56, 0.0}));
}

TEST_CASE("evaluate dispatches over response laws") {
    CHECK(evaluate(IdealMalus{}, kPi / 3) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(evaluate(HvStep{}, -kHalfPi) == hv_response(kHalfPi, {}));
    const TabulatedResponse ramp({{0.0, 1.0}, {kHalfPi, 0.0}});
    CHECK(evaluate(ramp, kPi / 4) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("tabulated response clamps outside its grid and flags it") {
    const TabulatedResponse partial({{0.2, 0.9}, {1.0, 0.1}});
    auto inside = evaluate_detailed(partial, 0.6);
    CHECK_FALSE(inside.clamped);
    CHECK(inside.probability == doctest::Approx(0.5));

    auto low = evaluate_detailed(partial, 0.05);
    CHECK(low.clamped);
    CHECK(low.probability == 0.9);

    auto high = evaluate_detailed(partial, -1.4);
    CHECK(high.clamped);
    CHECK(high.probability == 0.1);
}

TEST_CASE("tabulated grid invariants") {
    using P = TabulatedResponse::Point;
    CHECK_THROWS_AS(TabulatedResponse(std::vector<P>{{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TabulatedResponse({{0.0, 1.0}, {0.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(TabulatedResponse({{0.3, 1.0}, {0.1, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(TabulatedResponse({{0.0, 1.2}, {1.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(TabulatedResponse({{0.0, 1.0}, {2.0, 0.5}}), std::invalid_argument);
}

TEST_CASE("every law is a probability, even and pi-periodic") {
    const std::vector<ResponseLaw> laws = {
        IdealMalus{},
        GeneralizedMalus{0.07},
        HvStep{},
        HvStep{HvResponseParams{0.8, 2.0, 20.0}},
        TabulatedResponse({{0.0, 0.95}, {0.4, 0.9}, {1.1, 0.2}, {kHalfPi, 0.03}}),
    };
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (const auto& law : laws) {
        for (int i = 0; i < 1000; ++i) {
            const double d = dist(gen);
            const double v = evaluate(law, d);
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
            REQUIRE(std::abs(v - evaluate(law, -d)) <= 1e-12);
            REQUIRE(std::abs(v - evaluate(law, d + kPi)) <= 1e-12);
        }
    }
}

TEST_CASE("law validation") {
    CHECK_THROWS_AS(validate(GeneralizedMalus{1.2}), std::invalid_argument);
    CHECK_THROWS_AS(validate(HvStep{HvResponseParams{1.0, -2.0, 1.0}}), std::invalid_argument);
    CHECK_NOTHROW(validate(constant_response(0.4)));
    CHECK(describe(GeneralizedMalus{0.02}) == "malus(eps=0.02)");
}
