#include <doctest.h>

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "oracle_values.hpp"
#include "polcascade/model.hpp"
#include "polcascade/numerics.hpp"

using namespace polcascade;

namespace {

// Fixed-step midpoint rule, independent of the adaptive scheme.
template <class F>
double midpoint_period(F f, int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += f((i + 0.5) * kPi / n);
    return sum / n;
}

}  // namespace

TEST_CASE("integrate_period closed forms") {
    auto s2 = integrate_period([](double x) { return std::sin(x) * std::sin(x); }, 1e-10);
    CHECK(std::abs(s2.value - 0.5) < 1e-10);
    CHECK(s2.estimated_error >= 0.0);
    CHECK(s2.evaluations >= 7);

    auto one = integrate_period([](double) { return 1.0; });
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-14));

    auto lin = integrate_period([](double x) { return x; });
    CHECK(lin.value == doctest::Approx(kPi / 2).epsilon(1e-13));
}

TEST_CASE("integrate_period matches the frozen midpoint oracle for the squared HV response") {
    const HvResponseParams defaults;
    auto r = integrate_period(
        [&](double l) {
            const double p = hv_response(l, defaults);
            return p * p;
        },
        1e-10);
    CHECK(std::abs(r.value - oracle::kHvTwoAtZero) < 1e-6);
    // and against an in-test midpoint rule
    const double mid = midpoint_period(
        [&](double l) {
            const double p = hv_response(l, defaults);
            return p * p;
        },
        200000);
    CHECK(std::abs(r.value - mid) < 1e-9);
}

TEST_CASE("integrate_period reports budget exhaustion with the best estimate") {
    auto spiky = [](double x) { return std::sin(400.0 * x * x); };
    try {
        integrate_period(spiky, 1e-14, 2000);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.best_estimate().evaluations <= 2000);
        CHECK(std::isfinite(e.best_estimate().value));
    }
    CHECK_THROWS_AS(integrate_period([](double) { return 1.0; }, 0.0), std::invalid_argument);
}

TEST_CASE("halving the tolerance moves the value by less than the prior error estimate") {
    const HvResponseParams defaults;
    auto f = [&](double l) { return hv_response(l, defaults) * hv_response(l - 0.7, defaults); };
    for (double tol : {1e-4, 1e-6, 1e-8}) {
        auto coarse = integrate_period(f, tol);
        auto fine = integrate_period(f, tol / 2);
        CHECK(std::abs(fine.value - coarse.value) <= coarse.estimated_error);
    }
}

TEST_CASE("minimize_scalar") {
    auto quad = minimize_scalar([](double x) { return (x - 1) * (x - 1); }, 0.0, 3.0, 1e-10);
    CHECK(quad.converged);
    CHECK(std::abs(quad.argmin - 1.0) < 1e-8);
    CHECK(quad.min_value < 1e-16);

    auto cos2 = minimize_scalar([](double x) { return std::cos(x) * std::cos(x); }, 0.0, kPi, 1e-10);
    CHECK(std::abs(cos2.argmin - kHalfPi) < 1e-8);
    CHECK(cos2.min_value < 1e-16);

    auto three = minimize_scalar(
        [](double b) {
            const double c1 = std::cos(kPi / 4);
            const double c2 = std::cos(kPi / 4 - b);
            return c1 * c1 * c2 * c2;
        },
        0.0, kPi, 1e-10);
    CHECK(std::abs(three.argmin - 3 * kPi / 4) < 1e-8);
    CHECK(three.min_value < 1e-16);

    CHECK_THROWS_AS(minimize_scalar([](double x) { return x; }, 1.0, 1.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(minimize_scalar([](double x) { return x; }, 2.0, 1.0, 1e-6), std::invalid_argument);
}

TEST_CASE("minimize_scalar stays in its bracket and reports f(argmin)") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double a = u(gen);
        const double b = a + 0.1 + std::abs(u(gen));
        const double c = u(gen);
        const double w = 0.5 + std::abs(u(gen));
        auto f = [&](double x) { return std::sin(w * x + c) + 0.1 * x; };
        auto r = minimize_scalar(f, a, b, 1e-9);
        REQUIRE(r.argmin >= a);
        REQUIRE(r.argmin <= b);
        REQUIRE(std::abs(r.min_value - f(r.argmin)) <= 1e-12);
    }
    // monotone: lower endpoint wins
    auto mono = minimize_scalar([](double x) { return x; }, 2.0, 5.0, 1e-9);
    CHECK(mono.argmin == 2.0);
}

namespace {

std::vector<std::pair<double, double>> malus_samples(double amplitude, double eps, int n) {
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i < n; ++i) {
        const double a = deg_to_rad(i * 90.0 / (n - 1));
        const double c = std::cos(a);
        s.emplace_back(a, amplitude * ((1 - eps) * c * c + eps));
    }
    return s;
}

// Test-side oracle: scan eps on a grid, closed-form amplitude for each eps,
// then a finer scan around the best grid cell.
std::pair<double, double> grid_search_fit(const std::vector<std::pair<double, double>>& s) {
    auto sse_at = [&](double eps, double& amp) {
        double ym = 0.0, mm = 0.0;
        for (auto [a, y] : s) {
            const double c = std::cos(a);
            const double m = (1 - eps) * c * c + eps;
            ym += y * m;
            mm += m * m;
        }
        amp = ym / mm;
        double sse = 0.0;
        for (auto [a, y] : s) {
            const double c = std::cos(a);
            const double r = y - amp * ((1 - eps) * c * c + eps);
            sse += r * r;
        }
        return sse;
    };
    double lo = 0.0, hi = 1.0, best_eps = 0.0, best_amp = 0.0;
    for (int level = 0; level < 6; ++level) {
        double best = INFINITY;
        const int n = 1000;
        for (int i = 0; i <= n; ++i) {
            const double eps = lo + (hi - lo) * i / n;
            double amp;
            const double sse = sse_at(eps, amp);
            if (sse < best) {
                best = sse;
                best_eps = eps;
                best_amp = amp;
            }
        }
        const double w = (hi - lo) / n;
        lo = std::max(0.0, best_eps - w);
        hi = std::min(1.0, best_eps + w);
    }
    return {best_amp, best_eps};
}

}  // namespace

TEST_CASE("fit_malus recovers exact model data") {
    const auto s = malus_samples(1.0, 0.05, 91);
    const auto fit = fit_malus(s);
    CHECK(std::abs(fit.epsilon - 0.05) < 1e-9);
    CHECK(std::abs(fit.amplitude - 1.0) < 1e-9);
    CHECK(fit.sup_residual <= 1e-9);
    CHECK(fit.rms_residual <= 1e-9);
}

TEST_CASE("fit_malus resolves flat data to a pure pedestal") {
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i < 10; ++i) s.emplace_back(0.1 * i, 0.37);
    const auto fit = fit_malus(s);
    CHECK(fit.epsilon == 1.0);
    CHECK(fit.amplitude == doctest::Approx(0.37).epsilon(1e-14));
    CHECK(fit.sup_residual < 1e-14);
}

TEST_CASE("fit_malus rejects degenerate input") {
    std::vector<std::pair<double, double>> same = {{0.3, 0.1}, {0.3, 0.2}, {0.3, 0.5}};
    CHECK_THROWS_AS(fit_malus(same), std::invalid_argument);
    std::vector<std::pair<double, double>> equivalent = {{0.3, 0.1}, {0.3 + kPi, 0.2}, {-0.3, 0.5}};
    CHECK_THROWS_AS(fit_malus(equivalent), std::invalid_argument);
    std::vector<std::pair<double, double>> two = {{0.0, 1.0}, {1.0, 0.5}};
    CHECK_THROWS_AS(fit_malus(two), std::invalid_argument);
}

TEST_CASE("fit_malus agrees with a grid-search oracle and is scale invariant") {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> noise(0.0, 0.01);
    auto s = malus_samples(0.8, 0.2, 46);
    for (auto& [a, y] : s) y += noise(gen);

    const auto fit = fit_malus(s);
    const auto [amp, eps] = grid_search_fit(s);
    CHECK(std::abs(fit.epsilon - eps) < 1e-6);
    CHECK(std::abs(fit.amplitude - amp) < 1e-6);

    auto scaled = s;
    for (auto& [a, y] : scaled) y *= 3.7;
    const auto fit2 = fit_malus(scaled);
    CHECK(std::abs(fit2.epsilon - fit.epsilon) < 1e-9);
    CHECK(std::abs(fit2.amplitude - 3.7 * fit.amplitude) < 1e-9);
    CHECK(std::abs(fit2.sup_residual - fit.sup_residual) < 1e-9);
    CHECK(std::abs(fit2.rms_residual - fit.rms_residual) < 1e-9);
}

TEST_CASE("fit_malus clamps epsilon at zero") {
    // cos^4 has no pedestal and the unconstrained offset is negative
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i <= 30; ++i) {
        const double a = deg_to_rad(3.0 * i);
        s.emplace_back(a, std::pow(std::cos(a), 4));
    }
    const auto fit = fit_malus(s);
    CHECK(fit.epsilon == 0.0);
    CHECK(fit.amplitude > 0.0);
}

TEST_CASE("uniform stream is reproducible and roughly uniform") {
    UniformStream a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 10000; ++i) {
        const double x = a.next();
        REQUIRE(x == b.next());
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        if (x != c.next()) differs = true;
    }
    CHECK(differs);

    UniformStream s(0);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += s.next();
    CHECK(std::abs(sum / n - 0.5) < 0.002);
}

TEST_CASE("uniform stream first draws are pinned") {
    // Guards the documented generator choice; changing it breaks recorded outputs.
    UniformStream s(0);
    std::mt19937_64 ref(0);
    CHECK(s.next() == static_cast<double>(ref() >> 11) * 0x1.0p-53);
    CHECK(derive_seed(7, 0) == (7ULL ^ splitmix64(0)));
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}
