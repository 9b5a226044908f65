#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polcascade/model.hpp"

namespace polcascade {

inline constexpr double kDefaultQuadratureTol = 1e-10;
inline constexpr std::size_t kDefaultQuadratureBudget = 1'000'000;

struct QuadratureResult {
    double value = 0.0;
    double estimated_error = 0.0;
    std::size_t evaluations = 0;
};

/// Thrown when adaptive quadrature runs out of its evaluation budget.
/// Carries the best estimate reached so far.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(QuadratureResult best, double tol)
        : std::runtime_error("quadrature evaluation budget exceeded (estimated error " +
                             std::to_string(best.estimated_error) + " > tol " + std::to_string(tol) + ")"),
          best_(best) {}

    const QuadratureResult& best_estimate() const { return best_; }

private:
    QuadratureResult best_;
};

namespace detail {

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 7> kGaussNodes = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
inline constexpr std::array<double, 7> kGaussWeights = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

template <class F>
double gauss7(F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
        sum += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
    }
    return sum * half;
}

struct Panel {
    double a, b;
    double left, right;  // rule applied to each half
    double error;        // |whole - (left + right)|
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

/// Adaptive composite 7-point Gauss-Legendre estimate of (1/pi) * integral_0^pi f.
///
/// Each panel is compared against the sum over its two halves; the panel with
/// the largest discrepancy is bisected until the summed discrepancy (after the
/// 1/pi normalization) is at most `tol`. The reported value uses the refined
/// halves, so `estimated_error` is conservative.
template <class F>
QuadratureResult integrate_period(F&& f, double tol = kDefaultQuadratureTol,
                                  std::size_t budget = kDefaultQuadratureBudget) {
    if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be > 0");
    constexpr std::size_t kInitialPanels = 16;
    constexpr std::size_t kRule = detail::kGaussNodes.size();

    std::size_t evaluations = 0;
    auto counted = [&](double x) {
        ++evaluations;
        return static_cast<double>(f(x));
    };
    auto make_panel = [&](double a, double b, double whole) {
        const double m = 0.5 * (a + b);
        detail::Panel p{a, b, detail::gauss7(counted, a, m), detail::gauss7(counted, m, b), 0.0};
        p.error = std::abs(whole - (p.left + p.right));
        return p;
    };

    std::priority_queue<detail::Panel> panels;
    double total = 0.0;
    double total_error = 0.0;
    const double width = kPi / kInitialPanels;
    for (std::size_t i = 0; i < kInitialPanels; ++i) {
        const double a = i * width;
        const double b = (i + 1 == kInitialPanels) ? kPi : a + width;
        auto p = make_panel(a, b, detail::gauss7(counted, a, b));
        total += p.left + p.right;
        total_error += p.error;
        panels.push(p);
    }

    auto result = [&] {
        // Re-sum from the heap to avoid drift from incremental updates.
        double value = 0.0;
        double err = 0.0;
        auto copy = panels;
        while (!copy.empty()) {
            value += copy.top().left + copy.top().right;
            err += copy.top().error;
            copy.pop();
        }
        return QuadratureResult{value / kPi, err / kPi, evaluations};
    };

    const double abs_tol = tol * kPi;
    while (total_error > abs_tol) {
        if (evaluations + 4 * kRule > budget) {
            throw BudgetExceeded(result(), tol);
        }
        const detail::Panel worst = panels.top();
        panels.pop();
        const double m = 0.5 * (worst.a + worst.b);
        auto lhs = make_panel(worst.a, m, worst.left);
        auto rhs = make_panel(m, worst.b, worst.right);
        total += (lhs.left + lhs.right + rhs.left + rhs.right) - (worst.left + worst.right);
        total_error += (lhs.error + rhs.error) - worst.error;
        panels.push(lhs);
        panels.push(rhs);
        // Incremental error sums can go slightly negative through cancellation.
        if (total_error <= abs_tol) {
            auto exact = result();
            if (exact.estimated_error <= tol) return exact;
            total_error = exact.estimated_error * kPi;
        }
    }
    return result();
}

struct MinimizeResult {
    double argmin = 0.0;
    double min_value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Golden-section search for a local minimum of f on [lo, hi]. The endpoints
/// are evaluated too, so a monotone f returns the lower endpoint value.
template <class F>
MinimizeResult minimize_scalar(F&& f, double lo, double hi, double tol, std::size_t max_iterations = 500) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
        throw std::invalid_argument("minimize_scalar: need finite lo < hi");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("minimize_scalar: tolerance must be > 0");

    constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
    MinimizeResult best{lo, static_cast<double>(f(lo)), 0, false};
    auto consider = [&](double x, double fx) {
        if (fx < best.min_value) {
            best.argmin = x;
            best.min_value = fx;
        }
    };
    consider(hi, f(hi));

    double a = lo;
    double b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    consider(c, fc);
    consider(d, fd);

    std::size_t it = 0;
    while (b - a > tol && it < max_iterations) {
        ++it;
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
            consider(d, fd);
        }
    }
    best.iterations = it;
    best.converged = (b - a) <= tol;
    return best;
}

struct FitResult {
    double amplitude = 0.0;
    double epsilon = 0.0;
    double sup_residual = 0.0;  // relative to amplitude
    double rms_residual = 0.0;  // relative to amplitude
};

/// Least-squares fit of A * [(1 - eps) cos^2(angle) + eps] to (angle, value)
/// samples, with eps restricted to [0, 1]. Flat data resolves to eps = 1.
FitResult fit_malus(std::span<const std::pair<double, double>> samples);

/// Seeded stream of doubles in [0, 1).
///
/// The generator is std::mt19937_64 seeded with the 64-bit seed; each draw
/// keeps the top 53 bits of one engine output. Both choices are fixed so that
/// recorded outputs stay reproducible.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-item seed: base seed XOR splitmix64(index).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ splitmix64(index);
}

}  // namespace polcascade
