#include "polcascade/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace polcascade {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double fold_deviation(double angle) {
    require_finite(angle, "angle");
    if (angle > -kHalfPi && angle <= kHalfPi) return angle;
    double r = std::fmod(angle, kPi);
    if (r < 0.0) r += kPi;
    // r in [0, pi); move the upper half down so the result lies in (-pi/2, pi/2].
    if (r > kHalfPi) r -= kPi;
    return r;
}

double canonical_axis(double angle) {
    require_finite(angle, "angle");
    if (angle >= 0.0 && angle < kPi) return angle;
    double r = std::fmod(angle, kPi);
    if (r < 0.0) r += kPi;
    if (r >= kPi) r = 0.0;  // fmod rounding on values just below a multiple of pi
    return r;
}

void HvResponseParams::validate() const {
    if (!(std::isfinite(a) && a > 0.0)) throw std::invalid_argument("hv.a must be > 0");
    if (!(std::isfinite(e) && e > 0.0)) throw std::invalid_argument("hv.e must be > 0");
    if (!(std::isfinite(c) && c >= 0.0)) throw std::invalid_argument("hv.c must be >= 0");
}

double malus(double deviation, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in [0, 1]");
    }
    const double c = std::cos(fold_deviation(deviation));
    return (1.0 - epsilon) * c * c + epsilon;
}

double hv_response(double deviation, const HvResponseParams& params) {
    params.validate();
    const double lambda = std::abs(fold_deviation(deviation));
    const double x = std::exp(-params.a * std::pow(lambda, params.e));
    const double p = 1.0 - (1.0 - x) / (1.0 + params.c * x);
    return std::clamp(p, 0.0, 1.0);
}

TabulatedResponse::TabulatedResponse(std::vector<Point> grid) : grid_(std::move(grid)) {
    if (grid_.size() < 2) {
        throw std::invalid_argument("tabulated response needs at least two points");
    }
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const auto [d, p] = grid_[i];
        if (!std::isfinite(d) || d < 0.0 || d > kHalfPi + 1e-12) {
            throw std::invalid_argument("tabulated deviations must lie in [0, pi/2]");
        }
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("tabulated probabilities must lie in [0, 1]");
        }
        if (i > 0 && !(d > grid_[i - 1].first)) {
            throw std::invalid_argument("tabulated deviations must be strictly increasing");
        }
    }
}

Evaluation TabulatedResponse::evaluate(double deviation) const {
    const double d = std::abs(fold_deviation(deviation));
    if (d <= grid_.front().first) {
        return {grid_.front().second, d < grid_.front().first};
    }
    if (d >= grid_.back().first) {
        return {grid_.back().second, d > grid_.back().first};
    }
    const auto hi = std::upper_bound(grid_.begin(), grid_.end(), d,
                                     [](double v, const Point& pt) { return v < pt.first; });
    const auto lo = hi - 1;
    const double t = (d - lo->first) / (hi->first - lo->first);
    return {std::clamp(lo->second + t * (hi->second - lo->second), 0.0, 1.0), false};
}

void validate(const ResponseLaw& law) {
    std::visit(overloaded{
                   [](const IdealMalus&) {},
                   [](const GeneralizedMalus& m) {
                       if (!(m.epsilon >= 0.0 && m.epsilon <= 1.0)) {
                           throw std::invalid_argument("epsilon must lie in [0, 1]");
                       }
                   },
                   [](const HvStep& h) { h.params.validate(); },
                   [](const TabulatedResponse&) {},  // validated on construction
               },
               law);
}

Evaluation evaluate_detailed(const ResponseLaw& law, double deviation) {
    return std::visit(overloaded{
                          [&](const IdealMalus&) { return Evaluation{malus(deviation, 0.0), false}; },
                          [&](const GeneralizedMalus& m) {
                              return Evaluation{malus(deviation, m.epsilon), false};
                          },
                          [&](const HvStep& h) { return Evaluation{hv_response(deviation, h.params), false}; },
                          [&](const TabulatedResponse& t) { return t.evaluate(deviation); },
                      },
                      law);
}

std::string describe(const ResponseLaw& law) {
    char buf[128];
    std::visit(overloaded{
                   [&](const IdealMalus&) { std::snprintf(buf, sizeof buf, "malus(eps=0)"); },
                   [&](const GeneralizedMalus& m) {
                       std::snprintf(buf, sizeof buf, "malus(eps=%.12g)", m.epsilon);
                   },
                   [&](const HvStep& h) {
                       std::snprintf(buf, sizeof buf, "hv(a=%.12g,e=%.12g,c=%.12g)", h.params.a, h.params.e,
                                     h.params.c);
                   },
                   [&](const TabulatedResponse& t) {
                       std::snprintf(buf, sizeof buf, "table(%zu points)", t.grid().size());
                   },
               },
               law);
    return buf;
}

TabulatedResponse constant_response(double k) {
    return TabulatedResponse({{0.0, k}, {kHalfPi, k}});
}

}  // namespace polcascade
