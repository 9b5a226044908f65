#include "polcascade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polcascade/parallel.hpp"

namespace polcascade {

CascadeSpec CascadeSpec::uniform(std::vector<Angle> axes, const ResponseLaw& law, InputConvention input) {
    CascadeSpec spec;
    spec.responses.assign(axes.size(), law);
    spec.axes = std::move(axes);
    spec.input = input;
    return spec;
}

void CascadeSpec::validate() const {
    if (axes.empty()) throw std::invalid_argument("cascade needs at least one polarizer");
    if (axes.size() != responses.size()) {
        throw std::invalid_argument("cascade needs exactly one response law per polarizer");
    }
    if (axes.front().rad() != 0.0) {
        throw std::invalid_argument("the first polarizer axis is the reference and must be 0");
    }
    for (const auto& law : responses) polcascade::validate(law);
}

double hv_two(double alpha, const ResponseLaw& p1, const ResponseLaw& p2, double tol) {
    validate(p1);
    validate(p2);
    const auto r = integrate_period(
        [&](double lambda) { return evaluate(p1, lambda) * evaluate(p2, lambda - alpha); }, tol);
    return std::clamp(r.value, 0.0, 1.0);
}

double hv_cascade(const CascadeSpec& spec, double tol) {
    spec.validate();
    if (spec.input != InputConvention::UnpolarizedUniformLambda) {
        throw std::invalid_argument("hidden-variable cascades require unpolarized (uniform lambda) input");
    }
    const auto r = integrate_period(
        [&](double lambda) {
            double p = 1.0;
            for (std::size_t i = 0; i < spec.axes.size() && p > 0.0; ++i) {
                p *= evaluate(spec.responses[i], lambda - spec.axes[i].rad());
            }
            return p;
        },
        tol);
    return std::clamp(r.value, 0.0, 1.0);
}

double qm_three(double alpha, double beta) {
    const double c1 = std::cos(alpha);
    const double c2 = std::cos(alpha - beta);
    return c1 * c1 * c2 * c2;
}

double qm_cascade(const CascadeSpec& spec) {
    spec.validate();
    if (spec.input != InputConvention::PolarizedAlongFirstAxis) {
        throw std::invalid_argument("QM cascades take input polarized along the first axis");
    }
    std::vector<double> eps(spec.responses.size(), 0.0);
    for (std::size_t i = 0; i < spec.responses.size(); ++i) {
        const auto& law = spec.responses[i];
        if (const auto* m = std::get_if<GeneralizedMalus>(&law)) {
            eps[i] = m->epsilon;
        } else if (!std::holds_alternative<IdealMalus>(law)) {
            throw std::invalid_argument("QM cascade accepts only Malus response laws, got " + describe(law));
        }
    }
    double p = 1.0;
    for (std::size_t i = 1; i < spec.axes.size(); ++i) {
        p *= malus(spec.axes[i].rad() - spec.axes[i - 1].rad(), eps[i]);
    }
    return p;
}

std::string_view to_string(Theory t) { return t == Theory::QM ? "qm" : "hv"; }

double three_polarizer_transmission(const SweepModel& model, double alpha, double beta, double quadrature_tol) {
    if (const auto* qm = std::get_if<QmModel>(&model)) {
        return malus(alpha, qm->epsilon) * malus(beta - alpha, qm->epsilon);
    }
    const auto& hv = std::get<HvModel>(model);
    const auto r = integrate_period(
        [&](double lambda) {
            return evaluate(hv.first, lambda) * evaluate(hv.second, lambda - alpha) *
                   evaluate(hv.third, lambda - beta);
        },
        quadrature_tol);
    return std::clamp(r.value, 0.0, 1.0);
}

namespace {

void validate_model(const SweepModel& model) {
    if (const auto* qm = std::get_if<QmModel>(&model)) {
        validate(GeneralizedMalus{qm->epsilon});
    } else {
        const auto& hv = std::get<HvModel>(model);
        validate(hv.first);
        validate(hv.second);
        validate(hv.third);
    }
}

SweepRow sweep_one(const Angle& alpha, const SweepModel& model, const SweepOptions& options) {
    auto f = [&](double beta) {
        return three_polarizer_transmission(model, alpha.rad(), beta, options.quadrature_tol);
    };
    const std::size_t n = options.coarse_points;
    const double step = kPi / static_cast<double>(n - 1);
    std::size_t best_k = 0;
    double best_value = f(0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double v = f(k * step);
        if (v < best_value) {
            best_value = v;
            best_k = k;
        }
    }
    const double centre = best_k * step;
    auto refined = minimize_scalar(f, centre - step, centre + step, options.beta_tol);
    double beta = centre;
    if (refined.min_value <= best_value) {
        beta = refined.argmin;
        best_value = refined.min_value;
    }
    return SweepRow{alpha, Angle::radians(beta), std::clamp(best_value, 0.0, 1.0),
                    std::holds_alternative<QmModel>(model) ? Theory::QM : Theory::HV};
}

}  // namespace

std::vector<SweepRow> min_beta_sweep(std::span<const Angle> alpha_grid, const SweepModel& model,
                                     const SweepOptions& options) {
    if (alpha_grid.empty()) throw std::invalid_argument("sweep needs a non-empty alpha grid");
    if (!(options.quadrature_tol > 0.0) || !(options.beta_tol > 0.0)) {
        throw std::invalid_argument("sweep tolerances must be > 0");
    }
    if (options.coarse_points < 3) throw std::invalid_argument("sweep needs at least 3 coarse beta points");
    validate_model(model);

    std::vector<SweepRow> rows(alpha_grid.size());
    parallel_for(alpha_grid.size(), options.threads,
                 [&](std::size_t i) { rows[i] = sweep_one(alpha_grid[i], model, options); });
    return rows;
}

}  // namespace polcascade
