#include "polcascade/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace polcascade {

FitResult fit_malus(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 3) throw std::invalid_argument("fit_malus needs at least 3 samples");

    const double n = static_cast<double>(samples.size());
    double mean_m = 0.0;
    double mean_y = 0.0;
    for (const auto& [angle, y] : samples) {
        if (!std::isfinite(angle) || !std::isfinite(y)) {
            throw std::invalid_argument("fit_malus samples must be finite");
        }
        const double c = std::cos(angle);
        mean_m += c * c;
        mean_y += y;
    }
    mean_m /= n;
    mean_y /= n;

    double var_m = 0.0;
    double cov = 0.0;
    for (const auto& [angle, y] : samples) {
        const double c = std::cos(angle);
        const double dm = c * c - mean_m;
        var_m += dm * dm;
        cov += dm * (y - mean_y);
    }
    if (var_m <= 1e-24 * n) {
        throw std::invalid_argument("fit_malus samples are degenerate (all angles equivalent)");
    }

    // Linear model y = slope * cos^2 + offset with slope = A(1 - eps), offset = A eps.
    double slope = cov / var_m;
    double offset = mean_y - slope * mean_m;

    FitResult fit;
    const double scale = std::abs(slope) + std::abs(offset);
    if (slope <= 1e-14 * scale) {
        // eps >= 1 in the unconstrained fit: pedestal only.
        fit.epsilon = 1.0;
        fit.amplitude = mean_y;
    } else if (offset < 0.0) {
        double sym = 0.0;
        double smm = 0.0;
        for (const auto& [angle, y] : samples) {
            const double c = std::cos(angle);
            sym += y * c * c;
            smm += c * c * c * c;
        }
        fit.epsilon = 0.0;
        fit.amplitude = sym / smm;
    } else {
        fit.amplitude = slope + offset;
        fit.epsilon = offset / fit.amplitude;
    }
    if (!(fit.amplitude > 0.0)) {
        throw std::invalid_argument("fit_malus: best amplitude is not positive");
    }

    double sup = 0.0;
    double ss = 0.0;
    for (const auto& [angle, y] : samples) {
        const double c = std::cos(angle);
        const double model = fit.amplitude * ((1.0 - fit.epsilon) * c * c + fit.epsilon);
        const double r = std::abs(y - model);
        sup = std::max(sup, r);
        ss += r * r;
    }
    fit.sup_residual = sup / fit.amplitude;
    fit.rms_residual = std::sqrt(ss / n) / fit.amplitude;
    return fit;
}

}  // namespace polcascade
