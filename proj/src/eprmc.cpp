#include "polcascade/eprmc.hpp"

#include <cmath>
#include <stdexcept>

#include "polcascade/cascade.hpp"
#include "polcascade/parallel.hpp"

namespace polcascade {

void EprConfig::validate() const {
    if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
    polcascade::validate(law1);
    polcascade::validate(law2);
}

CoincidenceTally simulate_pairs(const EprConfig& config) {
    config.validate();
    UniformStream rng(config.seed);
    CoincidenceTally tally;
    tally.n_pairs = config.n_pairs;
    for (std::uint64_t i = 0; i < config.n_pairs; ++i) {
        const double lambda = kPi * rng.next();
        const bool first = rng.next() < evaluate(config.law1, lambda - config.alpha.rad());
        const bool second = rng.next() < evaluate(config.law2, lambda - config.beta.rad());
        if (first && second) {
            ++tally.n_coincidence;
        } else if (first) {
            ++tally.n_first_only;
        } else if (second) {
            ++tally.n_second_only;
        } else {
            ++tally.n_neither;
        }
    }
    return tally;
}

BinomialEstimate binomial_estimate(std::uint64_t successes, std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("binomial estimate needs n >= 1");
    if (successes > n) throw std::invalid_argument("successes exceed trials");
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

BinomialEstimate coincidence_estimate(const CoincidenceTally& tally) {
    return binomial_estimate(tally.n_coincidence, tally.n_pairs);
}

std::vector<EprCurvePoint> epr_curve(std::span<const double> relative_angles, std::uint64_t n_pairs,
                                     const ResponseLaw& law1, const ResponseLaw& law2, std::uint64_t seed,
                                     const EprCurveOptions& options) {
    if (relative_angles.empty()) throw std::invalid_argument("epr curve needs a non-empty angle grid");
    std::vector<EprCurvePoint> points(relative_angles.size());
    parallel_for(relative_angles.size(), options.threads, [&](std::size_t i) {
        const double angle = relative_angles[i];
        EprConfig config{n_pairs, Angle::radians(0.0), Angle::radians(angle), law1, law2, derive_seed(seed, i)};
        auto& pt = points[i];
        pt.relative_angle = angle;
        pt.tally = simulate_pairs(config);
        const auto est = coincidence_estimate(pt.tally);
        pt.p_hat = est.p_hat;
        pt.std_error = est.std_error;
        pt.p_quadrature = hv_two(angle, law1, law2, options.quadrature_tol);
    });
    return points;
}

}  // namespace polcascade
