#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polcascade/model.hpp"
#include "polcascade/numerics.hpp"

namespace polcascade {

struct EprConfig {
    std::uint64_t n_pairs = 1;
    Angle alpha;  // first analyzer axis
    Angle beta;   // second analyzer axis
    ResponseLaw law1 = HvStep{};
    ResponseLaw law2 = HvStep{};
    std::uint64_t seed = 0;

    void validate() const;
};

struct CoincidenceTally {
    std::uint64_t n_pairs = 0;
    std::uint64_t n_coincidence = 0;
    std::uint64_t n_first_only = 0;
    std::uint64_t n_second_only = 0;
    std::uint64_t n_neither = 0;

    std::uint64_t first_passed() const { return n_coincidence + n_first_only; }
    std::uint64_t second_passed() const { return n_coincidence + n_second_only; }

    friend bool operator==(const CoincidenceTally&, const CoincidenceTally&) = default;
};

/// Each pair shares a hidden polarization l drawn uniformly on [0, pi); photon 1
/// passes with probability law1(l - alpha), photon 2 independently with
/// probability law2(l - beta). Three uniform draws per pair, in that order.
CoincidenceTally simulate_pairs(const EprConfig& config);

struct BinomialEstimate {
    double p_hat = 0.0;
    double std_error = 0.0;
};

/// Coincidence fraction and its binomial standard error.
BinomialEstimate coincidence_estimate(const CoincidenceTally& tally);

/// Same estimator applied to an arbitrary count out of n.
BinomialEstimate binomial_estimate(std::uint64_t successes, std::uint64_t n);

struct EprCurvePoint {
    double relative_angle = 0.0;  // radians, as given in the grid
    double p_hat = 0.0;
    double std_error = 0.0;
    double p_quadrature = 0.0;
    CoincidenceTally tally;
};

struct EprCurveOptions {
    double quadrature_tol = kDefaultQuadratureTol;
    unsigned threads = 1;
};

/// One simulate_pairs run per relative angle (alpha = 0, beta = angle) with
/// seed derive_seed(seed, index), plus the hv_two quadrature prediction.
std::vector<EprCurvePoint> epr_curve(std::span<const double> relative_angles, std::uint64_t n_pairs,
                                     const ResponseLaw& law1, const ResponseLaw& law2, std::uint64_t seed,
                                     const EprCurveOptions& options = {});

}  // namespace polcascade
