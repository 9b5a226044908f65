#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "polcascade/model.hpp"
#include "polcascade/numerics.hpp"

namespace polcascade {

enum class InputConvention {
    UnpolarizedUniformLambda,  // hidden polarization uniform over one period
    PolarizedAlongFirstAxis,   // QM: condition on passing the first polarizer
};

/// Polarizers in beam order. The first axis is the reference and must be 0.
struct CascadeSpec {
    std::vector<Angle> axes;
    std::vector<ResponseLaw> responses;
    InputConvention input = InputConvention::UnpolarizedUniformLambda;

    /// Same law at every polarizer.
    static CascadeSpec uniform(std::vector<Angle> axes, const ResponseLaw& law, InputConvention input);

    /// Throws std::invalid_argument on an empty spec, mismatched lengths,
    /// a nonzero first axis or an invalid law.
    void validate() const;
};

/// Two polarizers in series (or in coincidence) under the hidden-variable model:
/// (1/pi) * integral_0^pi p1(l) p2(l - alpha) dl.
double hv_two(double alpha, const ResponseLaw& p1, const ResponseLaw& p2,
              double tol = kDefaultQuadratureTol);

/// Persistent-lambda cascade: (1/pi) * integral of prod_i p_i(l - theta_i).
/// Requires the unpolarized input convention.
double hv_cascade(const CascadeSpec& spec, double tol = kDefaultQuadratureTol);

/// Ideal three-polarizer QM transmission cos^2(alpha) cos^2(alpha - beta).
double qm_three(double alpha, double beta);

/// Product of generalized Malus links M(theta_i - theta_{i-1}), i >= 2, for
/// light already polarized along the first axis. Only Malus laws are accepted.
double qm_cascade(const CascadeSpec& spec);

enum class Theory { QM, HV };

std::string_view to_string(Theory t);

struct QmModel {
    double epsilon = 0.0;
};

/// Laws of the three polarizers, in beam order.
struct HvModel {
    ResponseLaw first = HvStep{};
    ResponseLaw second = HvStep{};
    ResponseLaw third = HvStep{};
};

using SweepModel = std::variant<QmModel, HvModel>;

struct SweepRow {
    Angle alpha;
    Angle beta_star;
    double p_min = 0.0;
    Theory model = Theory::QM;
};

struct SweepOptions {
    double quadrature_tol = kDefaultQuadratureTol;
    double beta_tol = 1e-7;   // width of the final golden-section bracket, radians
    std::size_t coarse_points = 181;
    unsigned threads = 1;
};

/// Three-polarizer transmission with axes (0, alpha, beta) under `model`.
double three_polarizer_transmission(const SweepModel& model, double alpha, double beta,
                                    double quadrature_tol = kDefaultQuadratureTol);

/// For each alpha, the beta in [0, pi) that minimizes the transmission through
/// axes (0, alpha, beta): coarse scan of `coarse_points` betas, then a
/// golden-section refinement of the best scan bracket. Rows follow grid order
/// regardless of the thread count.
std::vector<SweepRow> min_beta_sweep(std::span<const Angle> alpha_grid, const SweepModel& model,
                                     const SweepOptions& options = {});

}  // namespace polcascade
