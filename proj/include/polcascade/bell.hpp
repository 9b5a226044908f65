#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "polcascade/model.hpp"

namespace polcascade {

using ComplexMatrix = Eigen::MatrixXcd;

/// Analyzer settings alpha, alpha', beta, beta'.
struct BellSettings {
    Angle alpha;
    Angle alpha_prime;
    Angle beta;
    Angle beta_prime;

    static BellSettings degrees(double a, double a2, double b, double b2) {
        return {Angle::degrees(a), Angle::degrees(a2), Angle::degrees(b), Angle::degrees(b2)};
    }
};

/// Settings (0, 45, 22.5, 157.5) degrees that maximize the correlation form for E = cos 2theta.
BellSettings optimal_chsh_settings();

enum class CommutationScenario {
    Classical,    // all four observables diagonal in one basis
    TensorLocal,  // a's act on the first tensor factor, b's on the second
    Free,         // no commutation constraint
};

std::string_view to_string(CommutationScenario s);
/// Accepts "classical", "tensor" / "tensorlocal", "free".
std::optional<CommutationScenario> parse_scenario(std::string_view name);

/// Self-adjoint matrix with spectrum in {+1, -1}.
class HermitianInvolution {
public:
    /// Throws std::invalid_argument unless m is square, Hermitian and squares
    /// to the identity, each within `tol` in max-norm.
    explicit HermitianInvolution(ComplexMatrix m, double tol = 1e-10);

    static HermitianInvolution identity(std::size_t dimension);

    const ComplexMatrix& matrix() const { return m_; }
    std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }

    /// max(|H - H^dagger|, |H^2 - I|) in max-norm.
    double defect() const;

private:
    ComplexMatrix m_;
};

/// p1(a) p2(b) + p1(a) p2(b') + p1(a') p2(b) - p1(a') p2(b'), the combination
/// of single-polarizer probabilities.
constexpr double bell_combination(double pa, double pa2, double pb, double pb2) {
    return pa * pb + pa * pb2 + pa2 * pb - pa2 * pb2;
}

/// Correlation form E(a,b) + E(a,b') + E(a',b) - E(a',b').
constexpr double chsh_sum(double e_ab, double e_ab2, double e_a2b, double e_a2b2) {
    return e_ab + e_ab2 + e_a2b - e_a2b2;
}

/// Maximum of bell_combination over all arguments drawn from `levels`
/// (levels^4 vertices).
double max_over_vertices(std::span<const double> levels);

/// Maximum of bell_combination over the 16 vertices of {0,1}^4; always 2.
double classical_max();

/// cos(2 theta) for equally polarized photon pairs.
double qm_pair_correlation(double relative_angle);

/// chsh_sum of correlation(alpha - beta), (alpha - beta'), (alpha' - beta), (alpha' - beta').
double chsh_from_correlations(const BellSettings& settings, const std::function<double(double)>& correlation);

/// Operator norm (largest singular value) of B = a1 b1 + a2 b1 + a1 b2 - a2 b2.
double bell_operator_norm(const HermitianInvolution& a1, const HermitianInvolution& a2,
                          const HermitianInvolution& b1, const HermitianInvolution& b2);

/// Witness a1 = Z(x)I, a2 = X(x)I, b1 = I(x)(Z+X)/sqrt2, b2 = I(x)(Z-X)/sqrt2.
std::array<HermitianInvolution, 4> tensor_witness();

/// U = product over pairs i < j of two-level rotations
/// [[cos t, -e^{i phi} sin t], [e^{-i phi} sin t, cos t]] acting on (i, j);
/// `params` holds (t, phi) per pair in row-major pair order, d(d-1) values.
ComplexMatrix unitary_from_rotations(std::size_t dimension, std::span<const double> params);

struct BellSearchResult {
    CommutationScenario scenario = CommutationScenario::Classical;
    std::size_t dimension = 0;
    double achieved_max = 0.0;
    std::vector<HermitianInvolution> witness;  // a1, a2, b1, b2
    std::size_t restarts_used = 0;
    std::size_t best_restart = 0;
};

struct BellSearchOptions {
    unsigned threads = 1;
    std::size_t max_iterations = 20000;  // per simplex run
    std::size_t polish_rounds = 3;       // simplex restarts from the incumbent
};

/// Largest commutator (max-norm) the scenario requires to vanish: all six
/// pairs for Classical, the four cross pairs [a_i, b_j] for TensorLocal, 0 for Free.
double scenario_violation(CommutationScenario scenario, std::span<const HermitianInvolution> witness);

/// Maximizes the Bell operator norm over involutions admissible under
/// `scenario`, from `restarts` seeded random starts. Each restart draws a
/// signature for every observable and runs a Nelder-Mead simplex over the
/// rotation angles of its diagonalizing unitary (Classical: greedy sign flips
/// over diagonal matrices). Supported dimensions: 2, 4, 8; TensorLocal needs
/// an even dimension and splits it as 2 (x) d/2. The result is the maximum
/// over restarts, ties broken by the lowest restart index, so it does not
/// depend on the thread count.
BellSearchResult search_operator_max(CommutationScenario scenario, std::size_t dimension, std::size_t restarts,
                                     std::uint64_t seed, const BellSearchOptions& options = {});

}  // namespace polcascade
