#include "polcascade/bell.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>

#include "polcascade/numerics.hpp"
#include "polcascade/parallel.hpp"

namespace polcascade {

using Complex = std::complex<double>;

BellSettings optimal_chsh_settings() { return BellSettings::degrees(0.0, 45.0, 22.5, 157.5); }

std::string_view to_string(CommutationScenario s) {
    switch (s) {
        case CommutationScenario::Classical: return "classical";
        case CommutationScenario::TensorLocal: return "tensor";
        case CommutationScenario::Free: return "free";
    }
    return "unknown";
}

std::optional<CommutationScenario> parse_scenario(std::string_view name) {
    if (name == "classical") return CommutationScenario::Classical;
    if (name == "tensor" || name == "tensorlocal") return CommutationScenario::TensorLocal;
    if (name == "free") return CommutationScenario::Free;
    return std::nullopt;
}

HermitianInvolution::HermitianInvolution(ComplexMatrix m, double tol) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
        throw std::invalid_argument("involution must be a non-empty square matrix");
    }
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("involution must be Hermitian");
    }
    const auto id = ComplexMatrix::Identity(m_.rows(), m_.cols());
    if ((m_ * m_ - id).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("involution must square to the identity");
    }
}

HermitianInvolution HermitianInvolution::identity(std::size_t dimension) {
    const auto d = static_cast<Eigen::Index>(dimension);
    return HermitianInvolution(ComplexMatrix::Identity(d, d));
}

double HermitianInvolution::defect() const {
    const auto id = ComplexMatrix::Identity(m_.rows(), m_.cols());
    return std::max((m_ - m_.adjoint()).cwiseAbs().maxCoeff(), (m_ * m_ - id).cwiseAbs().maxCoeff());
}

double max_over_vertices(std::span<const double> levels) {
    if (levels.empty()) throw std::invalid_argument("need at least one level");
    double best = -INFINITY;
    for (double pa : levels)
        for (double pa2 : levels)
            for (double pb : levels)
                for (double pb2 : levels) best = std::max(best, bell_combination(pa, pa2, pb, pb2));
    return best;
}

double classical_max() {
    constexpr std::array<double, 2> kVertex = {0.0, 1.0};
    return max_over_vertices(kVertex);
}

double qm_pair_correlation(double relative_angle) { return std::cos(2.0 * canonical_axis(relative_angle)); }

double chsh_from_correlations(const BellSettings& s, const std::function<double(double)>& correlation) {
    return chsh_sum(correlation(s.alpha.rad() - s.beta.rad()), correlation(s.alpha.rad() - s.beta_prime.rad()),
                    correlation(s.alpha_prime.rad() - s.beta.rad()),
                    correlation(s.alpha_prime.rad() - s.beta_prime.rad()));
}

namespace {

double operator_norm(const ComplexMatrix& a1, const ComplexMatrix& a2, const ComplexMatrix& b1,
                     const ComplexMatrix& b2) {
    const ComplexMatrix b = (a1 + a2) * b1 + (a1 - a2) * b2;
    const ComplexMatrix btb = b.adjoint() * b;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(btb, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

ComplexMatrix kron(const ComplexMatrix& x, const ComplexMatrix& y) {
    ComplexMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

double commutator(const ComplexMatrix& x, const ComplexMatrix& y) {
    return (x * y - y * x).cwiseAbs().maxCoeff();
}

}  // namespace

double bell_operator_norm(const HermitianInvolution& a1, const HermitianInvolution& a2,
                          const HermitianInvolution& b1, const HermitianInvolution& b2) {
    const auto d = a1.dimension();
    if (a2.dimension() != d || b1.dimension() != d || b2.dimension() != d) {
        throw std::invalid_argument("Bell operator needs observables of equal dimension");
    }
    return operator_norm(a1.matrix(), a2.matrix(), b1.matrix(), b2.matrix());
}

std::array<HermitianInvolution, 4> tensor_witness() {
    ComplexMatrix z(2, 2), x(2, 2);
    z << 1, 0, 0, -1;
    x << 0, 1, 1, 0;
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    return {HermitianInvolution(kron(z, id)), HermitianInvolution(kron(x, id)),
            HermitianInvolution(kron(id, r * (z + x))), HermitianInvolution(kron(id, r * (z - x)))};
}

ComplexMatrix unitary_from_rotations(std::size_t dimension, std::span<const double> params) {
    const auto d = static_cast<Eigen::Index>(dimension);
    if (params.size() != dimension * (dimension - 1)) {
        throw std::invalid_argument("unitary parametrization needs d(d-1) angles");
    }
    ComplexMatrix u = ComplexMatrix::Identity(d, d);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double c = std::cos(params[k]);
            const double s = std::sin(params[k]);
            const Complex phase = std::polar(1.0, params[k + 1]);
            k += 2;
            for (Eigen::Index r = 0; r < d; ++r) {
                const Complex ui = u(r, i);
                const Complex uj = u(r, j);
                u(r, i) = ui * c + uj * std::conj(phase) * s;
                u(r, j) = -ui * phase * s + uj * c;
            }
        }
    }
    return u;
}

double scenario_violation(CommutationScenario scenario, std::span<const HermitianInvolution> w) {
    if (w.size() != 4) throw std::invalid_argument("witness must hold four observables");
    double worst = 0.0;
    switch (scenario) {
        case CommutationScenario::Classical:
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = i + 1; j < 4; ++j)
                    worst = std::max(worst, commutator(w[i].matrix(), w[j].matrix()));
            break;
        case CommutationScenario::TensorLocal:
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 2; j < 4; ++j)
                    worst = std::max(worst, commutator(w[i].matrix(), w[j].matrix()));
            break;
        case CommutationScenario::Free:
            break;
    }
    return worst;
}

namespace {

using Signature = std::vector<double>;

Signature draw_signature(std::size_t d, UniformStream& rng) {
    Signature sig(d);
    if (d % 2 == 0 && rng.next() < 0.5) {
        for (std::size_t i = 0; i < d; ++i) sig[i] = i < d / 2 ? 1.0 : -1.0;
        for (std::size_t i = d - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.next() * static_cast<double>(i + 1));
            std::swap(sig[i], sig[std::min(j, i)]);
        }
    } else {
        for (auto& s : sig) s = rng.next() < 0.5 ? 1.0 : -1.0;
    }
    return sig;
}

ComplexMatrix involution_from(std::size_t d, const Signature& sig, std::span<const double> params) {
    const ComplexMatrix u = unitary_from_rotations(d, params);
    ComplexMatrix diag = ComplexMatrix::Zero(u.rows(), u.cols());
    for (std::size_t i = 0; i < d; ++i) diag(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = sig[i];
    return u * diag * u.adjoint();
}

// Continuous search space for the TensorLocal and Free scenarios.
struct Layout {
    CommutationScenario scenario;
    std::size_t dimension;
    std::size_t dim_a;  // dimension each a-observable is built in
    std::size_t dim_b;
    std::array<Signature, 4> signatures;

    std::size_t params_for(std::size_t op) const {
        const std::size_t d = op < 2 ? dim_a : dim_b;
        return d * (d - 1);
    }
    std::size_t size() const {
        std::size_t n = 0;
        for (std::size_t op = 0; op < 4; ++op) n += params_for(op);
        return n;
    }

    std::array<ComplexMatrix, 4> build(std::span<const double> x) const {
        std::array<ComplexMatrix, 4> ops;
        std::size_t offset = 0;
        for (std::size_t op = 0; op < 4; ++op) {
            const std::size_t d = op < 2 ? dim_a : dim_b;
            const std::size_t n = params_for(op);
            ops[op] = involution_from(d, signatures[op], x.subspan(offset, n));
            offset += n;
        }
        if (scenario == CommutationScenario::TensorLocal) {
            const ComplexMatrix id_a = ComplexMatrix::Identity(dim_a, dim_a);
            const ComplexMatrix id_b = ComplexMatrix::Identity(dim_b, dim_b);
            ops[0] = kron(ops[0], id_b);
            ops[1] = kron(ops[1], id_b);
            ops[2] = kron(id_a, ops[2]);
            ops[3] = kron(id_a, ops[3]);
        }
        return ops;
    }

    double norm(std::span<const double> x) const {
        const auto ops = build(x);
        return operator_norm(ops[0], ops[1], ops[2], ops[3]);
    }
};

struct RestartOutcome {
    double value = -1.0;
    std::array<ComplexMatrix, 4> ops;
};

double negated_norm(const gsl_vector* v, void* ctx) {
    const auto* layout = static_cast<const Layout*>(ctx);
    return -layout->norm(std::span<const double>(v->data, v->size));
}

struct GslVectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
    void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

// One Nelder-Mead run from x with uniform initial step; x is updated in place.
void simplex_run(const Layout& layout, std::vector<double>& x, double step, std::size_t max_iterations) {
    const std::size_t n = x.size();
    std::unique_ptr<gsl_vector, GslVectorDeleter> start(gsl_vector_alloc(n));
    std::unique_ptr<gsl_vector, GslVectorDeleter> steps(gsl_vector_alloc(n));
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(start.get(), i, x[i]);
    gsl_vector_set_all(steps.get(), step);

    gsl_multimin_function fn{&negated_norm, n, const_cast<Layout*>(&layout)};
    std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter> minimizer(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
    gsl_multimin_fminimizer_set(minimizer.get(), &fn, start.get(), steps.get());

    // Stop when the simplex collapses or the best value stalls; the objective
    // has flat directions (e.g. phases of degenerate eigenspaces).
    constexpr std::size_t kStallWindow = 400;
    double best_f = gsl_multimin_fminimizer_minimum(minimizer.get());
    std::size_t last_gain = 0;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(minimizer.get()), 1e-11) == GSL_SUCCESS) break;
        const double f = gsl_multimin_fminimizer_minimum(minimizer.get());
        if (f < best_f - 1e-15) {
            best_f = f;
            last_gain = it;
        } else if (it - last_gain > kStallWindow) {
            break;
        }
    }
    const gsl_vector* best = gsl_multimin_fminimizer_x(minimizer.get());
    for (std::size_t i = 0; i < n; ++i) x[i] = gsl_vector_get(best, i);
}

RestartOutcome continuous_restart(CommutationScenario scenario, std::size_t dimension, UniformStream rng,
                                  const BellSearchOptions& options) {
    Layout layout{scenario, dimension, dimension, dimension, {}};
    if (scenario == CommutationScenario::TensorLocal) {
        layout.dim_a = 2;
        layout.dim_b = dimension / 2;
    }
    for (std::size_t op = 0; op < 4; ++op) {
        layout.signatures[op] = draw_signature(op < 2 ? layout.dim_a : layout.dim_b, rng);
    }

    std::vector<double> x(layout.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = (i % 2 == 0 ? kPi : 2.0 * kPi) * rng.next();
    }
    RestartOutcome out;
    if (!x.empty()) {
        simplex_run(layout, x, 0.5, options.max_iterations);
        double step = 0.05;
        for (std::size_t round = 0; round < options.polish_rounds; ++round, step *= 0.1) {
            simplex_run(layout, x, step, options.max_iterations);
        }
    }
    out.ops = layout.build(x);
    out.value = operator_norm(out.ops[0], out.ops[1], out.ops[2], out.ops[3]);
    return out;
}

RestartOutcome classical_restart(std::size_t dimension, UniformStream rng) {
    std::array<Signature, 4> diag;
    for (auto& s : diag) s = draw_signature(dimension, rng);
    auto to_matrix = [&](const Signature& s) {
        ComplexMatrix m = ComplexMatrix::Zero(dimension, dimension);
        for (std::size_t i = 0; i < dimension; ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = s[i];
        }
        return m;
    };
    auto value = [&] {
        return operator_norm(to_matrix(diag[0]), to_matrix(diag[1]), to_matrix(diag[2]), to_matrix(diag[3]));
    };

    double current = value();
    for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t op = 0; op < 4; ++op) {
            for (std::size_t i = 0; i < dimension; ++i) {
                diag[op][i] = -diag[op][i];
                const double v = value();
                if (v > current + 1e-12) {
                    current = v;
                    improved = true;
                } else {
                    diag[op][i] = -diag[op][i];
                }
            }
        }
    }
    RestartOutcome out;
    for (std::size_t op = 0; op < 4; ++op) out.ops[op] = to_matrix(diag[op]);
    out.value = current;
    return out;
}

}  // namespace

BellSearchResult search_operator_max(CommutationScenario scenario, std::size_t dimension, std::size_t restarts,
                                     std::uint64_t seed, const BellSearchOptions& options) {
    if (dimension != 2 && dimension != 4 && dimension != 8) {
        throw std::invalid_argument("unsupported dimension " + std::to_string(dimension) + " (expected 2, 4 or 8)");
    }
    if (scenario == CommutationScenario::TensorLocal && dimension < 4) {
        throw std::invalid_argument("tensor-local scenario needs dimension 4 or 8");
    }
    if (restarts < 1) throw std::invalid_argument("need at least one restart");

    std::vector<RestartOutcome> outcomes(restarts);
    parallel_for(restarts, options.threads, [&](std::size_t r) {
        UniformStream rng(derive_seed(seed, r));
        outcomes[r] = scenario == CommutationScenario::Classical
                          ? classical_restart(dimension, rng)
                          : continuous_restart(scenario, dimension, rng, options);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        if (outcomes[r].value > outcomes[best].value) best = r;
    }

    BellSearchResult result;
    result.scenario = scenario;
    result.dimension = dimension;
    result.achieved_max = outcomes[best].value;
    result.restarts_used = restarts;
    result.best_restart = best;
    for (auto& m : outcomes[best].ops) result.witness.emplace_back(std::move(m), 1e-8);
    return result;
}

}  // namespace polcascade
