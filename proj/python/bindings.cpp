#include <pybind11/pybind11.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include "polcascade/bell.hpp"
#include "polcascade/cascade.hpp"
#include "polcascade/eprmc.hpp"
#include "polcascade/model.hpp"
#include "polcascade/numerics.hpp"

namespace py = pybind11;
using namespace polcascade;

namespace {

std::vector<Angle> to_angles(const std::vector<double>& radians) {
    std::vector<Angle> out;
    out.reserve(radians.size());
    for (double r : radians) out.push_back(Angle::radians(r));
    return out;
}

}  // namespace

PYBIND11_MODULE(_polcascade, m) {
    m.doc() = "Polarizer cascade, hidden-variable and Bell-operator models";

    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

    // laws
    py::class_<IdealMalus>(m, "IdealMalus").def(py::init<>()).def("__repr__", [](const IdealMalus& l) {
        return describe(l);
    });
    py::class_<GeneralizedMalus>(m, "GeneralizedMalus")
        .def(py::init([](double eps) { return GeneralizedMalus{eps}; }), py::arg("epsilon"))
        .def_readwrite("epsilon", &GeneralizedMalus::epsilon)
        .def("__repr__", [](const GeneralizedMalus& l) { return describe(l); });
    py::class_<HvStep>(m, "HvStep")
        .def(py::init([](double a, double e, double c) { return HvStep{{a, e, c}}; }), py::arg("a") = 1.95,
             py::arg("e") = 3.56, py::arg("c") = 500.0)
        .def_property_readonly("a", [](const HvStep& s) { return s.params.a; })
        .def_property_readonly("e", [](const HvStep& s) { return s.params.e; })
        .def_property_readonly("c", [](const HvStep& s) { return s.params.c; })
        .def("__repr__", [](const HvStep& l) { return describe(l); });
    py::class_<TabulatedResponse>(m, "TabulatedResponse")
        .def(py::init<std::vector<TabulatedResponse::Point>>(), py::arg("grid"))
        .def_property_readonly("grid", &TabulatedResponse::grid)
        .def("__repr__", [](const TabulatedResponse& l) { return describe(l); });

    m.def("evaluate", [](const ResponseLaw& law, double d) { return evaluate(law, d); }, py::arg("law"),
          py::arg("deviation"));
    m.def("validate", [](const ResponseLaw& law) { validate(law); }, py::arg("law"));

    // model
    m.def("fold_deviation", &fold_deviation, py::arg("deviation"));
    m.def("malus", &malus, py::arg("deviation"), py::arg("epsilon") = 0.0);
    m.def(
        "hv_response",
        [](double d, double a, double e, double c) { return hv_response(d, {a, e, c}); }, py::arg("deviation"),
        py::arg("a") = 1.95, py::arg("e") = 3.56, py::arg("c") = 500.0);

    // numerics
    m.def(
        "integrate_period",
        [](const std::function<double(double)>& f, double tol, std::size_t budget) {
            const auto r = integrate_period(f, tol, budget);
            return py::make_tuple(r.value, r.estimated_error, r.evaluations);
        },
        py::arg("f"), py::arg("tol") = kDefaultQuadratureTol, py::arg("budget") = kDefaultQuadratureBudget,
        "(1/pi) * integral of f over [0, pi); returns (value, error estimate, evaluations).");
    m.def(
        "fit_malus",
        [](const std::vector<std::pair<double, double>>& samples) {
            const auto r = fit_malus(samples);
            py::dict d;
            d["amplitude"] = r.amplitude;
            d["epsilon"] = r.epsilon;
            d["sup_residual"] = r.sup_residual;
            d["rms_residual"] = r.rms_residual;
            return d;
        },
        py::arg("samples"));

    // cascade
    m.def("hv_two", &hv_two, py::arg("alpha"), py::arg("p1") = ResponseLaw{HvStep{}},
          py::arg("p2") = ResponseLaw{HvStep{}}, py::arg("tol") = kDefaultQuadratureTol);
    m.def(
        "hv_cascade",
        [](const std::vector<double>& axes, const ResponseLaw& law, double tol) {
            return hv_cascade(
                CascadeSpec::uniform(to_angles(axes), law, InputConvention::UnpolarizedUniformLambda), tol);
        },
        py::arg("axes"), py::arg("law") = ResponseLaw{HvStep{}}, py::arg("tol") = kDefaultQuadratureTol);
    m.def(
        "qm_cascade",
        [](const std::vector<double>& axes, double epsilon) {
            return qm_cascade(CascadeSpec::uniform(to_angles(axes), GeneralizedMalus{epsilon},
                                                   InputConvention::PolarizedAlongFirstAxis));
        },
        py::arg("axes"), py::arg("epsilon") = 0.0);
    m.def("qm_three", &qm_three, py::arg("alpha"), py::arg("beta"));
    m.def(
        "min_beta_sweep",
        [](const std::vector<double>& alphas, const std::string& model, double epsilon, double beta_tol,
           unsigned threads) {
            if (model != "qm" && model != "hv") throw std::invalid_argument("model must be 'qm' or 'hv'");
            const SweepModel sm = model == "qm" ? SweepModel{QmModel{epsilon}} : SweepModel{HvModel{}};
            SweepOptions opt;
            opt.beta_tol = beta_tol;
            opt.threads = threads;
            py::list rows;
            for (const auto& r : min_beta_sweep(to_angles(alphas), sm, opt)) {
                rows.append(py::make_tuple(r.alpha.rad(), r.beta_star.rad(), r.p_min));
            }
            return rows;
        },
        py::arg("alphas"), py::arg("model") = "hv", py::arg("epsilon") = 0.0, py::arg("beta_tol") = 1e-7,
        py::arg("threads") = 1u, "Rows of (alpha, beta_star, p_min), angles in radians.");

    // bell
    m.def("bell_combination", &bell_combination, py::arg("pa"), py::arg("pa2"), py::arg("pb"), py::arg("pb2"));
    m.def("chsh_sum", &chsh_sum);
    m.def("classical_max", &classical_max);
    m.def(
        "chsh_qm",
        [](double a, double a2, double b, double b2) {
            return chsh_from_correlations({Angle::radians(a), Angle::radians(a2), Angle::radians(b),
                                           Angle::radians(b2)},
                                          qm_pair_correlation);
        },
        py::arg("alpha"), py::arg("alpha_prime"), py::arg("beta"), py::arg("beta_prime"));
    m.def("tensor_witness_norm", [] {
        const auto w = tensor_witness();
        return bell_operator_norm(w[0], w[1], w[2], w[3]);
    });
    m.def(
        "search_operator_max",
        [](const std::string& scenario, std::size_t dim, std::size_t restarts, std::uint64_t seed,
           unsigned threads) {
            const auto s = parse_scenario(scenario);
            if (!s) throw std::invalid_argument("unknown scenario '" + scenario + "'");
            BellSearchOptions opt;
            opt.threads = threads;
            py::gil_scoped_release release;
            return search_operator_max(*s, dim, restarts, seed, opt).achieved_max;
        },
        py::arg("scenario"), py::arg("dim"), py::arg("restarts"), py::arg("seed") = 0, py::arg("threads") = 1u);

    // eprmc
    m.def(
        "simulate_pairs",
        [](std::uint64_t n, double alpha, double beta, const ResponseLaw& l1, const ResponseLaw& l2,
           std::uint64_t seed) {
            EprConfig c{n, Angle::radians(alpha), Angle::radians(beta), l1, l2, seed};
            const auto t = simulate_pairs(c);
            py::dict d;
            d["n_pairs"] = t.n_pairs;
            d["n_coincidence"] = t.n_coincidence;
            d["n_first_only"] = t.n_first_only;
            d["n_second_only"] = t.n_second_only;
            d["n_neither"] = t.n_neither;
            return d;
        },
        py::arg("n_pairs"), py::arg("alpha"), py::arg("beta"), py::arg("law1") = ResponseLaw{HvStep{}},
        py::arg("law2") = ResponseLaw{HvStep{}}, py::arg("seed") = 0);
    m.def(
        "epr_curve",
        [](const std::vector<double>& angles, std::uint64_t n, const ResponseLaw& l1, const ResponseLaw& l2,
           std::uint64_t seed, unsigned threads) {
            EprCurveOptions opt;
            opt.threads = threads;
            py::list rows;
            for (const auto& p : epr_curve(angles, n, l1, l2, seed, opt)) {
                rows.append(py::make_tuple(p.relative_angle, p.p_hat, p.std_error, p.p_quadrature));
            }
            return rows;
        },
        py::arg("angles"), py::arg("n_pairs"), py::arg("law1") = ResponseLaw{HvStep{}},
        py::arg("law2") = ResponseLaw{HvStep{}}, py::arg("seed") = 0, py::arg("threads") = 1u,
        "Rows of (angle, p_hat, stderr, p_quadrature).");
}
