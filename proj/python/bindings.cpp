#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsemi/bounds.hpp"
#include "qsemi/error.hpp"
#include "qsemi/holevo.hpp"
#include "qsemi/imaging.hpp"
#include "qsemi/influence.hpp"
#include "qsemi/oracles.hpp"
#include "qsemi/scenario.hpp"

namespace py = pybind11;
using namespace qsemi;

namespace {

// Opaque handles; binding the variants directly would engage pybind11's
// std::variant caster.
struct PyFunctional {
    Functional f;
};
struct PyConstraint {
    Constraint c;
};

std::vector<Functional> unwrap(const std::vector<PyFunctional>& hs) {
    std::vector<Functional> out;
    for (const auto& h : hs) {
        out.push_back(h.f);
    }
    return out;
}

using PyConstraints = std::vector<PyConstraint>;

std::vector<Constraint> unwrap(const PyConstraints& hs) {
    std::vector<Constraint> out;
    for (const auto& h : hs) {
        out.push_back(h.c);
    }
    return out;
}

DensityMatrix state(const CMatrix& m) { return DensityMatrix(m); }
HermitianOp herm(const CMatrix& m) { return HermitianOp(m); }

std::vector<HermitianOp> herms(const std::vector<CMatrix>& ms) {
    std::vector<HermitianOp> out;
    out.reserve(ms.size());
    for (const CMatrix& m : ms) {
        out.push_back(herm(m));
    }
    return out;
}

std::vector<CMatrix> matrices(const std::vector<HermitianOp>& ops) {
    std::vector<CMatrix> out;
    out.reserve(ops.size());
    for (const HermitianOp& op : ops) {
        out.push_back(op.matrix());
    }
    return out;
}

py::dict diagnostics_dict(const Diagnostics& d) {
    py::dict out;
    out["range_ok"] = d.range_ok;
    out["range_residual"] = d.range_residual;
    out["condition"] = d.condition;
    out["pinv_fallback"] = d.pinv_fallback;
    out["notes"] = d.notes;
    return out;
}

py::dict report_dict(const BoundReport& r) {
    py::dict out;
    out["ghb"] = r.ghb;
    out["n_copies"] = r.n_copies;
    out["efficient_influence"] = matrices(r.efficient_influence);
    if (!r.efficient_score.empty()) {
        out["efficient_score"] = matrices(r.efficient_score);
    }
    out["diagnostics"] = diagnostics_dict(r.diagnostics);
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Semiparametric quantum estimation bounds";

    // Translators registered later are tried first, so the base goes first.
    const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", base);
    py::register_exception<SupportError>(m, "SupportError", base);
    py::register_exception<RangeConditionError>(m, "RangeConditionError", base);
    py::register_exception<InfiniteBound>(m, "InfiniteBound", base);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base);

    py::class_<PyFunctional>(m, "Functional")
        .def_property_readonly("name",
                               [](const PyFunctional& h) { return functional_name(h.f); })
        .def("__repr__",
             [](const PyFunctional& h) { return "<Functional " + functional_name(h.f) + ">"; });
    m.def("expectation",
          [](const CMatrix& y) { return PyFunctional{functionals::Expectation{herm(y)}}; },
          py::arg("observable"));
    m.def("purity", [] { return PyFunctional{functionals::Purity{}}; });
    m.def("entropy", [] { return PyFunctional{functionals::VonNeumannEntropy{}}; });
    m.def("relative_entropy",
          [](const CMatrix& s) { return PyFunctional{functionals::RelativeEntropy{state(s)}}; },
          py::arg("sigma"));
    m.def("fidelity_pure",
          [](const CVector& psi) { return PyFunctional{functionals::FidelityPure{psi}}; },
          py::arg("psi"));

    py::class_<PyConstraint>(m, "Constraint");
    m.def("linear_moment",
          [](const CMatrix& z, double zeta) {
              return PyConstraint{constraints::LinearMoment{herm(z), zeta}};
          },
          py::arg("observable"), py::arg("value"));

    m.def("functional_value", [](const CMatrix& rho, const PyFunctional& f) {
        return functional_value(state(rho), f.f);
    }, py::arg("rho"), py::arg("functional"));
    m.def("influence_operator", [](const CMatrix& rho, const PyFunctional& f) {
        return influence_operator(state(rho), f.f).matrix();
    }, py::arg("rho"), py::arg("functional"));

    m.def("ghb_full_dimensional", [](const CMatrix& rho, const PyFunctional& f, int n) {
        return report_dict(ghb_full_dimensional(state(rho), f.f, n));
    }, py::arg("rho"), py::arg("functional"), py::arg("n_copies") = 1);
    m.def("ghb_constrained",
          [](const CMatrix& rho, const PyFunctional& f, const PyConstraints& cs, int n) {
              return report_dict(ghb_constrained(state(rho), f.f, unwrap(cs), n));
          },
          py::arg("rho"), py::arg("functional"), py::arg("constraints"), py::arg("n_copies") = 1);
    m.def("ghb_displacement",
          [](const CMatrix& rho0, const CMatrix& h, const PyConstraints& cs, int n) {
              return report_dict(ghb_displacement(state(rho0), herm(h), unwrap(cs), n));
          },
          py::arg("rho0"), py::arg("generator"), py::arg("constraints"), py::arg("n_copies") = 1);
    m.def("ghb_vector",
          [](const CMatrix& rho, const std::vector<PyFunctional>& fs, const RMatrix& w,
             const PyConstraints& cs, int n) {
              return report_dict(ghb_vector(state(rho), unwrap(fs), w, unwrap(cs), n));
          },
          py::arg("rho"), py::arg("functionals"), py::arg("weight") = RMatrix(),
          py::arg("constraints") = PyConstraints{}, py::arg("n_copies") = 1);

    m.def("f0_oracle", [](const CMatrix& rho, const PyFunctional& f, int n) {
        return f0_oracle(state(rho), f.f, n);
    }, py::arg("rho"), py::arg("functional"), py::arg("n_copies") = 1);
    m.def("constrained_oracle",
          [](const CMatrix& rho, const PyFunctional& f, const PyConstraints& cs) {
              return constrained_oracle(state(rho), f.f, unwrap(cs));
          },
          py::arg("rho"), py::arg("functional"), py::arg("constraints"));
    m.def("displacement_oracle",
          [](const CMatrix& rho0, const CMatrix& h, const PyConstraints& cs) {
              return displacement_oracle(state(rho0), herm(h), unwrap(cs));
          },
          py::arg("rho0"), py::arg("generator"), py::arg("constraints"));

    m.def("gamma_matrix", [](const CMatrix& rho, const std::vector<CMatrix>& deltas) {
        const auto ds = herms(deltas);
        return gamma_matrix(state(rho), ds).entries();
    }, py::arg("rho"), py::arg("deltas"));
    m.def("holevo_objective", [](const CMatrix& gamma, const RMatrix& w) {
        return holevo_objective(GammaMatrix(gamma), w);
    }, py::arg("gamma"), py::arg("weight"));
    m.def("holevo_bound",
          [](const CMatrix& rho, const std::vector<CMatrix>& scores, const RMatrix& dbeta,
             const RMatrix& w) {
              const HolevoResult r = holevo_bound(state(rho), herms(scores), dbeta, w);
              py::dict out;
              out["holevo"] = r.value;
              out["ghb"] = r.ghb;
              out["d_invariant"] = r.d_invariant;
              out["converged"] = r.converged;
              out["iterations"] = r.iterations;
              out["free_dim"] = r.free_dim;
              out["minimizer"] = matrices(r.minimizer);
              return out;
          },
          py::arg("rho"), py::arg("scores"), py::arg("dbeta"), py::arg("weight") = RMatrix());
    m.def("belavkin_check", [](const CMatrix& a) {
        const BelavkinCheck c = belavkin_check(a);
        return py::make_tuple(c.lhs, c.rhs, c.holds);
    }, py::arg("a"));

    py::class_<SourceDistribution>(m, "Source")
        .def_static("discrete", &SourceDistribution::discrete, py::arg("positions"),
                    py::arg("weights"))
        .def_static("gridded", &SourceDistribution::gridded, py::arg("grid"), py::arg("density"))
        .def_static("two_point", &SourceDistribution::two_point, py::arg("separation"))
        .def_static("point", &SourceDistribution::point, py::arg("x0"))
        .def("dilated", &SourceDistribution::dilated, py::arg("factor"))
        .def_property_readonly("nodes", &SourceDistribution::nodes)
        .def_property_readonly("weights", &SourceDistribution::weights);
    m.def("direct_imaging_estimator", &direct_imaging_estimator, py::arg("mu"));
    m.def("direct_imaging_error", &direct_imaging_error, py::arg("source"), py::arg("mu"),
          py::arg("n") = 1);
    m.def("spade_error_even", &spade_error_even, py::arg("source"), py::arg("j"), py::arg("n") = 1,
          py::arg("m_max") = 0);
    m.def("ec_lower_bound", &ec_lower_bound, py::arg("source"), py::arg("mu"), py::arg("n") = 1);

    m.def("run_scenario",
          [](const std::string& yaml, const std::string& command, std::optional<std::uint64_t> seed,
             int threads) {
              scenario::RunOptions opts;
              opts.seed = seed;
              opts.threads = threads;
              const scenario::Report r =
                  scenario::run_text(yaml, scenario::parse_command(command), opts);
              return py::make_tuple(r.payload.dump(), static_cast<int>(r.status));
          },
          py::arg("config"), py::arg("command"), py::arg("seed") = py::none(),
          py::arg("threads") = 1,
          "Runs a YAML scenario; returns (payload JSON text, exit status).");
}
