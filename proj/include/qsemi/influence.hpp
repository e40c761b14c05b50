#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "qsemi/operators.hpp"

namespace qsemi {

namespace functionals {

/// beta = tr rho Y
struct Expectation {
    HermitianOp observable;
};

/// beta = tr rho^2
struct Purity {};

/// beta = tr rho (ln rho - ln sigma)
struct RelativeEntropy {
    DensityMatrix sigma;
};

/// beta = -tr rho ln rho
struct VonNeumannEntropy {};

/// beta = <psi| rho |psi>
struct FidelityPure {
    CVector psi;
};

/// User-supplied functional. gradient(rho) must return an operator G with
/// D_h beta = <h, G> for zero-mean h.
struct Custom {
    std::function<double(const DensityMatrix&)> value;
    std::function<HermitianOp(const DensityMatrix&)> gradient;
    std::string name = "custom";
};

} // namespace functionals

using Functional = std::variant<functionals::Expectation, functionals::Purity,
                                functionals::RelativeEntropy, functionals::VonNeumannEntropy,
                                functionals::FidelityPure, functionals::Custom>;

std::string functional_name(const Functional& f);

/// Equality constraint gamma[rho] = 0.
namespace constraints {

/// tr rho Z = zeta
struct LinearMoment {
    HermitianOp observable;
    double zeta = 0.0;
};

struct Custom {
    std::function<double(const DensityMatrix&)> value;
    std::function<HermitianOp(const DensityMatrix&)> gradient;
    std::string name = "custom";
};

} // namespace constraints

using Constraint = std::variant<constraints::LinearMoment, constraints::Custom>;

/// beta[rho]. Throws SupportError if a relative-entropy reference does not
/// cover the support of rho.
double functional_value(const DensityMatrix& rho, const Functional& f);

/// Functional gradient G with D_h beta = <h, G> (before mean subtraction).
HermitianOp functional_gradient(const DensityMatrix& rho, const Functional& f);

/// Zero-mean influence operator delta = G - <G, I>.
HermitianOp influence_operator(const DensityMatrix& rho, const Functional& f);

/// gamma_k[rho] for each constraint.
double constraint_value(const DensityMatrix& rho, const Constraint& c);

/// Antiscores R_k = grad_k - <grad_k, I>. Throws InconsistentConstraint when a
/// constraint does not hold at rho within 1e-8.
std::vector<HermitianOp> antiscore_operators(const DensityMatrix& rho,
                                             std::span<const Constraint> constraints);

/// Builds a Functional from a constraint's value and gradient so that the
/// directional-derivative check can validate user constraint gradients.
Functional as_functional(const Constraint& c);

struct DerivativeCheck {
    double numeric = 0.0;
    double analytic = 0.0;
    bool agree = false;
};

/// Compares the symmetric difference quotient of beta along rho +/- eps rho o h
/// with <h, delta + beta I>. Agreement tolerance max(1e-6, 1e-4 |analytic|).
/// Throws BoundaryError if a perturbed state is not positive semidefinite.
DerivativeCheck directional_derivative_check(const DensityMatrix& rho, const Functional& f,
                                             const HermitianOp& h, double eps = 1e-5);

} // namespace qsemi
