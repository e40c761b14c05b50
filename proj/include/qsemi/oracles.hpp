#pragma once

#include <span>
#include <vector>

#include "qsemi/bounds.hpp"
#include "qsemi/influence.hpp"
#include "qsemi/models.hpp"

// Brute-force parametric cross-checks: the closed-form semiparametric bounds
// recomputed as ordinary Helstrom bounds of explicit families.

namespace qsemi {

/// Finite-difference settings for oracle derivatives. The step is capped at
/// 1e-2 * lambda_min so stencils stay well inside the state space, and one
/// Richardson refinement is applied.
FdOptions oracle_fd_options(const DensityMatrix& rho);

/// Helstrom bound of the full (d^2 - 1)-parameter family with dbeta from
/// finite differences.
double f0_oracle(const DensityMatrix& rho, const Functional& f, int n_copies = 1);

HelstromResult f0_oracle_vector(const DensityMatrix& rho, std::span<const Functional> fs,
                                const RMatrix& w = {});

/// Full family restricted to the null space of the linear constraints
/// tr rho(theta) Z_k = zeta_k. Only LinearMoment constraints are accepted.
ParametricModel constrained_f0_family(const DensityMatrix& rho,
                                      std::span<const Constraint> constraints);

double constrained_oracle(const DensityMatrix& rho, const Functional& f,
                          std::span<const Constraint> constraints, int n_copies = 1);

/// rho(beta, phi) = U_beta rho0(phi) U_beta^dagger with U_beta = exp(-i H beta)
/// and rho0(phi) the constrained full family through rho0. Parameter 0 is beta.
ParametricModel joint_displacement_model(const DensityMatrix& rho0, const HermitianOp& generator,
                                         std::span<const Constraint> constraints);

/// Helstrom bound for beta in the joint model, nuisance phi.
double displacement_oracle(const DensityMatrix& rho0, const HermitianOp& generator,
                           std::span<const Constraint> constraints, int n_copies = 1);

/// Phase estimation on a truncated oscillator: a displaced thermal state,
/// generator H = (x^2 + p^2)/2 and both quadrature means held fixed.
struct PhaseScenario {
    DensityMatrix rho0;
    HermitianOp generator;
    std::vector<Constraint> constraints;
};

PhaseScenario phase_scenario(int levels, cplx alpha, double nbar);

/// Thermal state of a d-level truncation with mean occupation nbar before truncation.
DensityMatrix thermal_state(int d, double nbar);

} // namespace qsemi
