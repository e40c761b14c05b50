#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qsemi/operators.hpp"

namespace qsemi {

inline constexpr double kDefaultFdStep = 1e-5;

/// A smooth map theta in R^p -> density operator, with a derivative provider.
///
/// When no analytic derivative is supplied, drho_at falls back to central
/// finite differences with the default step.
class ParametricModel {
public:
    using StateFn = std::function<DensityMatrix(const RVector&)>;
    using DerivFn = std::function<HermitianOp(const RVector&, int)>;

    ParametricModel(RVector theta0, StateFn rho_at, DerivFn drho_at = {},
                    std::vector<std::string> labels = {});

    int p() const { return static_cast<int>(theta0_.size()); }
    int dim() const { return truth_.dim(); }
    const RVector& theta0() const { return theta0_; }
    const std::vector<std::string>& labels() const { return labels_; }
    bool has_analytic_derivative() const { return static_cast<bool>(drho_at_); }

    /// rho(theta0), validated at construction.
    const DensityMatrix& truth() const { return truth_; }
    DensityMatrix rho_at(const RVector& theta) const;
    HermitianOp drho_at(const RVector& theta, int j) const;

    /// All p derivatives at theta0.
    std::vector<HermitianOp> derivatives() const;

private:
    RVector theta0_;
    StateFn rho_at_;
    DerivFn drho_at_;
    std::vector<std::string> labels_;
    DensityMatrix truth_;
};

/// Central difference (rho(theta + h e_j) - rho(theta - h e_j)) / 2h with
/// h = step * max(1, |theta|_inf), Hermitized. With richardson = true the
/// estimate (4 D(h/2) - D(h)) / 3 is returned instead.
///
/// Throws BoundaryError when a stencil point is not a valid density operator.
HermitianOp finite_diff_drho(const ParametricModel& model, const RVector& theta, int j,
                             double step = kDefaultFdStep, bool richardson = false);

/// Basis operators of the full (d^2 - 1)-parameter family: derivatives
/// a_j - a_0 for j = 1..d-1, then b_k, c_k for each pair k1 < k2.
std::vector<HermitianOp> f0_tangent_basis(int d);

/// Coordinates theta of rho in the full family (exact inversion).
RVector f0_coordinates(const DensityMatrix& rho);

/// Full-dimensional family rho(theta) = sum theta_a a + sum (theta_b b + theta_c c)
/// with theta_a0 eliminated by the trace constraint. Rejects rank-deficient truth.
ParametricModel f0_family(int d, const DensityMatrix& rho_truth);

enum class SubmodelKind { Exponential, Tanh };

struct SubmodelSpec {
    DensityMatrix rho;
    HermitianOp direction;
    SubmodelKind kind = SubmodelKind::Exponential;
};

/// Multi-parameter smooth family through rho:
///   Exponential: sigma(theta) ~ e^{A/2} rho e^{A/2}
///   Tanh:        sigma(theta) ~ f(A) rho f(A),  f(u) = 1 + tanh(u/2)
/// with A = sum_j theta_j h_j. Every h_j must have zero mean under rho. The
/// score of direction j at theta = 0 is h_j. Derivatives are analytic.
ParametricModel smooth_family(const DensityMatrix& rho, std::vector<HermitianOp> directions,
                              SubmodelKind kind);

ParametricModel exponential_submodel(const SubmodelSpec& spec);
ParametricModel tanh_submodel(const SubmodelSpec& spec);

/// One-parameter unitary family rho(beta) = e^{-iH beta} rho0 e^{iH beta}
/// with truth at beta0 and derivative -i[H, rho(beta)].
ParametricModel displacement_model(const DensityMatrix& rho0, const HermitianOp& generator,
                                   double beta0 = 0.0);

/// rho(theta)^{(x) n} with product-rule derivatives.
ParametricModel tensor_power(const ParametricModel& model, int n, int max_dim = 256);

/// Affine reparametrization theta = theta0 + basis * phi, truth at phi = 0.
ParametricModel restrict_model(const ParametricModel& model, const RMatrix& basis,
                               std::vector<std::string> labels = {});

/// Frechet derivative of the spectral function f at a in direction e
/// (Daleckii-Krein formula).
HermitianOp frechet_derivative(const HermitianOp& a, const HermitianOp& e,
                               const std::function<double(double)>& f,
                               const std::function<double(double)>& fprime);

} // namespace qsemi
