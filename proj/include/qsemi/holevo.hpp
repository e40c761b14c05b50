#pragma once

#include <span>
#include <string>
#include <vector>

#include "qsemi/bounds.hpp"
#include "qsemi/operators.hpp"

namespace qsemi {

/// Gamma_jk = tr rho delta_j delta_k. Hermitian PSD with real diagonal.
class GammaMatrix {
public:
    explicit GammaMatrix(CMatrix entries);
    const CMatrix& entries() const { return entries_; }
    int size() const { return static_cast<int>(entries_.rows()); }
    RMatrix re() const { return entries_.real(); }
    RMatrix im() const { return entries_.imag(); }

private:
    CMatrix entries_;
};

GammaMatrix gamma_matrix(const DensityMatrix& rho, std::span<const HermitianOp> deltas);

/// tr W Re Gamma + ||sqrt(W) Im Gamma sqrt(W)||_1
double holevo_objective(const GammaMatrix& gamma, const RMatrix& w);

struct HolevoSolveOptions {
    int max_iters = 200000;     ///< total accelerated-gradient iterations over all stages
    double mu_initial = 1e-1;   ///< first smoothing level, relative to the D-invariant value
    double mu_final = 1e-10;    ///< last smoothing level, same scale
    double mu_factor = 0.1;     ///< smoothing reduction between stages
    double tol = 1e-10;         ///< stage stop: gradient norm relative to the D-invariant value
    /// A stage also stops when the smoothed objective drops by less than
    /// tol * D over this many iterations.
    int stall_window = 500;
};

/// Holevo minimization in coordinates. With an orthonormal basis {e_a} of the
/// zero-mean operators whose first r elements span the scores, an influence
/// operator is delta_k = sum_a C_ka e_a with C = [C_T | X]; C_T is fixed by
/// the efficient influence and X (q x m) is free. Then Re Gamma = C C^T and
/// Im Gamma = C Omega C^T with Omega_ab = Im tr rho e_a e_b.
class HolevoProblem {
public:
    /// Throws RangeConditionError when dbeta is outside the range of K and
    /// SupportError for rank-deficient rho.
    HolevoProblem(const DensityMatrix& rho, std::vector<HermitianOp> scores, const RMatrix& dbeta,
                  const RMatrix& w = {});

    int q() const { return static_cast<int>(fixed_.rows()); }
    int tangent_dim() const { return static_cast<int>(fixed_.cols()); }
    int free_dim() const { return m_; }
    const RMatrix& weight() const { return w_; }
    const RMatrix& omega() const { return omega_; }
    /// Frobenius norm of the fixed tangent coefficients C_T.
    double fixed_norm() const { return fixed_.norm(); }

    /// Helstrom value tr W <delta_eff, delta_eff>.
    double ghb() const { return ghb_; }
    /// Holevo objective at X = 0, i.e. at the efficient influence.
    double d_invariant() const { return objective(RMatrix::Zero(q(), m_)); }

    double objective(const RMatrix& x) const;
    /// Objective with the trace norm replaced by sum_i sqrt(s_i^2 + mu^2);
    /// writes the gradient with respect to X when grad is non-null.
    double smoothed(const RMatrix& x, double mu, RMatrix* grad) const;
    std::vector<HermitianOp> deltas(const RMatrix& x) const;
    const std::vector<HermitianOp>& efficient_influence() const { return delta_eff_; }

private:
    RMatrix full_coefficients(const RMatrix& x) const;

    DensityMatrix rho_;
    RMatrix w_;
    RMatrix sqrt_w_;
    std::vector<HermitianOp> basis_;  // zero-mean orthonormal, tangent part first
    RMatrix omega_;
    RMatrix fixed_;  // q x r
    int m_ = 0;
    double ghb_ = 0.0;
    std::vector<HermitianOp> delta_eff_;
};

struct HolevoResult {
    double value = 0.0;
    std::vector<HermitianOp> minimizer;
    double ghb = 0.0;
    double d_invariant = 0.0;
    bool converged = false;
    int iterations = 0;
    int free_dim = 0;
};

/// Holevo bound X. Starts at the efficient influence and keeps the best
/// objective seen, so ghb <= value <= d_invariant always holds.
HolevoResult holevo_bound(const DensityMatrix& rho, std::vector<HermitianOp> scores,
                          const RMatrix& dbeta, const RMatrix& w = {},
                          const HolevoSolveOptions& opts = {});
HolevoResult holevo_minimize(const HolevoProblem& problem, const HolevoSolveOptions& opts = {});

/// Holevo objective at the efficient influences.
double d_invariant_bound(const DensityMatrix& rho, std::span<const HermitianOp> delta_eff,
                         const RMatrix& w = {});

struct BelavkinCheck {
    double lhs = 0.0;  ///< tr Re A
    double rhs = 0.0;  ///< ||Im A||_1
    bool holds = false;
};

/// tr Re A >= ||Im A||_1 for complex PSD A. Throws InvalidInput if A is not PSD.
BelavkinCheck belavkin_check(const CMatrix& a);

struct SandwichReport {
    double ghb = 0.0;
    double x = 0.0;
    double d = 0.0;
    double x_over_ghb = 1.0;
    double d_over_ghb = 1.0;
    bool ok = true;
    std::vector<std::string> violations;
};

/// Checks ghb <= x <= d <= 2 ghb with relative slack.
SandwichReport sandwich_report(double ghb, double x, double d, double slack = 1e-7);

} // namespace qsemi
