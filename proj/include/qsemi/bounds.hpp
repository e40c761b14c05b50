#pragma once

#include <span>
#include <string>
#include <vector>

#include "qsemi/influence.hpp"
#include "qsemi/models.hpp"
#include "qsemi/operators.hpp"

namespace qsemi {

/// Inverses of Gram matrices with condition number above this are replaced by
/// pseudoinverses and the report is flagged.
inline constexpr double kConditionThreshold = 1e10;
inline constexpr double kRangeTol = 1e-8;

struct Diagnostics {
    bool range_ok = true;
    bool pinv_fallback = false;
    double condition = 1.0;   ///< condition number of the Gram matrix that was inverted
    double range_residual = 0.0;
    std::vector<std::string> notes;
};

struct BoundReport {
    double ghb = 0.0;  ///< already divided by n_copies
    int n_copies = 1;
    std::vector<HermitianOp> efficient_influence;
    /// Only set by displacement bounds: the efficient score as a combination of antiscores.
    std::vector<HermitianOp> efficient_score;
    Diagnostics diagnostics;
};

/// ||K K^+ dbeta - dbeta||_F.
double range_residual(const GramMatrix& k, const RMatrix& dbeta,
                      double pinv_tol = kDefaultPinvTol);

/// True iff dbeta lies in the range of K: residual <= tol * max(1, ||dbeta||_F).
bool range_condition(const GramMatrix& k, const RMatrix& dbeta, double tol = kRangeTol);

/// Inverse of a symmetric PSD matrix, falling back to the pseudoinverse above
/// kConditionThreshold. Fills condition and pinv_fallback.
RMatrix guarded_inverse(const GramMatrix& g, Diagnostics& diag);

struct HelstromResult {
    double value = 0.0;
    std::vector<HermitianOp> scores;
    GramMatrix information{RMatrix::Zero(0, 0)};
    /// delta_k = sum_j (K^+ dbeta)_jk S_j
    std::vector<HermitianOp> efficient_influence;
    Diagnostics diagnostics;
};

/// SLD scores of every parameter at the model truth.
std::vector<HermitianOp> model_scores(const ParametricModel& model);

/// Helstrom bound tr W dbeta^T K^+ dbeta for a p x q derivative matrix. An
/// empty w means the q x q identity. Throws RangeConditionError when dbeta is
/// outside the range of K.
HelstromResult helstrom_report(const ParametricModel& model, const RMatrix& dbeta,
                               const RMatrix& w = {});
HelstromResult helstrom_report(const DensityMatrix& rho, std::vector<HermitianOp> scores,
                               const RMatrix& dbeta, const RMatrix& w = {});
double helstrom_parametric(const ParametricModel& model, const RMatrix& dbeta,
                           const RMatrix& w = {});

struct FdOptions {
    double step = kDefaultFdStep;
    bool richardson = false;
};

/// p x q matrix of central differences d beta_k / d theta_j at the truth.
RMatrix dbeta_finite_difference(const ParametricModel& model, std::span<const Functional> fs,
                                const FdOptions& opts = {});
RMatrix dbeta_finite_difference(const ParametricModel& model, const Functional& f,
                                const FdOptions& opts = {});

/// Closed-form GHB when the tangent space is all zero-mean operators:
/// ||delta||^2 / N.
BoundReport ghb_full_dimensional(const DensityMatrix& rho, const Functional& f,
                                 int n_copies = 1);

/// Constrained GHB (||delta||^2 - <R,delta>^T <R,R>^{-1} <R,delta>) / N.
BoundReport ghb_constrained(const DensityMatrix& rho, const Functional& f,
                            std::span<const Constraint> constraints, int n_copies = 1);

/// Displacement bound 1 / (N ||S_eff||^2) with ||S_eff||^2 = c^T <R,R>^{-1} c,
/// c_k = -i tr rho0 [R_k, H]. Throws InfiniteBound when c vanishes.
BoundReport ghb_displacement(const DensityMatrix& rho0, const HermitianOp& generator,
                             std::span<const Constraint> constraints, int n_copies = 1);

/// Vector GHB tr W <delta_eff, delta_eff> / N. Empty w means identity.
BoundReport ghb_vector(const DensityMatrix& rho, std::span<const Functional> fs,
                       const RMatrix& w, std::span<const Constraint> constraints,
                       int n_copies = 1);

/// Helstrom bound of a parametric submodel through rho, with dbeta by finite
/// differences. Never exceeds the full GHB.
double submodel_lower_bound(const DensityMatrix& rho, const Functional& f,
                            const ParametricModel& submodel, const FdOptions& opts = {});

struct EfficientScore {
    HermitianOp score;      ///< S_j minus its projection onto the other scores
    double information = 0.0;  ///< ||S_eff||^2
    double bound = 0.0;        ///< 1 / ||S_eff||^2
};

/// Efficient score for parameter `interest` with every other parameter of the
/// model treated as a nuisance. Throws InfiniteBound when S_eff vanishes.
EfficientScore nuisance_efficient_score(const ParametricModel& model, int interest);

/// Validates a real symmetric PSD weight; empty input yields identity(q).
RMatrix checked_weight(const RMatrix& w, int q);

} // namespace qsemi
