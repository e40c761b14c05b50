#include "qsemi/bounds.hpp"

#include <cmath>
#include <sstream>

#include "qsemi/error.hpp"

namespace qsemi {

namespace {

HermitianOp combine(const RVector& c, std::span<const HermitianOp> ops) {
    return linear_combination(std::span<const double>(c.data(), c.size()), ops);
}

struct Projected {
    HermitianOp residual;  // delta minus its projection onto span(R)
    double removed = 0.0;  // c^T G^{-1} c
};

Projected remove_span(const DensityMatrix& rho, const HermitianOp& delta,
                      std::span<const HermitianOp> rs, const RMatrix& ginv) {
    if (rs.empty()) {
        return {delta, 0.0};
    }
    RVector c(static_cast<Eigen::Index>(rs.size()));
    for (std::size_t k = 0; k < rs.size(); ++k) {
        c(static_cast<Eigen::Index>(k)) = weighted_inner(rho, rs[k], delta);
    }
    const RVector a = ginv * c;
    return {delta - combine(a, rs), c.dot(a)};
}

void require_copies(int n) {
    if (n < 1) {
        throw InvalidInput("n_copies must be at least 1");
    }
}

} // namespace

RMatrix checked_weight(const RMatrix& w, int q) {
    if (w.size() == 0) {
        return RMatrix::Identity(q, q);
    }
    if (w.rows() != q || w.cols() != q) {
        std::ostringstream os;
        os << "weight matrix must be " << q << "x" << q << ", got " << w.rows() << "x"
           << w.cols();
        throw DimensionMismatch(os.str());
    }
    try {
        return GramMatrix(w).entries();
    } catch (const InvalidInput&) {
        throw InvalidInput("weight matrix must be real symmetric positive semidefinite");
    }
}

double range_residual(const GramMatrix& k, const RMatrix& dbeta, double pinv_tol) {
    if (dbeta.rows() != k.size()) {
        throw DimensionMismatch("range_condition: dbeta rows must match K");
    }
    const RMatrix kp = pseudo_inverse(k.entries(), pinv_tol);
    return (k.entries() * kp * dbeta - dbeta).norm();
}

bool range_condition(const GramMatrix& k, const RMatrix& dbeta, double tol) {
    return range_residual(k, dbeta) <= tol * std::max(1.0, dbeta.norm());
}

RMatrix guarded_inverse(const GramMatrix& g, Diagnostics& diag) {
    const int n = g.size();
    if (n == 0) {
        return RMatrix(0, 0);
    }
    diag.condition = g.condition_number();
    if (diag.condition <= kConditionThreshold) {
        return g.entries().ldlt().solve(RMatrix::Identity(n, n));
    }
    diag.pinv_fallback = true;
    std::ostringstream os;
    os << "Gram matrix condition number " << diag.condition << " exceeds "
       << kConditionThreshold << "; pseudoinverse used";
    diag.notes.push_back(os.str());
    return pseudo_inverse(g.entries());
}

std::vector<HermitianOp> model_scores(const ParametricModel& model) {
    std::vector<HermitianOp> scores;
    scores.reserve(static_cast<std::size_t>(model.p()));
    for (const HermitianOp& d : model.derivatives()) {
        scores.push_back(solve_sld(model.truth(), d));
    }
    return scores;
}

HelstromResult helstrom_report(const DensityMatrix& rho, std::vector<HermitianOp> scores,
                               const RMatrix& dbeta, const RMatrix& w) {
    const int p = static_cast<int>(scores.size());
    if (dbeta.rows() != p) {
        std::ostringstream os;
        os << "helstrom: dbeta has " << dbeta.rows() << " rows but the model has " << p
           << " parameters";
        throw DimensionMismatch(os.str());
    }
    const int q = static_cast<int>(dbeta.cols());
    const RMatrix wq = checked_weight(w, q);

    HelstromResult out;
    out.information = gram(rho, scores);
    out.diagnostics.range_residual = range_residual(out.information, dbeta);
    out.diagnostics.range_ok = range_condition(out.information, dbeta);
    if (!out.diagnostics.range_ok) {
        std::ostringstream os;
        os << "unbiased estimation impossible: dbeta is not in the range of the Helstrom "
              "information (residual "
           << out.diagnostics.range_residual << ")";
        throw RangeConditionError(os.str());
    }
    const RMatrix kinv = guarded_inverse(out.information, out.diagnostics);
    const RMatrix coef = kinv * dbeta;  // p x q
    out.value = std::max(0.0, (wq * dbeta.transpose() * coef).trace());
    out.efficient_influence.reserve(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) {
        if (p == 0) {
            out.efficient_influence.push_back(HermitianOp::zero(rho.dim()));
        } else {
            out.efficient_influence.push_back(combine(coef.col(k), scores));
        }
    }
    out.scores = std::move(scores);
    return out;
}

HelstromResult helstrom_report(const ParametricModel& model, const RMatrix& dbeta,
                               const RMatrix& w) {
    return helstrom_report(model.truth(), model_scores(model), dbeta, w);
}

double helstrom_parametric(const ParametricModel& model, const RMatrix& dbeta,
                           const RMatrix& w) {
    return helstrom_report(model, dbeta, w).value;
}

RMatrix dbeta_finite_difference(const ParametricModel& model, std::span<const Functional> fs,
                                const FdOptions& opts) {
    if (!(opts.step > 0.0)) {
        throw InvalidInput("finite-difference step must be positive");
    }
    const int p = model.p();
    const int q = static_cast<int>(fs.size());
    const RVector& t0 = model.theta0();
    const double h = opts.step * std::max(1.0, t0.size() ? t0.cwiseAbs().maxCoeff() : 0.0);

    auto values_at = [&](const RVector& t) {
        DensityMatrix r = [&] {
            try {
                return model.rho_at(t);
            } catch (const InvalidInput& e) {
                throw BoundaryError(std::string("dbeta stencil left the state space: ") +
                                    e.what());
            }
        }();
        RVector v(q);
        for (int k = 0; k < q; ++k) {
            v(k) = functional_value(r, fs[static_cast<std::size_t>(k)]);
        }
        return v;
    };
    auto central = [&](int j, double step) -> RVector {
        RVector tp = t0;
        RVector tm = t0;
        tp(j) += step;
        tm(j) -= step;
        return (values_at(tp) - values_at(tm)) / (2.0 * step);
    };

    RMatrix out(p, q);
    for (int j = 0; j < p; ++j) {
        const RVector d1 = central(j, h);
        if (opts.richardson) {
            out.row(j) = ((4.0 * central(j, h / 2.0) - d1) / 3.0).transpose();
        } else {
            out.row(j) = d1.transpose();
        }
    }
    return out;
}

RMatrix dbeta_finite_difference(const ParametricModel& model, const Functional& f,
                                const FdOptions& opts) {
    return dbeta_finite_difference(model, std::span<const Functional>(&f, 1), opts);
}

BoundReport ghb_full_dimensional(const DensityMatrix& rho, const Functional& f, int n_copies) {
    require_copies(n_copies);
    BoundReport r;
    r.n_copies = n_copies;
    HermitianOp delta = influence_operator(rho, f);
    r.ghb = weighted_norm_sq(rho, delta) / n_copies;
    r.efficient_influence.push_back(std::move(delta));
    return r;
}

BoundReport ghb_constrained(const DensityMatrix& rho, const Functional& f,
                            std::span<const Constraint> constraints, int n_copies) {
    require_copies(n_copies);
    const std::vector<HermitianOp> rs = antiscore_operators(rho, constraints);
    const HermitianOp delta = influence_operator(rho, f);

    BoundReport r;
    r.n_copies = n_copies;
    const RMatrix ginv = guarded_inverse(gram(rho, rs), r.diagnostics);
    Projected pr = remove_span(rho, delta, rs, ginv);
    r.ghb = std::max(0.0, weighted_norm_sq(rho, delta) - pr.removed) / n_copies;
    r.efficient_influence.push_back(std::move(pr.residual));
    return r;
}

BoundReport ghb_displacement(const DensityMatrix& rho0, const HermitianOp& generator,
                             std::span<const Constraint> constraints, int n_copies) {
    require_copies(n_copies);
    require_same_dim(rho0.dim(), generator.dim(), "ghb_displacement");
    const std::vector<HermitianOp> rs = antiscore_operators(rho0, constraints);
    const int m = static_cast<int>(rs.size());

    // c_k = -i tr rho0 [R_k, H] = tr rho0 (i[H, R_k])
    RVector c(m);
    double scale = 0.0;
    for (int k = 0; k < m; ++k) {
        const HermitianOp comm = i_commutator(generator, rs[static_cast<std::size_t>(k)]);
        c(k) = (rho0.matrix() * comm.matrix()).trace().real();
        scale = std::max(scale, comm.frobenius_norm());
    }
    if (m == 0 || c.norm() <= 1e-12 * std::max(1.0, scale)) {
        throw InfiniteBound(
            "displacement bound is infinite: tr rho0 [R, H] vanishes for every antiscore, so "
            "no influence operator exists");
    }

    BoundReport r;
    r.n_copies = n_copies;
    const RMatrix ginv = guarded_inverse(gram(rho0, rs), r.diagnostics);
    const RVector a = ginv * c;
    const double info = c.dot(a);
    if (info <= 1e-12 * std::max(1.0, c.squaredNorm())) {
        throw InfiniteBound("displacement bound is infinite: efficient score vanishes");
    }
    HermitianOp s_eff = combine(a, rs);
    r.ghb = 1.0 / (n_copies * info);
    r.efficient_influence.push_back(s_eff * (1.0 / info));
    r.efficient_score.push_back(std::move(s_eff));
    return r;
}

BoundReport ghb_vector(const DensityMatrix& rho, std::span<const Functional> fs,
                       const RMatrix& w, std::span<const Constraint> constraints,
                       int n_copies) {
    require_copies(n_copies);
    const int q = static_cast<int>(fs.size());
    if (q == 0) {
        throw InvalidInput("ghb_vector: need at least one functional");
    }
    const RMatrix wq = checked_weight(w, q);
    const std::vector<HermitianOp> rs = antiscore_operators(rho, constraints);

    BoundReport r;
    r.n_copies = n_copies;
    const RMatrix ginv = guarded_inverse(gram(rho, rs), r.diagnostics);
    for (const Functional& f : fs) {
        r.efficient_influence.push_back(
            remove_span(rho, influence_operator(rho, f), rs, ginv).residual);
    }
    const GramMatrix g = gram(rho, r.efficient_influence);
    r.ghb = std::max(0.0, (wq * g.entries()).trace()) / n_copies;
    return r;
}

double submodel_lower_bound(const DensityMatrix& rho, const Functional& f,
                            const ParametricModel& submodel, const FdOptions& opts) {
    require_same_dim(rho.dim(), submodel.dim(), "submodel_lower_bound");
    if ((submodel.truth().matrix() - rho.matrix()).norm() > 1e-10) {
        throw InvalidInput("submodel_lower_bound: submodel truth differs from rho");
    }
    return helstrom_parametric(submodel, dbeta_finite_difference(submodel, f, opts));
}

EfficientScore nuisance_efficient_score(const ParametricModel& model, int interest) {
    const int p = model.p();
    if (interest < 0 || interest >= p) {
        throw InvalidInput("nuisance_efficient_score: parameter index out of range");
    }
    const std::vector<HermitianOp> scores = model_scores(model);
    std::vector<HermitianOp> nuisance;
    for (int j = 0; j < p; ++j) {
        if (j != interest) {
            nuisance.push_back(scores[static_cast<std::size_t>(j)]);
        }
    }
    const HermitianOp& s = scores[static_cast<std::size_t>(interest)];
    const SpanProjection pr = project_onto_span(model.truth(), s, nuisance);
    HermitianOp s_eff = s - pr.projection;
    const double info = weighted_norm_sq(model.truth(), s_eff);
    if (info <= 1e-12 * std::max(1.0, weighted_norm_sq(model.truth(), s))) {
        throw InfiniteBound("efficient score vanishes: the parameter of interest is not "
                            "identifiable in the presence of the nuisance parameters");
    }
    return {std::move(s_eff), info, 1.0 / info};
}

} // namespace qsemi
