#include "qsemi/holevo.hpp"

#include <cmath>
#include <sstream>

#include "qsemi/error.hpp"

namespace qsemi {

namespace {

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Hermitian d x d basis: E_jj, (E_jk + E_kj)/sqrt2, i(E_kj - E_jk)/sqrt2.
std::vector<HermitianOp> canonical_hermitian_basis(int d) {
    std::vector<HermitianOp> out;
    const double r = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < d; ++j) {
        CMatrix m = CMatrix::Zero(d, d);
        m(j, j) = 1.0;
        out.push_back(HermitianOp::hermitize(m));
    }
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            CMatrix b = CMatrix::Zero(d, d);
            b(j, k) = r;
            b(k, j) = r;
            out.push_back(HermitianOp::hermitize(b));
            CMatrix c = CMatrix::Zero(d, d);
            c(j, k) = cplx(0.0, -r);
            c(k, j) = cplx(0.0, r);
            out.push_back(HermitianOp::hermitize(c));
        }
    }
    return out;
}

class WeightedGramSchmidt {
public:
    explicit WeightedGramSchmidt(const DensityMatrix& rho) : rho_(rho) {}

    bool add(HermitianOp v) {
        const double n0 = weighted_norm_sq(rho_, v);
        if (!(n0 > 0.0)) {
            return false;
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const HermitianOp& e : basis_) {
                v = v - e * weighted_inner(rho_, e, v);
            }
        }
        const double n = weighted_norm_sq(rho_, v);
        if (n <= 1e-10 * n0) {
            return false;
        }
        basis_.push_back(v * (1.0 / std::sqrt(n)));
        return true;
    }

    std::vector<HermitianOp>& basis() { return basis_; }

private:
    const DensityMatrix& rho_;
    std::vector<HermitianOp> basis_;
};

} // namespace

GammaMatrix::GammaMatrix(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw InvalidInput("GammaMatrix: must be square");
    }
    if (entries_.size() == 0) {
        return;
    }
    const double scale = std::max(1.0, max_abs(entries_));
    if (max_abs(entries_ - entries_.adjoint()) > 1e-10 * scale) {
        throw InvalidInput("GammaMatrix: not Hermitian");
    }
    entries_ = (entries_ + entries_.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(entries_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-10 * scale) {
        throw InvalidInput("GammaMatrix: not positive semidefinite");
    }
}

GammaMatrix gamma_matrix(const DensityMatrix& rho, std::span<const HermitianOp> deltas) {
    const int q = static_cast<int>(deltas.size());
    CMatrix g(q, q);
    for (int j = 0; j < q; ++j) {
        require_same_dim(rho.dim(), deltas[j].dim(), "gamma_matrix");
        const CMatrix rd = rho.matrix() * deltas[j].matrix();
        for (int k = 0; k < q; ++k) {
            g(j, k) = (rd * deltas[k].matrix()).trace();
        }
    }
    return GammaMatrix(std::move(g));
}

double holevo_objective(const GammaMatrix& gamma, const RMatrix& w) {
    const RMatrix wq = checked_weight(w, gamma.size());
    const RMatrix p = psd_sqrt(wq);
    return (wq * gamma.re()).trace() + trace_norm(p * gamma.im() * p);
}

HolevoProblem::HolevoProblem(const DensityMatrix& rho, std::vector<HermitianOp> scores,
                             const RMatrix& dbeta, const RMatrix& w)
    : rho_(rho) {
    if (!rho.full_rank()) {
        throw SupportError("holevo: the state must be full rank");
    }
    const int d = rho.dim();
    const HelstromResult hr = helstrom_report(rho, scores, dbeta, w);
    const int q = static_cast<int>(dbeta.cols());
    w_ = checked_weight(w, q);
    sqrt_w_ = psd_sqrt(w_);
    ghb_ = hr.value;
    delta_eff_ = hr.efficient_influence;

    WeightedGramSchmidt gs(rho);
    gs.add(HermitianOp::identity(d));
    int r = 0;
    for (const HermitianOp& s : scores) {
        r += gs.add(s) ? 1 : 0;
    }
    for (const HermitianOp& e : canonical_hermitian_basis(d)) {
        if (static_cast<int>(gs.basis().size()) == d * d) {
            break;
        }
        gs.add(e);
    }
    if (static_cast<int>(gs.basis().size()) != d * d) {
        throw ConvergenceError("holevo: could not complete an orthonormal operator basis");
    }
    basis_.assign(gs.basis().begin() + 1, gs.basis().end());
    const int n = d * d - 1;
    m_ = n - r;

    omega_.resize(n, n);
    for (int a = 0; a < n; ++a) {
        const CMatrix re = rho.matrix() * basis_[a].matrix();
        for (int b = 0; b < n; ++b) {
            omega_(a, b) = (re * basis_[b].matrix()).trace().imag();
        }
    }
    omega_ = (omega_ - omega_.transpose()) / 2.0;

    fixed_.resize(q, r);
    for (int k = 0; k < q; ++k) {
        for (int a = 0; a < r; ++a) {
            fixed_(k, a) = weighted_inner(rho, basis_[a], delta_eff_[k]);
        }
    }
}

RMatrix HolevoProblem::full_coefficients(const RMatrix& x) const {
    if (x.rows() != q() || x.cols() != m_) {
        throw DimensionMismatch("holevo: free coefficients must be q x m");
    }
    RMatrix c(q(), tangent_dim() + m_);
    c << fixed_, x;
    return c;
}

double HolevoProblem::objective(const RMatrix& x) const {
    const RMatrix c = full_coefficients(x);
    const RMatrix a = sqrt_w_ * c * omega_ * c.transpose() * sqrt_w_;
    return (w_ * c * c.transpose()).trace() + trace_norm(a);
}

double HolevoProblem::smoothed(const RMatrix& x, double mu, RMatrix* grad) const {
    if (!(mu > 0.0)) {
        throw InvalidInput("holevo: smoothing parameter must be positive");
    }
    const RMatrix c = full_coefficients(x);
    const RMatrix co = c * omega_;
    const RMatrix a = sqrt_w_ * co * c.transpose() * sqrt_w_;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(a.transpose() * a);
    RVector root = (es.eigenvalues().cwiseMax(0.0).array() + mu * mu).sqrt();
    const double value = (w_ * c * c.transpose()).trace() + root.sum();
    if (grad != nullptr) {
        const RMatrix inv_root = es.eigenvectors() * root.cwiseInverse().asDiagonal() *
                                 es.eigenvectors().transpose();
        const RMatrix g_a = a * inv_root;
        const RMatrix gc = 2.0 * w_ * c - 2.0 * sqrt_w_ * g_a * sqrt_w_ * co;
        *grad = gc.rightCols(m_);
    }
    return value;
}

std::vector<HermitianOp> HolevoProblem::deltas(const RMatrix& x) const {
    const RMatrix c = full_coefficients(x);
    std::vector<HermitianOp> out;
    for (int k = 0; k < q(); ++k) {
        const RVector row = c.row(k).transpose();
        out.push_back(linear_combination(std::span<const double>(row.data(), row.size()), basis_));
    }
    return out;
}

HolevoResult holevo_minimize(const HolevoProblem& pr, const HolevoSolveOptions& opts) {
    if (!(opts.mu_initial > 0.0) || !(opts.mu_final > 0.0) || !(opts.tol > 0.0) ||
        !(opts.mu_factor > 0.0 && opts.mu_factor < 1.0) || opts.max_iters < 0 ||
        opts.stall_window < 1) {
        throw InvalidInput("holevo: solver options must be positive with 0 < mu_factor < 1");
    }
    const int q = pr.q();
    const int m = pr.free_dim();
    HolevoResult res;
    res.ghb = pr.ghb();
    res.d_invariant = pr.d_invariant();
    res.free_dim = m;

    RMatrix best = RMatrix::Zero(q, m);
    res.value = res.d_invariant;
    const double scale = res.d_invariant;
    if (m == 0 || q == 1 || !(scale > 0.0)) {
        // Nothing to optimize: either no freedom or the commutator term vanishes
        // identically (q = 1), where X = 0 minimizes tr W C C^T.
        res.converged = true;
        res.minimizer = pr.deltas(best);
        return res;
    }

    Eigen::SelfAdjointEigenSolver<RMatrix> wes(pr.weight(), Eigen::EigenvaluesOnly);
    double lip = 2.0 * std::max(wes.eigenvalues().maxCoeff(), 1e-12);

    RMatrix x = best;
    double mu = opts.mu_initial * scale;
    const double mu_end = opts.mu_final * scale;
    int iters = 0;
    bool stage_ok = false;
    for (;;) {
        stage_ok = false;
        const double stage_tol = std::max(opts.tol, mu / scale);
        RMatrix y = x;
        double t = 1.0;
        double fx = pr.smoothed(x, mu, nullptr);
        double window_start = fx;
        int window_iters = 0;
        RMatrix g;
        while (iters < opts.max_iters) {
            if (window_iters == opts.stall_window) {
                if (window_start - fx <= opts.tol * scale) {
                    stage_ok = true;
                    break;
                }
                window_start = fx;
                window_iters = 0;
            }
            const double fy = pr.smoothed(y, mu, &g);
            const double cnorm = std::sqrt(pr.fixed_norm() * pr.fixed_norm() + y.squaredNorm()) + 1e-300;
            if (g.norm() * cnorm <= stage_tol * scale) {
                x = y;
                stage_ok = true;
                break;
            }
            RMatrix xn;
            double fn = 0.0;
            for (int bt = 0; bt < 60; ++bt) {
                xn = y - g / lip;
                fn = pr.smoothed(xn, mu, nullptr);
                if (fn <= fy - 0.5 * g.squaredNorm() / lip + 1e-15 * std::abs(fy)) {
                    break;
                }
                lip *= 2.0;
            }
            ++iters;
            ++window_iters;
            const double f_true = pr.objective(xn);
            if (f_true < res.value) {
                res.value = f_true;
                best = xn;
            }
            if (fn > fx) {
                // function-value restart: drop the momentum
                x = xn;
                y = xn;
                fx = fn;
                t = 1.0;
                continue;
            }
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = xn + ((t - 1.0) / tn) * (xn - x);
            x = xn;
            fx = fn;
            t = tn;
            lip *= 0.9;
        }
        const double f_true = pr.objective(x);
        if (f_true < res.value) {
            res.value = f_true;
            best = x;
        }
        if (mu <= mu_end * (1.0 + 1e-12) || iters >= opts.max_iters) {
            break;
        }
        mu = std::max(mu * opts.mu_factor, mu_end);
    }
    res.converged = stage_ok;
    res.iterations = iters;
    res.minimizer = pr.deltas(best);
    return res;
}

HolevoResult holevo_bound(const DensityMatrix& rho, std::vector<HermitianOp> scores,
                          const RMatrix& dbeta, const RMatrix& w,
                          const HolevoSolveOptions& opts) {
    return holevo_minimize(HolevoProblem(rho, std::move(scores), dbeta, w), opts);
}

double d_invariant_bound(const DensityMatrix& rho, std::span<const HermitianOp> delta_eff,
                         const RMatrix& w) {
    return holevo_objective(gamma_matrix(rho, delta_eff), w);
}

BelavkinCheck belavkin_check(const CMatrix& a) {
    if (a.rows() != a.cols() || a.size() == 0) {
        throw InvalidInput("belavkin_check: matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, max_abs(a));
    if (max_abs(a - a.adjoint()) > 1e-10 * scale) {
        throw InvalidInput("belavkin_check: matrix is not Hermitian");
    }
    const CMatrix h = (a + a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-10 * scale) {
        throw InvalidInput("belavkin_check: matrix is not positive semidefinite");
    }
    BelavkinCheck out;
    out.lhs = h.real().trace();
    out.rhs = trace_norm(h.imag());
    out.holds = out.lhs >= out.rhs - 1e-10;
    return out;
}

SandwichReport sandwich_report(double ghb, double x, double d, double slack) {
    if (!std::isfinite(ghb) || !std::isfinite(x) || !std::isfinite(d)) {
        throw InvalidInput("sandwich_report: values must be finite");
    }
    SandwichReport r;
    r.ghb = ghb;
    r.x = x;
    r.d = d;
    auto ratio = [](double num, double den) {
        if (den > 0.0) {
            return num / den;
        }
        return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    };
    r.x_over_ghb = ratio(x, ghb);
    r.d_over_ghb = ratio(d, ghb);
    auto check = [&](double lo, double hi, const char* what) {
        if (lo > hi + slack * std::max(std::abs(lo), std::abs(hi))) {
            r.ok = false;
            std::ostringstream os;
            os << what << " violated (" << lo << " > " << hi << ")";
            r.violations.push_back(os.str());
        }
    };
    check(ghb, x, "ghb <= X");
    check(x, d, "X <= D");
    check(d, 2.0 * ghb, "D <= 2 ghb");
    return r;
}

} // namespace qsemi
