#include "qsemi/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsemi/error.hpp"

namespace qsemi {

namespace {

Eigen::SelfAdjointEigenSolver<CMatrix> eig(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    if (es.info() != Eigen::Success) {
        throw ConvergenceError("Hermitian eigendecomposition failed");
    }
    return es;
}

} // namespace

void require_same_dim(int a, int b, const char* where) {
    if (a != b) {
        std::ostringstream os;
        os << where << ": dimension mismatch (" << a << " vs " << b << ")";
        throw DimensionMismatch(os.str());
    }
}

// ---------------------------------------------------------------------------
// HermitianOp

HermitianOp::HermitianOp(CMatrix m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw InvalidInput("HermitianOp: matrix must be square with dim >= 1");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double skew = (m - m.adjoint()).cwiseAbs().maxCoeff() / 2.0;
    if (!(skew <= kHermitianTol * scale)) {
        std::ostringstream os;
        os << "HermitianOp: matrix is not Hermitian (max |A - A^dagger|/2 = " << skew << ")";
        throw InvalidInput(os.str());
    }
    m_ = (m + m.adjoint()) / 2.0;
}

HermitianOp HermitianOp::hermitize(const CMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw InvalidInput("HermitianOp: matrix must be square with dim >= 1");
    }
    return HermitianOp(CMatrix((m + m.adjoint()) / 2.0), Unchecked{});
}

HermitianOp HermitianOp::identity(int d) {
    return HermitianOp(CMatrix::Identity(d, d), Unchecked{});
}

HermitianOp HermitianOp::zero(int d) {
    return HermitianOp(CMatrix::Zero(d, d), Unchecked{});
}

HermitianOp HermitianOp::diagonal(std::span<const double> values) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                              static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
    }
    return HermitianOp(std::move(m), Unchecked{});
}

HermitianOp HermitianOp::operator+(const HermitianOp& o) const {
    require_same_dim(dim(), o.dim(), "HermitianOp::operator+");
    return HermitianOp(CMatrix(m_ + o.m_), Unchecked{});
}

HermitianOp HermitianOp::operator-(const HermitianOp& o) const {
    require_same_dim(dim(), o.dim(), "HermitianOp::operator-");
    return HermitianOp(CMatrix(m_ - o.m_), Unchecked{});
}

HermitianOp HermitianOp::operator-() const { return HermitianOp(CMatrix(-m_), Unchecked{}); }

HermitianOp HermitianOp::operator*(double s) const {
    return HermitianOp(CMatrix(m_ * s), Unchecked{});
}

HermitianOp& HermitianOp::operator+=(const HermitianOp& o) {
    require_same_dim(dim(), o.dim(), "HermitianOp::operator+=");
    m_ += o.m_;
    return *this;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(const HermitianOp& op, double rank_rel_tol) : op_(op) {
    auto es = eig(op_.matrix());
    const int d = op_.dim();
    // Eigen sorts ascending; store descending.
    eigenvalues_ = es.eigenvalues().reverse();
    eigenvectors_ = es.eigenvectors().rowwise().reverse();

    if (eigenvalues_(d - 1) < -kHermitianTol) {
        std::ostringstream os;
        os << "DensityMatrix: negative eigenvalue " << eigenvalues_(d - 1);
        throw InvalidInput(os.str());
    }
    const double tr = op_.trace();
    if (std::abs(tr - 1.0) > kHermitianTol) {
        std::ostringstream os;
        os.precision(17);
        os << "DensityMatrix: trace " << tr << " differs from 1";
        throw InvalidInput(os.str());
    }
    rank_tol_ = rank_rel_tol * std::max(eigenvalues_(0), 0.0);
    support_rank_ = 0;
    for (int j = 0; j < d; ++j) {
        if (eigenvalues_(j) > rank_tol_) {
            ++support_rank_;
        }
    }
}

DensityMatrix DensityMatrix::from_spectrum(const RVector& eigenvalues,
                                           const CMatrix& eigenvectors) {
    CMatrix m = eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
    return DensityMatrix(HermitianOp::hermitize(m));
}

CMatrix DensityMatrix::to_eigenbasis(const CMatrix& x) const {
    return eigenvectors_.adjoint() * x * eigenvectors_;
}

CMatrix DensityMatrix::from_eigenbasis(const CMatrix& y) const {
    return eigenvectors_ * y * eigenvectors_.adjoint();
}

// ---------------------------------------------------------------------------
// GramMatrix

GramMatrix::GramMatrix(RMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw InvalidInput("GramMatrix: must be square");
    }
    if (entries_.size() == 0) {
        return;
    }
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidInput("GramMatrix: not symmetric");
    }
    entries_ = (entries_ + entries_.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(entries_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-10 * scale) {
        throw InvalidInput("GramMatrix: not positive semidefinite");
    }
}

double GramMatrix::condition_number() const {
    if (entries_.size() == 0) {
        return 1.0;
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(entries_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
    if (hi <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (lo <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return hi / lo;
}

// ---------------------------------------------------------------------------
// Products and inner products

HermitianOp jordan(const HermitianOp& a, const HermitianOp& b) {
    require_same_dim(a.dim(), b.dim(), "jordan");
    const CMatrix ab = a.matrix() * b.matrix();
    return HermitianOp::hermitize(ab);
}

double weighted_inner(const DensityMatrix& rho, const HermitianOp& h, const HermitianOp& g) {
    require_same_dim(rho.dim(), h.dim(), "weighted_inner");
    require_same_dim(h.dim(), g.dim(), "weighted_inner");
    // tr rho (h o g) = Re tr(rho h g) for Hermitian rho, h, g.
    const CMatrix rh = rho.matrix() * h.matrix();
    return (rh.transpose().array() * g.matrix().array()).sum().real();
}

GramMatrix gram(const DensityMatrix& rho, std::span<const HermitianOp> ops) {
    const auto m = static_cast<Eigen::Index>(ops.size());
    RMatrix g(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = j; k < m; ++k) {
            g(j, k) = weighted_inner(rho, ops[j], ops[k]);
            g(k, j) = g(j, k);
        }
    }
    return GramMatrix(std::move(g));
}

RMatrix cross_gram(const DensityMatrix& rho, std::span<const HermitianOp> a,
                   std::span<const HermitianOp> b) {
    RMatrix g(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t j = 0; j < a.size(); ++j) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                weighted_inner(rho, a[j], b[k]);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// SLD and commutation superoperator

namespace {

/// Applies an eigenbasis kernel entry_jk -> factor(j, k) * x_jk on the support
/// of rho; returns the transformed operator and the Frobenius mass of x that
/// fell outside the support.
template <class Factor>
std::pair<HermitianOp, double> support_kernel(const DensityMatrix& rho, const HermitianOp& x,
                                              double rank_tol, Factor factor) {
    const int d = rho.dim();
    const RVector& lam = rho.eigenvalues();
    const double tol = rank_tol < 0.0 ? rho.rank_tol() : rank_tol;
    const CMatrix xt = rho.to_eigenbasis(x.matrix());
    CMatrix st = CMatrix::Zero(d, d);
    double dropped = 0.0;
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            const double s = lam(j) + lam(k);
            if (s > tol) {
                st(j, k) = factor(lam(j), lam(k)) * xt(j, k);
            } else {
                dropped += std::norm(xt(j, k));
            }
        }
    }
    return {HermitianOp::hermitize(rho.from_eigenbasis(st)), std::sqrt(dropped)};
}

} // namespace

HermitianOp solve_sld(const DensityMatrix& rho, const HermitianOp& x, double rank_tol) {
    require_same_dim(rho.dim(), x.dim(), "solve_sld");
    auto [s, dropped] = support_kernel(rho, x, rank_tol, [](double lj, double lk) {
        return cplx(2.0 / (lj + lk), 0.0);
    });
    const double xn = x.frobenius_norm();
    if (dropped > 1e-9 * xn + 1e-300) {
        std::ostringstream os;
        os << "solve_sld: outside-support residual " << dropped << " (|x|_F = " << xn << ")";
        throw SupportError(os.str());
    }
    return s;
}

HermitianOp commutation_superop(const DensityMatrix& rho, const HermitianOp& h,
                                double rank_tol) {
    require_same_dim(rho.dim(), h.dim(), "commutation_superop");
    // rho o (D h) = i [rho, h]; the right-hand side is what must lie on the support.
    const HermitianOp rhs = i_commutator(rho.op(), h);
    auto [dh, dropped] = support_kernel(rho, h, rank_tol, [](double lj, double lk) {
        return cplx(0.0, 2.0 * (lj - lk) / (lj + lk));
    });
    (void)dropped;
    // Entries outside the support of h are irrelevant unless i[rho, h] has
    // weight there; check the reconstruction directly.
    const CMatrix rt = rho.to_eigenbasis(rhs.matrix());
    const RVector& lam = rho.eigenvalues();
    const double tol = rank_tol < 0.0 ? rho.rank_tol() : rank_tol;
    double miss = 0.0;
    for (int j = 0; j < rho.dim(); ++j) {
        for (int k = 0; k < rho.dim(); ++k) {
            if (lam(j) + lam(k) <= tol) {
                miss += std::norm(rt(j, k));
            }
        }
    }
    if (std::sqrt(miss) > 1e-9 * rhs.frobenius_norm() + 1e-300) {
        throw SupportError("commutation_superop: i[rho, h] has weight outside the support");
    }
    return dh;
}

// ---------------------------------------------------------------------------
// Matrix functions

HermitianOp matrix_function(const HermitianOp& a, const std::function<double(double)>& f,
                            double domain_guard) {
    auto es = eig(a.matrix());
    RVector vals = es.eigenvalues();
    for (Eigen::Index j = 0; j < vals.size(); ++j) {
        if (!(vals(j) > domain_guard)) {
            std::ostringstream os;
            os << "matrix_function: eigenvalue " << vals(j) << " outside domain (> "
               << domain_guard << ")";
            throw DomainError(os.str());
        }
        vals(j) = f(vals(j));
    }
    const CMatrix& v = es.eigenvectors();
    return HermitianOp::hermitize(v * vals.cast<cplx>().asDiagonal() * v.adjoint());
}

HermitianOp log_op(const HermitianOp& a, double guard) {
    return matrix_function(a, [](double x) { return std::log(x); }, guard);
}

CMatrix unitary_exp(const HermitianOp& h, double t) {
    auto es = eig(h.matrix());
    CVector phases(es.eigenvalues().size());
    for (Eigen::Index j = 0; j < phases.size(); ++j) {
        phases(j) = std::exp(cplx(0.0, -t * es.eigenvalues()(j)));
    }
    const CMatrix& v = es.eigenvectors();
    return v * phases.asDiagonal() * v.adjoint();
}

// ---------------------------------------------------------------------------
// Projections and small linear algebra

RMatrix pseudo_inverse(const RMatrix& a, double rel_tol) {
    if (a.size() == 0) {
        return RMatrix(a.cols(), a.rows());
    }
    Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector& s = svd.singularValues();
    const double cut = rel_tol * s(0);
    RVector inv = RVector::Zero(s.size());
    for (Eigen::Index j = 0; j < s.size(); ++j) {
        if (s(j) > cut && s(j) > 0.0) {
            inv(j) = 1.0 / s(j);
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

RMatrix psd_sqrt(const RMatrix& w) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es((w + w.transpose()) / 2.0);
    RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

double trace_norm(const RMatrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<RMatrix> svd(a);
    return svd.singularValues().sum();
}

HermitianOp linear_combination(std::span<const double> coeffs, std::span<const HermitianOp> ops) {
    if (coeffs.size() != ops.size() || ops.empty()) {
        throw DimensionMismatch("linear_combination: coefficient count mismatch or empty basis");
    }
    CMatrix m = CMatrix::Zero(ops[0].dim(), ops[0].dim());
    for (std::size_t j = 0; j < ops.size(); ++j) {
        require_same_dim(ops[0].dim(), ops[j].dim(), "linear_combination");
        m += coeffs[j] * ops[j].matrix();
    }
    return HermitianOp::hermitize(m);
}

SpanProjection project_onto_span(const DensityMatrix& rho, const HermitianOp& delta,
                                 std::span<const HermitianOp> basis, double pinv_tol) {
    require_same_dim(rho.dim(), delta.dim(), "project_onto_span");
    if (basis.empty()) {
        return {HermitianOp::zero(rho.dim()), 0.0, RVector()};
    }
    const GramMatrix g = gram(rho, basis);
    RVector b(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        b(static_cast<Eigen::Index>(j)) = weighted_inner(rho, basis[j], delta);
    }
    const RMatrix gp = pseudo_inverse(g.entries(), pinv_tol);
    RVector c = gp * b;
    HermitianOp proj = linear_combination(std::span<const double>(c.data(), c.size()), basis);
    const double nsq = std::max(0.0, b.dot(c));
    return {std::move(proj), nsq, std::move(c)};
}

// ---------------------------------------------------------------------------
// Fixtures

HermitianOp pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return HermitianOp(m);
}

HermitianOp pauli_y() {
    CMatrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return HermitianOp(m);
}

HermitianOp pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return HermitianOp(m);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

HermitianOp i_commutator(const HermitianOp& a, const HermitianOp& b) {
    require_same_dim(a.dim(), b.dim(), "i_commutator");
    const CMatrix ab = a.matrix() * b.matrix();
    return HermitianOp::hermitize(cplx(0.0, 1.0) * (ab - ab.adjoint()));
}

CMatrix annihilation(int d) {
    if (d < 1) {
        throw InvalidInput("oscillator truncation must be at least 1");
    }
    CMatrix a = CMatrix::Zero(d, d);
    for (int n = 1; n < d; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

HermitianOp number_op(int d) {
    const CMatrix a = annihilation(d);
    return HermitianOp::hermitize(a.adjoint() * a);
}

HermitianOp quadrature_x(int d) {
    const CMatrix a = annihilation(d);
    return HermitianOp::hermitize((a + a.adjoint()) / std::sqrt(2.0));
}

HermitianOp quadrature_p(int d) {
    const CMatrix a = annihilation(d);
    return HermitianOp::hermitize(cplx(0.0, 1.0) * (a.adjoint() - a) / std::sqrt(2.0));
}

} // namespace qsemi
