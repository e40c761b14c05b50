#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qsemi {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDefaultRankRelTol = 1e-10;
inline constexpr double kDefaultPinvTol = 1e-10;

/// Dense self-adjoint operator on a d-dimensional Hilbert space.
///
/// The checked constructor rejects matrices whose anti-Hermitian part exceeds
/// 1e-12 entrywise (scaled by the largest entry when that exceeds one) and
/// then stores the exactly Hermitian part.
class HermitianOp {
public:
    explicit HermitianOp(CMatrix m);

    /// Stores (m + m^dagger)/2 without validation.
    static HermitianOp hermitize(const CMatrix& m);
    static HermitianOp identity(int d);
    static HermitianOp zero(int d);
    static HermitianOp diagonal(std::span<const double> values);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }
    cplx operator()(int r, int c) const { return m_(r, c); }

    double trace() const { return m_.trace().real(); }
    double frobenius_norm() const { return m_.norm(); }

    HermitianOp operator+(const HermitianOp& o) const;
    HermitianOp operator-(const HermitianOp& o) const;
    HermitianOp operator-() const;
    HermitianOp operator*(double s) const;
    friend HermitianOp operator*(double s, const HermitianOp& a) { return a * s; }
    HermitianOp& operator+=(const HermitianOp& o);

private:
    struct Unchecked {};
    HermitianOp(CMatrix m, Unchecked) : m_(std::move(m)) {}
    CMatrix m_;
};

/// Positive semidefinite unit-trace operator with a cached eigendecomposition.
///
/// Eigenvalues are stored in descending order. The support is the set of
/// eigenvectors with eigenvalue above rank_tol() = 1e-10 * lambda_max (the
/// relative factor is configurable).
class DensityMatrix {
public:
    explicit DensityMatrix(const HermitianOp& op, double rank_rel_tol = kDefaultRankRelTol);
    explicit DensityMatrix(const CMatrix& m, double rank_rel_tol = kDefaultRankRelTol)
        : DensityMatrix(HermitianOp(m), rank_rel_tol) {}

    /// Builds rho = V diag(lambda) V^dagger from a spectral description.
    static DensityMatrix from_spectrum(const RVector& eigenvalues, const CMatrix& eigenvectors);

    int dim() const { return op_.dim(); }
    const HermitianOp& op() const { return op_; }
    const CMatrix& matrix() const { return op_.matrix(); }
    const RVector& eigenvalues() const { return eigenvalues_; }
    const CMatrix& eigenvectors() const { return eigenvectors_; }
    int support_rank() const { return support_rank_; }
    double rank_tol() const { return rank_tol_; }
    bool full_rank() const { return support_rank_ == dim(); }
    double min_eigenvalue() const { return eigenvalues_(eigenvalues_.size() - 1); }

    /// V^dagger x V
    CMatrix to_eigenbasis(const CMatrix& x) const;
    /// V y V^dagger
    CMatrix from_eigenbasis(const CMatrix& y) const;

private:
    HermitianOp op_;
    RVector eigenvalues_;
    CMatrix eigenvectors_;
    int support_rank_ = 0;
    double rank_tol_ = 0.0;
};

/// Real symmetric positive semidefinite Gram matrix, e.g. the Helstrom
/// information K = <S, S>.
class GramMatrix {
public:
    explicit GramMatrix(RMatrix entries);
    const RMatrix& entries() const { return entries_; }
    int size() const { return static_cast<int>(entries_.rows()); }
    double operator()(int j, int k) const { return entries_(j, k); }
    /// Ratio of largest to smallest eigenvalue; infinity when singular.
    double condition_number() const;

private:
    RMatrix entries_;
};

void require_same_dim(int a, int b, const char* where);

/// (ab + ba)/2
HermitianOp jordan(const HermitianOp& a, const HermitianOp& b);

/// tr rho (h o g), the rho-weighted inner product.
double weighted_inner(const DensityMatrix& rho, const HermitianOp& h, const HermitianOp& g);

/// Squared weighted norm <h, h>.
inline double weighted_norm_sq(const DensityMatrix& rho, const HermitianOp& h) {
    return weighted_inner(rho, h, h);
}

GramMatrix gram(const DensityMatrix& rho, std::span<const HermitianOp> ops);

/// Rectangular matrix <A, B>_jk = <A_j, B_k>.
RMatrix cross_gram(const DensityMatrix& rho, std::span<const HermitianOp> a,
                   std::span<const HermitianOp> b);

/// Symmetric logarithmic derivative: solves rho o S = x on the support of rho.
///
/// rank_tol < 0 selects rho.rank_tol(). Entries with lambda_j + lambda_k below
/// the tolerance are zeroed, giving the canonical member of the equivalence
/// class. Throws SupportError if x has weight outside the support.
HermitianOp solve_sld(const DensityMatrix& rho, const HermitianOp& x, double rank_tol = -1.0);

/// Commutation superoperator: the operator D h with <g, D h> = -i tr rho [g, h].
HermitianOp commutation_superop(const DensityMatrix& rho, const HermitianOp& h,
                                double rank_tol = -1.0);

/// Spectral matrix function. Every eigenvalue must exceed domain_guard.
HermitianOp matrix_function(const HermitianOp& a, const std::function<double(double)>& f,
                            double domain_guard = -std::numeric_limits<double>::infinity());

/// Natural logarithm restricted to eigenvalues above guard.
HermitianOp log_op(const HermitianOp& a, double guard = 0.0);

/// exp(-i t h), the unitary generated by h.
CMatrix unitary_exp(const HermitianOp& h, double t);

struct SpanProjection {
    HermitianOp projection;
    double norm_sq = 0.0;
    RVector coefficients;  ///< projection = sum_j coefficients[j] * basis[j]
};

/// Weighted least-squares projection of delta onto span(basis) using a
/// truncated Moore-Penrose pseudoinverse of the basis Gram matrix.
SpanProjection project_onto_span(const DensityMatrix& rho, const HermitianOp& delta,
                                 std::span<const HermitianOp> basis,
                                 double pinv_tol = kDefaultPinvTol);

/// Moore-Penrose pseudoinverse with singular values below rel_tol * sigma_max dropped.
RMatrix pseudo_inverse(const RMatrix& a, double rel_tol = kDefaultPinvTol);

/// Symmetric PSD square root (negative eigenvalues clamped to zero).
RMatrix psd_sqrt(const RMatrix& w);

/// Sum of singular values.
double trace_norm(const RMatrix& a);

HermitianOp linear_combination(std::span<const double> coeffs, std::span<const HermitianOp> ops);

HermitianOp pauli_x();
HermitianOp pauli_y();
HermitianOp pauli_z();

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// i[a, b] as a Hermitian operator.
HermitianOp i_commutator(const HermitianOp& a, const HermitianOp& b);

/// Truncated harmonic oscillator on levels 0..d-1: annihilation a (not Hermitian),
/// number a^dagger a, quadratures x = (a + a^dagger)/sqrt2 and p = i(a^dagger - a)/sqrt2.
CMatrix annihilation(int d);
HermitianOp number_op(int d);
HermitianOp quadrature_x(int d);
HermitianOp quadrature_p(int d);

} // namespace qsemi
