#include "qsemi/random.hpp"

#include <cmath>

namespace qsemi {

Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5eed5eedU};
    return Rng(seq);
}

CMatrix ginibre(Rng& rng, int rows, int cols) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    CMatrix g(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            const double re = n(rng);
            const double im = n(rng);
            g(i, j) = cplx(re, im);
        }
    }
    return g;
}

DensityMatrix random_density_matrix(Rng& rng, int d) {
    const CMatrix g = ginibre(rng, d, d);
    CMatrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix(HermitianOp::hermitize(m));
}

HermitianOp random_hermitian(Rng& rng, int d) {
    const CMatrix g = ginibre(rng, d, d);
    return HermitianOp::hermitize(g);
}

HermitianOp random_zero_mean(Rng& rng, const DensityMatrix& rho) {
    HermitianOp h = random_hermitian(rng, rho.dim());
    const double mean = weighted_inner(rho, h, HermitianOp::identity(rho.dim()));
    h = h - HermitianOp::identity(rho.dim()) * mean;
    const double n = std::sqrt(weighted_norm_sq(rho, h));
    return n > 0.0 ? h * (1.0 / n) : h;
}

RMatrix random_psd(Rng& rng, int n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    RMatrix b(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            b(i, j) = nd(rng);
        }
    }
    return b.transpose() * b;
}

CMatrix random_complex_psd(Rng& rng, int n, int rank) {
    const CMatrix b = ginibre(rng, rank, n);
    CMatrix a = b.adjoint() * b;
    return (a + a.adjoint()) / 2.0;
}

CVector random_unit_vector(Rng& rng, int d) {
    CVector v = ginibre(rng, d, 1).col(0);
    return v / v.norm();
}

} // namespace qsemi
