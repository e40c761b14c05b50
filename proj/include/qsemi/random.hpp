#pragma once

#include <cstdint>
#include <random>

#include "qsemi/operators.hpp"

namespace qsemi {

using Rng = std::mt19937_64;

/// Independent stream for item `index` of a seeded batch, so batch results do
/// not depend on evaluation order or thread count.
Rng stream_rng(std::uint64_t seed, std::uint64_t index);

/// d x cols matrix of i.i.d. standard complex Gaussians (real and imaginary
/// parts each N(0, 1/2)).
CMatrix ginibre(Rng& rng, int rows, int cols);

/// Hilbert-Schmidt-uniform random density matrix: G G^dagger / tr(G G^dagger).
DensityMatrix random_density_matrix(Rng& rng, int d);

/// Random Hermitian operator with Gaussian entries (GUE-like, unit scale).
HermitianOp random_hermitian(Rng& rng, int d);

/// Random Hermitian operator with zero mean under rho, scaled to unit weighted norm.
HermitianOp random_zero_mean(Rng& rng, const DensityMatrix& rho);

/// Random real PSD matrix B^T B with B of shape n x n.
RMatrix random_psd(Rng& rng, int n);

/// Random complex PSD matrix B^dagger B; rank may be reduced by passing rank < n.
CMatrix random_complex_psd(Rng& rng, int n, int rank);

/// Random unit vector in C^d.
CVector random_unit_vector(Rng& rng, int d);

} // namespace qsemi
