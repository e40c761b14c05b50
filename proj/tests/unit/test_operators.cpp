#include <cmath>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "qsemi/error.hpp"
#include "qsemi/operators.hpp"
#include "qsemi/random.hpp"

using namespace qsemi;
using qsemi::testing::bloch;
using qsemi::testing::diag_state;

TEST(HermitianOp, RejectsNonHermitian) {
    CMatrix m(2, 2);
    m << 0, 1, 0, 0;
    EXPECT_THROW(HermitianOp{m}, InvalidInput);
}

TEST(HermitianOp, ToleranceScalesWithLargeEntries) {
    CMatrix m(2, 2);
    m << 1e6, 1.0, 1.0 + 1e-8, 0;
    EXPECT_NO_THROW(HermitianOp{m});
    m(1, 0) = 1.0 + 1e-4;
    EXPECT_THROW(HermitianOp{m}, InvalidInput);
}

TEST(DensityMatrix, ValidatesTraceAndPositivity) {
    const double bad_trace[] = {0.5, 0.6};
    EXPECT_THROW(DensityMatrix(HermitianOp::diagonal(bad_trace)), InvalidInput);
    const double negative[] = {1.2, -0.2};
    EXPECT_THROW(DensityMatrix(HermitianOp::diagonal(negative)), InvalidInput);
}

TEST(DensityMatrix, SpectrumDescendingAndUnitaryEigenvectors) {
    Rng rng = stream_rng(7, 0);
    const DensityMatrix rho = random_density_matrix(rng, 4);
    for (int j = 0; j + 1 < 4; ++j) {
        EXPECT_GE(rho.eigenvalues()(j), rho.eigenvalues()(j + 1));
    }
    const CMatrix& v = rho.eigenvectors();
    EXPECT_LE((v.adjoint() * v - CMatrix::Identity(4, 4)).norm(), 1e-10);
    EXPECT_EQ(rho.support_rank(), 4);
}

TEST(DensityMatrix, PureStateHasRankOne) {
    const DensityMatrix rho = bloch(0.0, 0.0, 1.0);
    EXPECT_EQ(rho.support_rank(), 1);
    EXPECT_FALSE(rho.full_rank());
}

TEST(Jordan, Examples) {
    const HermitianOp a = pauli_x() * 0.3 + pauli_z();
    EXPECT_OP_NEAR(jordan(HermitianOp::identity(2), a), a, 1e-15);
    EXPECT_OP_NEAR(jordan(pauli_x(), pauli_y()), HermitianOp::zero(2), 1e-15);
    EXPECT_OP_NEAR(jordan(pauli_x(), pauli_x()), HermitianOp::identity(2), 1e-15);
    EXPECT_THROW(jordan(pauli_x(), HermitianOp::identity(3)), DimensionMismatch);
}

TEST(WeightedInner, Examples) {
    Rng rng = stream_rng(1, 0);
    const DensityMatrix r = random_density_matrix(rng, 3);
    const HermitianOp i3 = HermitianOp::identity(3);
    EXPECT_NEAR(weighted_inner(r, i3, i3), 1.0, 1e-14);

    const DensityMatrix mixed = diag_state(0.5, 0.5);
    EXPECT_NEAR(weighted_inner(mixed, pauli_z(), pauli_z()), 1.0, 1e-15);

    // tr diag(3/4,1/4) sz = 3/4 - 1/4
    EXPECT_NEAR(weighted_inner(diag_state(0.75, 0.25), pauli_z(), HermitianOp::identity(2)), 0.5,
                1e-15);
}

TEST(Gram, Examples) {
    const DensityMatrix mixed = diag_state(0.5, 0.5);
    const HermitianOp one[] = {HermitianOp::identity(2)};
    EXPECT_NEAR(gram(mixed, one)(0, 0), 1.0, 1e-15);

    const HermitianOp paulis[] = {pauli_x(), pauli_y(), pauli_z()};
    EXPECT_LE((gram(mixed, paulis).entries() - RMatrix::Identity(3, 3)).norm(), 1e-15);

    const HermitianOp xz[] = {pauli_x(), pauli_z()};
    EXPECT_LE((gram(diag_state(0.75, 0.25), xz).entries() - RMatrix::Identity(2, 2)).norm(),
              1e-15);
}

TEST(GramMatrix, RejectsIndefinite) {
    RMatrix m(2, 2);
    m << 1, 2, 2, 1;
    EXPECT_THROW(GramMatrix{m}, InvalidInput);
}

TEST(SolveSld, Examples) {
    EXPECT_OP_NEAR(solve_sld(diag_state(0.5, 0.5), pauli_z() * 0.5), pauli_z(), 1e-14);
    EXPECT_OP_NEAR(solve_sld(diag_state(0.75, 0.25), pauli_x() * 0.5), pauli_x(), 1e-14);
    EXPECT_OP_NEAR(solve_sld(diag_state(0.75, 0.25), HermitianOp::zero(2)), HermitianOp::zero(2),
                   0.0);
}

TEST(SolveSld, OutsideSupportResidualIsSignalled) {
    // pure |0><0|: x = |1><1| has no component on the support
    const DensityMatrix pure = bloch(0.0, 0.0, 1.0);
    const double kernel[] = {0.0, 1.0};
    EXPECT_THROW(solve_sld(pure, HermitianOp::diagonal(kernel)), SupportError);
    // off-diagonal x is reachable: lambda_0 + lambda_1 = 1 > 0
    EXPECT_NO_THROW(solve_sld(pure, pauli_x()));
}

TEST(SolveSld, ReconstructsRandomDerivatives) {
    for (int d = 2; d <= 5; ++d) {
        for (int trial = 0; trial < 20; ++trial) {
            Rng rng = stream_rng(100 + d, trial);
            const DensityMatrix rho = random_density_matrix(rng, d);
            const HermitianOp x = random_hermitian(rng, d);
            const HermitianOp s = solve_sld(rho, x);
            EXPECT_LE((jordan(rho.op(), s) - x).frobenius_norm(), 1e-9 * x.frobenius_norm());
        }
    }
}

TEST(CommutationSuperop, Examples) {
    EXPECT_OP_NEAR(commutation_superop(diag_state(0.5, 0.5), pauli_x()), HermitianOp::zero(2),
                   1e-15);
    const DensityMatrix r = diag_state(0.75, 0.25);
    EXPECT_OP_NEAR(commutation_superop(r, pauli_x()), -pauli_y(), 1e-14);
    EXPECT_OP_NEAR(commutation_superop(r, HermitianOp::identity(2)), HermitianOp::zero(2), 1e-15);
}

TEST(CommutationSuperop, DefiningIdentityAndZeroMean) {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = stream_rng(200, trial);
        const int d = 2 + trial % 3;
        const DensityMatrix rho = random_density_matrix(rng, d);
        const HermitianOp h = random_hermitian(rng, d);
        const HermitianOp g = random_hermitian(rng, d);
        const HermitianOp dh = commutation_superop(rho, h);
        // -i tr rho [g, h]
        const CMatrix gh = g.matrix() * h.matrix();
        const double rhs = (cplx(0, -1) * (rho.matrix() * (gh - gh.adjoint())).trace()).real();
        EXPECT_NEAR(weighted_inner(rho, g, dh), rhs, 1e-9);
        EXPECT_NEAR(weighted_inner(rho, HermitianOp::identity(d), dh), 0.0, 1e-10);
        // rho o Dh = i[rho, h]
        EXPECT_OP_NEAR(jordan(rho.op(), dh), i_commutator(rho.op(), h), 1e-10);
    }
}

TEST(MatrixFunction, Examples) {
    Rng rng = stream_rng(3, 0);
    const HermitianOp a = random_hermitian(rng, 3);
    EXPECT_OP_NEAR(matrix_function(a, [](double x) { return x; }), a, 1e-13);

    const double e1[] = {std::exp(1.0), 1.0};
    const double want1[] = {1.0, 0.0};
    EXPECT_OP_NEAR(log_op(HermitianOp::diagonal(e1)), HermitianOp::diagonal(want1), 1e-15);

    const double q[] = {0.75, 0.25};
    const HermitianOp l = log_op(HermitianOp::diagonal(q));
    EXPECT_NEAR(l(0, 0).real(), -0.28768207245178, 1e-12);
    EXPECT_NEAR(l(1, 1).real(), -1.38629436111989, 1e-12);
}

TEST(MatrixFunction, DomainGuard) {
    const double v[] = {0.5, -0.1};
    EXPECT_THROW(log_op(HermitianOp::diagonal(v)), DomainError);
}

TEST(ProjectOntoSpan, Examples) {
    Rng rng = stream_rng(4, 0);
    const DensityMatrix rho = random_density_matrix(rng, 3);
    const HermitianOp b0 = random_zero_mean(rng, rho);
    const HermitianOp b1 = random_zero_mean(rng, rho);
    const HermitianOp basis[] = {b0, b1};
    const HermitianOp member = b0 * 0.3 - b1 * 1.7;
    const SpanProjection p = project_onto_span(rho, member, basis);
    EXPECT_OP_NEAR(p.projection, member, 1e-10);
    EXPECT_NEAR(p.norm_sq, weighted_norm_sq(rho, member), 1e-10);

    const DensityMatrix r = diag_state(0.75, 0.25);
    const HermitianOp delta = pauli_z() - HermitianOp::identity(2) * 0.5;
    const HermitianOp sx[] = {pauli_x()};
    const SpanProjection z = project_onto_span(r, delta, sx);
    EXPECT_OP_NEAR(z.projection, HermitianOp::zero(2), 1e-15);
    EXPECT_NEAR(z.norm_sq, 0.0, 1e-15);
}

TEST(ProjectOntoSpan, DependentBasisUsesPseudoinverse) {
    const DensityMatrix r = diag_state(0.6, 0.4);
    const HermitianOp basis[] = {pauli_x(), pauli_x() * 2.0};
    const SpanProjection p = project_onto_span(r, pauli_x() + pauli_y(), basis);
    EXPECT_OP_NEAR(p.projection, pauli_x(), 1e-10);
}

TEST(Properties, CauchySchwarzIdempotencePythagoras) {
    for (int trial = 0; trial < 50; ++trial) {
        Rng rng = stream_rng(300, trial);
        const int d = 2 + trial % 3;
        const DensityMatrix rho = random_density_matrix(rng, d);
        const HermitianOp h = random_hermitian(rng, d);
        const HermitianOp g = random_hermitian(rng, d);
        const double hg = weighted_inner(rho, h, g);
        EXPECT_LE(hg * hg, weighted_norm_sq(rho, h) * weighted_norm_sq(rho, g) * (1 + 1e-12));
        EXPECT_NEAR(hg, weighted_inner(rho, g, h), 1e-13);

        std::vector<HermitianOp> basis;
        for (int k = 0; k < d; ++k) {
            basis.push_back(random_hermitian(rng, d));
        }
        const HermitianOp delta = random_hermitian(rng, d);
        const SpanProjection p = project_onto_span(rho, delta, basis);
        const SpanProjection pp = project_onto_span(rho, p.projection, basis);
        EXPECT_LE((pp.projection - p.projection).frobenius_norm(), 1e-9);
        const double total = weighted_norm_sq(rho, delta);
        const double resid = weighted_norm_sq(rho, delta - p.projection);
        EXPECT_NEAR(total, p.norm_sq + resid, 1e-9);
        EXPECT_LE(p.norm_sq, total + 1e-12);
    }
}

TEST(Oscillator, CommutatorAwayFromCutoff) {
    const int d = 8;
    const HermitianOp x = quadrature_x(d);
    const HermitianOp p = quadrature_p(d);
    // [x, p] = i except in the last level
    const CMatrix c = x.matrix() * p.matrix() - p.matrix() * x.matrix();
    for (int n = 0; n + 1 < d; ++n) {
        EXPECT_NEAR(c(n, n).imag(), 1.0, 1e-13);
    }
    EXPECT_NEAR(number_op(d)(3, 3).real(), 3.0, 1e-15);
}
