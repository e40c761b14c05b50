#include <cmath>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "qsemi/bounds.hpp"
#include "qsemi/error.hpp"
#include "qsemi/models.hpp"
#include "qsemi/random.hpp"

using namespace qsemi;
using qsemi::testing::bloch;
using qsemi::testing::diag_state;

TEST(F0Family, ParameterCount) {
    Rng rng = stream_rng(1, 0);
    EXPECT_EQ(f0_family(2, random_density_matrix(rng, 2)).p(), 3);
    EXPECT_EQ(f0_family(3, random_density_matrix(rng, 3)).p(), 8);
}

TEST(F0Family, TruthReproducedExactly) {
    for (int d = 2; d <= 5; ++d) {
        Rng rng = stream_rng(2, d);
        const DensityMatrix rho = random_density_matrix(rng, d);
        const ParametricModel m = f0_family(d, rho);
        EXPECT_LE(qsemi::testing::max_diff(m.rho_at(m.theta0()).matrix(), rho.matrix()), 1e-15);
    }
}

TEST(F0Family, RejectsBoundary) {
    EXPECT_THROW(f0_family(2, bloch(0, 0, 1)), SupportError);
    EXPECT_THROW(f0_family(1, DensityMatrix(HermitianOp::identity(1))), InvalidInput);
}

TEST(F0Family, FiniteDifferenceMatchesAnalytic) {
    Rng rng = stream_rng(3, 0);
    const DensityMatrix rho = random_density_matrix(rng, 3);
    const ParametricModel m = f0_family(3, rho);
    for (int j = 0; j < m.p(); ++j) {
        const HermitianOp fd = finite_diff_drho(m, m.theta0(), j, 1e-4);
        EXPECT_OP_NEAR(fd, m.drho_at(m.theta0(), j), 1e-8);
        EXPECT_NEAR(m.drho_at(m.theta0(), j).trace(), 0.0, 1e-8);
    }
    // direction a_1: derivative is a_1 - a_0 = diag(-1, 1, 0)
    const double want[] = {-1.0, 1.0, 0.0};
    EXPECT_OP_NEAR(m.drho_at(m.theta0(), 0), HermitianOp::diagonal(want), 0.0);
}

TEST(ExponentialSubmodel, Examples) {
    const DensityMatrix mixed = diag_state(0.5, 0.5);
    const ParametricModel m = exponential_submodel({mixed, pauli_z(), SubmodelKind::Exponential});
    RVector t(1);
    t(0) = 0.0;
    EXPECT_OP_NEAR(m.rho_at(t).op(), mixed.op(), 1e-15);
    const double s = 0.37;
    t(0) = s;
    const double z = std::exp(s) + std::exp(-s);
    const double want[] = {std::exp(s) / z, std::exp(-s) / z};
    EXPECT_OP_NEAR(m.rho_at(t).op(), HermitianOp::diagonal(want), 1e-14);
}

TEST(TanhSubmodel, Examples) {
    Rng rng = stream_rng(5, 0);
    const DensityMatrix rho = random_density_matrix(rng, 3);
    const HermitianOp h = random_zero_mean(rng, rho);
    const ParametricModel m = tanh_submodel({rho, h, SubmodelKind::Tanh});
    EXPECT_OP_NEAR(m.truth().op(), rho.op(), 1e-14);
    EXPECT_THROW(tanh_submodel({rho, h, SubmodelKind::Exponential}), InvalidInput);
}

TEST(Submodels, RejectNonZeroMeanDirection) {
    const DensityMatrix r = diag_state(0.75, 0.25);
    EXPECT_THROW(exponential_submodel({r, pauli_z(), SubmodelKind::Exponential}), InvalidInput);
}

class SubmodelScore : public ::testing::TestWithParam<SubmodelKind> {};

TEST_P(SubmodelScore, ScoreAtTruthIsDirection) {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = stream_rng(6, trial);
        const int d = 2 + trial % 3;
        const DensityMatrix rho = random_density_matrix(rng, d);
        const HermitianOp h = random_zero_mean(rng, rho);
        const ParametricModel m = smooth_family(rho, {h}, GetParam());
        const HermitianOp fd = finite_diff_drho(m, m.theta0(), 0);
        const HermitianOp s = solve_sld(rho, fd);
        EXPECT_LE(std::sqrt(weighted_norm_sq(rho, s - h)), 1e-5);
        // analytic derivative agrees with finite differences and is traceless
        EXPECT_OP_NEAR(m.drho_at(m.theta0(), 0), fd, 1e-7);
        RVector t(1);
        t(0) = 0.3;
        EXPECT_NEAR(m.drho_at(t, 0).trace(), 0.0, 1e-8);
        EXPECT_OP_NEAR(m.drho_at(t, 0), finite_diff_drho(m, t, 0), 1e-7);
    }
}

INSTANTIATE_TEST_SUITE_P(Kinds, SubmodelScore,
                         ::testing::Values(SubmodelKind::Exponential, SubmodelKind::Tanh));

TEST(TanhWeight, UnitAtZero) {
    // f(u) = 1 + tanh(u/2) so f(0) = 1: the family passes through rho
    const HermitianOp z = HermitianOp::zero(2);
    const HermitianOp f = matrix_function(z, [](double u) { return 1.0 + std::tanh(u / 2.0); });
    EXPECT_OP_NEAR(f, HermitianOp::identity(2), 0.0);
}

TEST(DisplacementModel, Examples) {
    const DensityMatrix r = diag_state(0.7, 0.3);
    const ParametricModel commuting = displacement_model(r, pauli_z() * 0.5);
    RVector b(1);
    b(0) = 0.8;
    EXPECT_OP_NEAR(commuting.rho_at(b).op(), r.op(), 1e-14);
    EXPECT_OP_NEAR(commuting.truth().op(), r.op(), 1e-15);

    const DensityMatrix rho0 = bloch(0.0, 0.8, 0.0);
    const HermitianOp h = pauli_z() * 0.5;
    const ParametricModel m = displacement_model(rho0, h);
    const HermitianOp fd = finite_diff_drho(m, m.theta0(), 0);
    // -i[H, rho0]
    const CMatrix hr = h.matrix() * rho0.matrix();
    const HermitianOp want = HermitianOp::hermitize(cplx(0, -1) * (hr - hr.adjoint()));
    EXPECT_OP_NEAR(fd, want, 1e-7);
    EXPECT_OP_NEAR(m.drho_at(m.theta0(), 0), want, 1e-14);
    // score at truth equals the commutation superoperator applied to H
    EXPECT_OP_NEAR(solve_sld(rho0, want), commutation_superop(rho0, h), 1e-12);
}

TEST(FiniteDiff, ConstantFamilyAndBoundary) {
    const DensityMatrix r = diag_state(0.6, 0.4);
    RVector t0(1);
    t0(0) = 0.0;
    const ParametricModel constant(t0, [r](const RVector&) { return r; });
    EXPECT_OP_NEAR(finite_diff_drho(constant, t0, 0), HermitianOp::zero(2), 0.0);
    EXPECT_FALSE(constant.has_analytic_derivative());

    // rho(t) = diag(t, 1 - t) at t = 0 leaves the state space for t < 0
    const ParametricModel edge(t0, [](const RVector& t) {
        const double v[] = {t(0), 1.0 - t(0)};
        return DensityMatrix(HermitianOp::diagonal(v));
    });
    EXPECT_THROW(finite_diff_drho(edge, t0, 0), BoundaryError);
    EXPECT_THROW(finite_diff_drho(constant, t0, 0, -1.0), InvalidInput);
}

TEST(FiniteDiff, RichardsonImprovesAccuracy) {
    Rng rng = stream_rng(8, 0);
    const DensityMatrix rho = random_density_matrix(rng, 3);
    const HermitianOp h = random_zero_mean(rng, rho);
    const ParametricModel m = exponential_submodel({rho, h, SubmodelKind::Exponential});
    const HermitianOp exact = m.drho_at(m.theta0(), 0);
    const double plain = (finite_diff_drho(m, m.theta0(), 0, 1e-2) - exact).frobenius_norm();
    const double rich = (finite_diff_drho(m, m.theta0(), 0, 1e-2, true) - exact).frobenius_norm();
    EXPECT_LT(rich, plain * 1e-2);
}

TEST(TensorPower, Examples) {
    Rng rng = stream_rng(9, 0);
    const DensityMatrix rho = random_density_matrix(rng, 2);
    const ParametricModel m = f0_family(2, rho);
    const ParametricModel one = tensor_power(m, 1);
    EXPECT_OP_NEAR(one.truth().op(), m.truth().op(), 1e-15);

    const ParametricModel two = tensor_power(m, 2);
    EXPECT_EQ(two.dim(), 4);
    EXPECT_EQ(two.p(), 3);
    EXPECT_NEAR(two.truth().op().trace(), 1.0, 1e-14);

    const GramMatrix k1 = gram(m.truth(), model_scores(m));
    const GramMatrix k2 = gram(two.truth(), model_scores(two));
    EXPECT_LE((k2.entries() - 2.0 * k1.entries()).norm(), 1e-8 * k1.entries().norm());

    for (int j = 0; j < two.p(); ++j) {
        EXPECT_NEAR(two.drho_at(two.theta0(), j).trace(), 0.0, 1e-8);
        EXPECT_OP_NEAR(two.drho_at(two.theta0(), j), finite_diff_drho(two, two.theta0(), j),
                       1e-8);
    }
    EXPECT_THROW(tensor_power(m, 9), InvalidInput);
    EXPECT_THROW(tensor_power(m, 0), InvalidInput);
}

TEST(RestrictModel, AffineReparametrization) {
    Rng rng = stream_rng(10, 0);
    const DensityMatrix rho = random_density_matrix(rng, 2);
    const ParametricModel m = f0_family(2, rho);
    RMatrix b = RMatrix::Zero(3, 1);
    b(0, 0) = 1.0;
    b(2, 0) = -2.0;
    const ParametricModel r = restrict_model(m, b);
    EXPECT_EQ(r.p(), 1);
    EXPECT_OP_NEAR(r.truth().op(), rho.op(), 1e-15);
    const HermitianOp want = m.drho_at(m.theta0(), 0) - m.drho_at(m.theta0(), 2) * 2.0;
    EXPECT_OP_NEAR(r.drho_at(r.theta0(), 0), want, 1e-15);
}
