#pragma once

#include <cmath>

#include <gtest/gtest.h>

#include "qsemi/operators.hpp"

namespace qsemi::testing {

inline DensityMatrix diag_state(double a, double b) {
    const double v[] = {a, b};
    return DensityMatrix(HermitianOp::diagonal(v));
}

/// (I + x sx + y sy + z sz)/2
inline DensityMatrix bloch(double x, double y, double z) {
    const CMatrix m = (HermitianOp::identity(2).matrix() + x * pauli_x().matrix() +
                       y * pauli_y().matrix() + z * pauli_z().matrix()) /
                      2.0;
    return DensityMatrix(HermitianOp::hermitize(m));
}

inline double max_diff(const CMatrix& a, const CMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

} // namespace qsemi::testing

#define EXPECT_OP_NEAR(a, b, tol) EXPECT_LE(::qsemi::testing::max_diff((a).matrix(), (b).matrix()), tol)
