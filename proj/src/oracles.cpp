#include "qsemi/oracles.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "qsemi/error.hpp"

namespace qsemi {

FdOptions oracle_fd_options(const DensityMatrix& rho) {
    FdOptions o;
    o.step = std::min(kDefaultFdStep, 1e-2 * std::max(rho.min_eigenvalue(), 1e-12));
    o.richardson = true;
    return o;
}

double f0_oracle(const DensityMatrix& rho, const Functional& f, int n_copies) {
    if (n_copies < 1) {
        throw InvalidInput("n_copies must be at least 1");
    }
    const ParametricModel m = f0_family(rho.dim(), rho);
    return helstrom_parametric(m, dbeta_finite_difference(m, f, oracle_fd_options(rho))) /
           n_copies;
}

HelstromResult f0_oracle_vector(const DensityMatrix& rho, std::span<const Functional> fs,
                                const RMatrix& w) {
    const ParametricModel m = f0_family(rho.dim(), rho);
    return helstrom_report(m, dbeta_finite_difference(m, fs, oracle_fd_options(rho)), w);
}

ParametricModel constrained_f0_family(const DensityMatrix& rho,
                                      std::span<const Constraint> constraints) {
    const int d = rho.dim();
    const ParametricModel full = f0_family(d, rho);
    const std::vector<HermitianOp> basis = f0_tangent_basis(d);
    const int p = full.p();
    const int m = static_cast<int>(constraints.size());

    // tr rho(theta) Z is affine in theta, so the constraint set is a flat.
    RMatrix a(m, p);
    for (int k = 0; k < m; ++k) {
        const auto* lm = std::get_if<constraints::LinearMoment>(&constraints[k]);
        if (lm == nullptr) {
            throw InvalidInput("constrained oracle: only linear moment constraints are supported");
        }
        const double v = constraint_value(rho, constraints[k]);
        if (std::abs(v) > 1e-8) {
            std::ostringstream os;
            os << "constraint " << k << " is violated at the true state (gamma = " << v << ")";
            throw InconsistentConstraint(os.str());
        }
        for (int j = 0; j < p; ++j) {
            a(k, j) = (basis[static_cast<std::size_t>(j)].matrix() * lm->observable.matrix())
                          .trace()
                          .real();
        }
    }
    if (m == 0) {
        return full;
    }
    Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
    const RVector& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index j = 0; j < s.size(); ++j) {
        if (s(j) > 1e-10 * std::max(1.0, s(0))) {
            ++rank;
        }
    }
    const RMatrix null = svd.matrixV().rightCols(p - rank);
    std::vector<std::string> labels;
    for (int j = 0; j < p - rank; ++j) {
        labels.push_back("phi" + std::to_string(j));
    }
    return restrict_model(full, null, std::move(labels));
}

double constrained_oracle(const DensityMatrix& rho, const Functional& f,
                          std::span<const Constraint> constraints, int n_copies) {
    if (n_copies < 1) {
        throw InvalidInput("n_copies must be at least 1");
    }
    const ParametricModel m = constrained_f0_family(rho, constraints);
    return helstrom_parametric(m, dbeta_finite_difference(m, f, oracle_fd_options(rho))) /
           n_copies;
}

ParametricModel joint_displacement_model(const DensityMatrix& rho0, const HermitianOp& generator,
                                         std::span<const Constraint> constraints) {
    require_same_dim(rho0.dim(), generator.dim(), "joint_displacement_model");
    auto base = std::make_shared<const ParametricModel>(constrained_f0_family(rho0, constraints));
    const int r = base->p();
    auto split = [r](const RVector& theta) {
        return std::pair<double, RVector>(theta(0), theta.tail(r));
    };
    auto rho_at = [base, generator, split](const RVector& theta) {
        const auto [beta, phi] = split(theta);
        const CMatrix u = unitary_exp(generator, beta);
        return DensityMatrix(
            HermitianOp::hermitize(u * base->rho_at(phi).matrix() * u.adjoint()));
    };
    auto drho_at = [base, generator, split](const RVector& theta, int j) {
        const auto [beta, phi] = split(theta);
        const CMatrix u = unitary_exp(generator, beta);
        if (j == 0) {
            const HermitianOp rho =
                HermitianOp::hermitize(u * base->rho_at(phi).matrix() * u.adjoint());
            return i_commutator(rho, generator);
        }
        return HermitianOp::hermitize(u * base->drho_at(phi, j - 1).matrix() * u.adjoint());
    };
    std::vector<std::string> labels{"beta"};
    for (const std::string& l : base->labels()) {
        labels.push_back(l);
    }
    return ParametricModel(RVector::Zero(r + 1), rho_at, drho_at, std::move(labels));
}

double displacement_oracle(const DensityMatrix& rho0, const HermitianOp& generator,
                           std::span<const Constraint> constraints, int n_copies) {
    if (n_copies < 1) {
        throw InvalidInput("n_copies must be at least 1");
    }
    const ParametricModel m = joint_displacement_model(rho0, generator, constraints);
    RMatrix dbeta = RMatrix::Zero(m.p(), 1);
    dbeta(0, 0) = 1.0;
    return helstrom_parametric(m, dbeta) / n_copies;
}

DensityMatrix thermal_state(int d, double nbar) {
    if (d < 1 || !(nbar > 0.0)) {
        throw InvalidInput("thermal_state: need d >= 1 and nbar > 0");
    }
    const double ratio = nbar / (1.0 + nbar);
    std::vector<double> p(static_cast<std::size_t>(d));
    double total = 0.0;
    for (int n = 0; n < d; ++n) {
        p[static_cast<std::size_t>(n)] = std::pow(ratio, n);
        total += p[static_cast<std::size_t>(n)];
    }
    for (double& v : p) {
        v /= total;
    }
    return DensityMatrix(HermitianOp::diagonal(p));
}

PhaseScenario phase_scenario(int levels, cplx alpha, double nbar) {
    const CMatrix a = annihilation(levels);
    // exp(alpha a^dag - conj(alpha) a) = exp(-i G) with G = i(alpha a^dag - conj(alpha) a)
    const HermitianOp g =
        HermitianOp::hermitize(cplx(0.0, 1.0) * (alpha * a.adjoint() - std::conj(alpha) * a));
    const CMatrix disp = unitary_exp(g, 1.0);
    const DensityMatrix th = thermal_state(levels, nbar);
    DensityMatrix rho0(HermitianOp::hermitize(disp * th.matrix() * disp.adjoint()));

    const HermitianOp x = quadrature_x(levels);
    const HermitianOp p = quadrature_p(levels);
    const HermitianOp h = HermitianOp::hermitize((x.matrix() * x.matrix() + p.matrix() * p.matrix()) / 2.0);
    std::vector<Constraint> cs;
    cs.push_back(constraints::LinearMoment{x, (rho0.matrix() * x.matrix()).trace().real()});
    cs.push_back(constraints::LinearMoment{p, (rho0.matrix() * p.matrix()).trace().real()});
    return {std::move(rho0), h, std::move(cs)};
}

} // namespace qsemi
