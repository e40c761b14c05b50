#include "qsemi/influence.hpp"

#include <cmath>
#include <sstream>

#include "qsemi/error.hpp"

namespace qsemi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double xlogx_sum(const DensityMatrix& rho) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < rho.eigenvalues().size(); ++j) {
        const double l = rho.eigenvalues()(j);
        if (l > rho.rank_tol()) {
            s += l * std::log(l);
        }
    }
    return s;
}

/// ln sigma on its support, zero on the kernel.
CMatrix log_on_support(const DensityMatrix& sigma) {
    const int d = sigma.dim();
    CMatrix lt = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        const double l = sigma.eigenvalues()(j);
        if (l > sigma.rank_tol()) {
            lt(j, j) = std::log(l);
        }
    }
    return sigma.from_eigenbasis(lt);
}

void require_support_cover(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dim(rho.dim(), sigma.dim(), "relative entropy");
    const int d = sigma.dim();
    double leak = 0.0;
    for (int j = sigma.support_rank(); j < d; ++j) {
        const CVector v = sigma.eigenvectors().col(j);
        leak += (v.adjoint() * rho.matrix() * v)(0, 0).real();
    }
    if (leak > 1e-10) {
        std::ostringstream os;
        os << "relative entropy: supp(sigma) does not contain supp(rho) (weight " << leak
           << " on ker sigma)";
        throw SupportError(os.str());
    }
}

void require_full_rank(const DensityMatrix& rho, const char* what) {
    if (!rho.full_rank()) {
        std::ostringstream os;
        os << what << ": requires a full-rank state (rank " << rho.support_rank() << " < "
           << rho.dim() << "); mix with the maximally mixed state first";
        throw SupportError(os.str());
    }
}

void require_unit(const CVector& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-12) {
        throw InvalidInput("FidelityPure: psi must have unit norm");
    }
}

HermitianOp zero_mean(const DensityMatrix& rho, const HermitianOp& g) {
    const HermitianOp id = HermitianOp::identity(rho.dim());
    return g - id * weighted_inner(rho, g, id);
}

} // namespace

std::string functional_name(const Functional& f) {
    return std::visit(overloaded{
                          [](const functionals::Expectation&) { return std::string("expectation"); },
                          [](const functionals::Purity&) { return std::string("purity"); },
                          [](const functionals::RelativeEntropy&) {
                              return std::string("relative-entropy");
                          },
                          [](const functionals::VonNeumannEntropy&) {
                              return std::string("entropy");
                          },
                          [](const functionals::FidelityPure&) {
                              return std::string("fidelity-pure");
                          },
                          [](const functionals::Custom& c) { return c.name; },
                      },
                      f);
}

double functional_value(const DensityMatrix& rho, const Functional& f) {
    return std::visit(
        overloaded{
            [&](const functionals::Expectation& e) {
                require_same_dim(rho.dim(), e.observable.dim(), "Expectation");
                return (rho.matrix() * e.observable.matrix()).trace().real();
            },
            [&](const functionals::Purity&) { return rho.matrix().squaredNorm(); },
            [&](const functionals::RelativeEntropy& r) {
                require_support_cover(rho, r.sigma);
                const double cross = (rho.matrix() * log_on_support(r.sigma)).trace().real();
                return xlogx_sum(rho) - cross;
            },
            [&](const functionals::VonNeumannEntropy&) { return -xlogx_sum(rho); },
            [&](const functionals::FidelityPure& fp) {
                require_same_dim(rho.dim(), static_cast<int>(fp.psi.size()), "FidelityPure");
                require_unit(fp.psi);
                return (fp.psi.adjoint() * rho.matrix() * fp.psi)(0, 0).real();
            },
            [&](const functionals::Custom& c) { return c.value(rho); },
        },
        f);
}

HermitianOp functional_gradient(const DensityMatrix& rho, const Functional& f) {
    return std::visit(
        overloaded{
            [&](const functionals::Expectation& e) {
                require_same_dim(rho.dim(), e.observable.dim(), "Expectation");
                return e.observable;
            },
            [&](const functionals::Purity&) { return rho.op() * 2.0; },
            [&](const functionals::RelativeEntropy& r) {
                require_full_rank(rho, "RelativeEntropy gradient");
                require_support_cover(rho, r.sigma);
                return HermitianOp::hermitize(log_on_support(rho) - log_on_support(r.sigma));
            },
            [&](const functionals::VonNeumannEntropy&) {
                require_full_rank(rho, "VonNeumannEntropy gradient");
                return HermitianOp::hermitize(-log_on_support(rho));
            },
            [&](const functionals::FidelityPure& fp) {
                require_same_dim(rho.dim(), static_cast<int>(fp.psi.size()), "FidelityPure");
                require_unit(fp.psi);
                return HermitianOp::hermitize(fp.psi * fp.psi.adjoint());
            },
            [&](const functionals::Custom& c) {
                HermitianOp g = c.gradient(rho);
                require_same_dim(rho.dim(), g.dim(), "Custom gradient");
                return g;
            },
        },
        f);
}

HermitianOp influence_operator(const DensityMatrix& rho, const Functional& f) {
    return zero_mean(rho, functional_gradient(rho, f));
}

double constraint_value(const DensityMatrix& rho, const Constraint& c) {
    return std::visit(overloaded{
                          [&](const constraints::LinearMoment& m) {
                              require_same_dim(rho.dim(), m.observable.dim(), "LinearMoment");
                              return (rho.matrix() * m.observable.matrix()).trace().real() -
                                     m.zeta;
                          },
                          [&](const constraints::Custom& cu) { return cu.value(rho); },
                      },
                      c);
}

std::vector<HermitianOp> antiscore_operators(const DensityMatrix& rho,
                                             std::span<const Constraint> cs) {
    std::vector<HermitianOp> out;
    out.reserve(cs.size());
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const double v = constraint_value(rho, cs[k]);
        if (std::abs(v) > 1e-8) {
            std::ostringstream os;
            os << "constraint " << k << " is violated at the true state (gamma = " << v << ")";
            throw InconsistentConstraint(os.str());
        }
        const HermitianOp g = std::visit(overloaded{
                                             [](const constraints::LinearMoment& m) {
                                                 return m.observable;
                                             },
                                             [&](const constraints::Custom& cu) {
                                                 return cu.gradient(rho);
                                             },
                                         },
                                         cs[k]);
        require_same_dim(rho.dim(), g.dim(), "antiscore_operators");
        out.push_back(zero_mean(rho, g));
    }
    return out;
}

Functional as_functional(const Constraint& c) {
    return std::visit(overloaded{
                          [](const constraints::LinearMoment& m) -> Functional {
                              return functionals::Expectation{m.observable};
                          },
                          [](const constraints::Custom& cu) -> Functional {
                              return functionals::Custom{cu.value, cu.gradient, cu.name};
                          },
                      },
                      c);
}

DerivativeCheck directional_derivative_check(const DensityMatrix& rho, const Functional& f,
                                             const HermitianOp& h, double eps) {
    require_same_dim(rho.dim(), h.dim(), "directional_derivative_check");
    if (!(eps > 0.0)) {
        throw InvalidInput("directional_derivative_check: eps must be positive");
    }
    const double beta = functional_value(rho, f);
    const HermitianOp delta = influence_operator(rho, f);
    const HermitianOp id = HermitianOp::identity(rho.dim());
    const double analytic = weighted_inner(rho, h, delta) + beta * weighted_inner(rho, h, id);

    const HermitianOp step = jordan(rho.op(), h) * eps;
    auto perturbed = [&](double sign) {
        try {
            return DensityMatrix(rho.op() + step * sign);
        } catch (const InvalidInput& e) {
            throw BoundaryError(std::string("directional_derivative_check: perturbed state is "
                                            "not a density operator (") +
                                e.what() + ")");
        }
    };
    const double numeric =
        (functional_value(perturbed(1.0), f) - functional_value(perturbed(-1.0), f)) /
        (2.0 * eps);
    const double tol = std::max(1e-6, 1e-4 * std::abs(analytic));
    return {numeric, analytic, std::abs(numeric - analytic) <= tol};
}

} // namespace qsemi
