#include "qsemi/models.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "qsemi/error.hpp"

namespace qsemi {

// ---------------------------------------------------------------------------
// ParametricModel

ParametricModel::ParametricModel(RVector theta0, StateFn rho_at, DerivFn drho_at,
                                 std::vector<std::string> labels)
    : theta0_(std::move(theta0)),
      rho_at_(std::move(rho_at)),
      drho_at_(std::move(drho_at)),
      labels_(std::move(labels)),
      truth_(rho_at_(theta0_)) {
    if (labels_.empty()) {
        for (int j = 0; j < p(); ++j) {
            labels_.push_back("theta" + std::to_string(j));
        }
    }
    if (static_cast<int>(labels_.size()) != p()) {
        throw InvalidInput("ParametricModel: label count does not match parameter count");
    }
}

DensityMatrix ParametricModel::rho_at(const RVector& theta) const {
    if (theta.size() != theta0_.size()) {
        throw DimensionMismatch("ParametricModel::rho_at: wrong parameter count");
    }
    return rho_at_(theta);
}

HermitianOp ParametricModel::drho_at(const RVector& theta, int j) const {
    if (j < 0 || j >= p()) {
        throw InvalidInput("ParametricModel::drho_at: parameter index out of range");
    }
    if (drho_at_) {
        return drho_at_(theta, j);
    }
    return finite_diff_drho(*this, theta, j);
}

std::vector<HermitianOp> ParametricModel::derivatives() const {
    std::vector<HermitianOp> out;
    out.reserve(static_cast<std::size_t>(p()));
    for (int j = 0; j < p(); ++j) {
        out.push_back(drho_at(theta0_, j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite differences

namespace {

CMatrix central_difference(const ParametricModel& model, const RVector& theta, int j,
                           double h) {
    RVector tp = theta;
    RVector tm = theta;
    tp(j) += h;
    tm(j) -= h;
    try {
        const DensityMatrix rp = model.rho_at(tp);
        const DensityMatrix rm = model.rho_at(tm);
        return (rp.matrix() - rm.matrix()) / (2.0 * h);
    } catch (const InvalidInput& e) {
        std::ostringstream os;
        os << "finite_diff_drho: stencil at step " << h << " along parameter " << j
           << " leaves the state space (" << e.what() << ")";
        throw BoundaryError(os.str());
    }
}

} // namespace

HermitianOp finite_diff_drho(const ParametricModel& model, const RVector& theta, int j,
                             double step, bool richardson) {
    if (!(step > 0.0)) {
        throw InvalidInput("finite_diff_drho: step must be positive");
    }
    if (j < 0 || j >= model.p()) {
        throw InvalidInput("finite_diff_drho: parameter index out of range");
    }
    const double scale = std::max(1.0, theta.size() ? theta.cwiseAbs().maxCoeff() : 0.0);
    const double h = step * scale;
    const CMatrix d1 = central_difference(model, theta, j, h);
    if (!richardson) {
        return HermitianOp::hermitize(d1);
    }
    const CMatrix d2 = central_difference(model, theta, j, h / 2.0);
    return HermitianOp::hermitize((4.0 * d2 - d1) / 3.0);
}

// ---------------------------------------------------------------------------
// Full-dimensional family

std::vector<HermitianOp> f0_tangent_basis(int d) {
    std::vector<HermitianOp> basis;
    for (int j = 1; j < d; ++j) {
        CMatrix m = CMatrix::Zero(d, d);
        m(j, j) = 1.0;
        m(0, 0) = -1.0;
        basis.push_back(HermitianOp(m));
    }
    for (int k1 = 0; k1 < d; ++k1) {
        for (int k2 = k1 + 1; k2 < d; ++k2) {
            CMatrix b = CMatrix::Zero(d, d);
            b(k1, k2) = 0.5;
            b(k2, k1) = 0.5;
            CMatrix c = CMatrix::Zero(d, d);
            c(k1, k2) = cplx(0.0, 0.5);
            c(k2, k1) = cplx(0.0, -0.5);
            basis.push_back(HermitianOp(b));
            basis.push_back(HermitianOp(c));
        }
    }
    return basis;
}

RVector f0_coordinates(const DensityMatrix& rho) {
    const int d = rho.dim();
    RVector theta(d * d - 1);
    int idx = 0;
    for (int j = 1; j < d; ++j) {
        theta(idx++) = rho.matrix()(j, j).real();
    }
    for (int k1 = 0; k1 < d; ++k1) {
        for (int k2 = k1 + 1; k2 < d; ++k2) {
            theta(idx++) = 2.0 * rho.matrix()(k1, k2).real();
            theta(idx++) = 2.0 * rho.matrix()(k1, k2).imag();
        }
    }
    return theta;
}

namespace {

CMatrix f0_matrix(int d, const RVector& theta) {
    CMatrix m = CMatrix::Zero(d, d);
    double rest = 1.0;
    int idx = 0;
    for (int j = 1; j < d; ++j) {
        m(j, j) = theta(idx);
        rest -= theta(idx);
        ++idx;
    }
    m(0, 0) = rest;
    for (int k1 = 0; k1 < d; ++k1) {
        for (int k2 = k1 + 1; k2 < d; ++k2) {
            const cplx v(theta(idx) / 2.0, theta(idx + 1) / 2.0);
            m(k1, k2) = v;
            m(k2, k1) = std::conj(v);
            idx += 2;
        }
    }
    return m;
}

} // namespace

ParametricModel f0_family(int d, const DensityMatrix& rho_truth) {
    if (d < 2) {
        throw InvalidInput("f0_family: d must be at least 2");
    }
    require_same_dim(d, rho_truth.dim(), "f0_family");
    if (!rho_truth.full_rank()) {
        std::ostringstream os;
        os << "f0_family: truth is rank deficient (rank " << rho_truth.support_rank() << " < "
           << d << "); scores are undefined on the boundary, mix with the maximally mixed state";
        throw SupportError(os.str());
    }
    std::vector<std::string> labels;
    for (int j = 1; j < d; ++j) {
        labels.push_back("a" + std::to_string(j));
    }
    for (int k1 = 0; k1 < d; ++k1) {
        for (int k2 = k1 + 1; k2 < d; ++k2) {
            labels.push_back("b" + std::to_string(k1) + std::to_string(k2));
            labels.push_back("c" + std::to_string(k1) + std::to_string(k2));
        }
    }
    auto basis = std::make_shared<std::vector<HermitianOp>>(f0_tangent_basis(d));
    return ParametricModel(
        f0_coordinates(rho_truth),
        [d](const RVector& theta) { return DensityMatrix(HermitianOp(f0_matrix(d, theta))); },
        [basis](const RVector&, int j) { return (*basis)[static_cast<std::size_t>(j)]; },
        std::move(labels));
}

// ---------------------------------------------------------------------------
// Smooth submodels

HermitianOp frechet_derivative(const HermitianOp& a, const HermitianOp& e,
                               const std::function<double(double)>& f,
                               const std::function<double(double)>& fprime) {
    require_same_dim(a.dim(), e.dim(), "frechet_derivative");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
    const RVector& lam = es.eigenvalues();
    const CMatrix& v = es.eigenvectors();
    const CMatrix et = v.adjoint() * e.matrix() * v;
    const int d = a.dim();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    CMatrix out(d, d);
    for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
            const double diff = lam(k) - lam(l);
            double w;
            if (std::abs(diff) > 1e-8 * scale) {
                w = (f(lam(k)) - f(lam(l))) / diff;
            } else {
                w = fprime(0.5 * (lam(k) + lam(l)));
            }
            out(k, l) = w * et(k, l);
        }
    }
    return HermitianOp::hermitize(v * out * v.adjoint());
}

namespace {

struct SpectralPair {
    std::function<double(double)> f;
    std::function<double(double)> fprime;
};

SpectralPair weight_function(SubmodelKind kind) {
    if (kind == SubmodelKind::Exponential) {
        return {[](double u) { return std::exp(u / 2.0); },
                [](double u) { return 0.5 * std::exp(u / 2.0); }};
    }
    return {[](double u) { return 1.0 + std::tanh(u / 2.0); },
            [](double u) {
                const double c = std::cosh(u / 2.0);
                return 0.5 / (c * c);
            }};
}

void require_zero_mean(const DensityMatrix& rho, const HermitianOp& h, const char* where) {
    const double mean = weighted_inner(rho, h, HermitianOp::identity(rho.dim()));
    if (std::abs(mean) > 1e-10 * std::max(1.0, h.frobenius_norm())) {
        std::ostringstream os;
        os << where << ": direction must have zero mean under rho (<h, I> = " << mean << ")";
        throw InvalidInput(os.str());
    }
}

} // namespace

ParametricModel smooth_family(const DensityMatrix& rho, std::vector<HermitianOp> directions,
                              SubmodelKind kind) {
    if (directions.empty()) {
        throw InvalidInput("smooth_family: need at least one direction");
    }
    for (const auto& h : directions) {
        require_same_dim(rho.dim(), h.dim(), "smooth_family");
        require_zero_mean(rho, h, "smooth_family");
    }
    struct State {
        DensityMatrix rho;
        std::vector<HermitianOp> dirs;
        SpectralPair fn;
        HermitianOp generator(const RVector& theta) const {
            HermitianOp a = HermitianOp::zero(rho.dim());
            for (std::size_t j = 0; j < dirs.size(); ++j) {
                a += dirs[j] * theta(static_cast<Eigen::Index>(j));
            }
            return a;
        }
    };
    auto st = std::make_shared<const State>(State{rho, std::move(directions), weight_function(kind)});

    auto rho_at = [st](const RVector& theta) {
        const HermitianOp a = st->generator(theta);
        const CMatrix w = matrix_function(a, st->fn.f).matrix();
        CMatrix k = w * st->rho.matrix() * w;
        k /= k.trace().real();
        return DensityMatrix(HermitianOp::hermitize(k));
    };
    auto drho_at = [st](const RVector& theta, int j) {
        const HermitianOp a = st->generator(theta);
        const CMatrix w = matrix_function(a, st->fn.f).matrix();
        const CMatrix dw =
            frechet_derivative(a, st->dirs[static_cast<std::size_t>(j)], st->fn.f, st->fn.fprime)
                .matrix();
        const CMatrix& r = st->rho.matrix();
        const CMatrix k = w * r * w;
        const CMatrix dk = dw * r * w + w * r * dw;
        const double tk = k.trace().real();
        const double tdk = dk.trace().real();
        return HermitianOp::hermitize((dk - k * (tdk / tk)) / tk);
    };
    const int p = static_cast<int>(st->dirs.size());
    std::vector<std::string> labels;
    for (int j = 0; j < p; ++j) {
        labels.push_back("h" + std::to_string(j));
    }
    return ParametricModel(RVector::Zero(p), rho_at, drho_at, std::move(labels));
}

ParametricModel exponential_submodel(const SubmodelSpec& spec) {
    if (spec.kind != SubmodelKind::Exponential) {
        throw InvalidInput("exponential_submodel: spec kind must be exponential");
    }
    return smooth_family(spec.rho, {spec.direction}, SubmodelKind::Exponential);
}

ParametricModel tanh_submodel(const SubmodelSpec& spec) {
    if (spec.kind != SubmodelKind::Tanh) {
        throw InvalidInput("tanh_submodel: spec kind must be tanh");
    }
    return smooth_family(spec.rho, {spec.direction}, SubmodelKind::Tanh);
}

// ---------------------------------------------------------------------------
// Displacement

ParametricModel displacement_model(const DensityMatrix& rho0, const HermitianOp& generator,
                                   double beta0) {
    require_same_dim(rho0.dim(), generator.dim(), "displacement_model");
    auto rho_at = [rho0, generator](const RVector& theta) {
        const CMatrix u = unitary_exp(generator, theta(0));
        return DensityMatrix(HermitianOp::hermitize(u * rho0.matrix() * u.adjoint()));
    };
    auto drho_at = [rho0, generator](const RVector& theta, int) {
        const CMatrix u = unitary_exp(generator, theta(0));
        const HermitianOp r = HermitianOp::hermitize(u * rho0.matrix() * u.adjoint());
        // -i[H, rho] = i[rho, H]
        return i_commutator(r, generator);
    };
    RVector theta0(1);
    theta0(0) = beta0;
    return ParametricModel(theta0, rho_at, drho_at, {"beta"});
}

// ---------------------------------------------------------------------------
// Tensor powers and reparametrization

ParametricModel tensor_power(const ParametricModel& model, int n, int max_dim) {
    if (n < 1) {
        throw InvalidInput("tensor_power: n must be >= 1");
    }
    if (n == 1) {
        return model;
    }
    double total = 1.0;
    for (int k = 0; k < n; ++k) {
        total *= model.dim();
    }
    if (total > max_dim) {
        std::ostringstream os;
        os << "tensor_power: dimension " << total << " exceeds budget " << max_dim;
        throw InvalidInput(os.str());
    }
    auto base = std::make_shared<const ParametricModel>(model);
    auto rho_at = [base, n](const RVector& theta) {
        const CMatrix r = base->rho_at(theta).matrix();
        CMatrix out = r;
        for (int k = 1; k < n; ++k) {
            out = kron(out, r);
        }
        return DensityMatrix(HermitianOp::hermitize(out));
    };
    auto drho_at = [base, n](const RVector& theta, int j) {
        const CMatrix r = base->rho_at(theta).matrix();
        const CMatrix dr = base->drho_at(theta, j).matrix();
        CMatrix sum;
        for (int slot = 0; slot < n; ++slot) {
            CMatrix term = slot == 0 ? dr : r;
            for (int k = 1; k < n; ++k) {
                term = kron(term, k == slot ? dr : r);
            }
            sum = slot == 0 ? term : CMatrix(sum + term);
        }
        return HermitianOp::hermitize(sum);
    };
    return ParametricModel(model.theta0(), rho_at, drho_at, model.labels());
}

ParametricModel restrict_model(const ParametricModel& model, const RMatrix& basis,
                               std::vector<std::string> labels) {
    if (basis.rows() != model.p()) {
        throw DimensionMismatch("restrict_model: basis rows must equal parameter count");
    }
    auto base = std::make_shared<const ParametricModel>(model);
    auto b = std::make_shared<const RMatrix>(basis);
    auto rho_at = [base, b](const RVector& phi) {
        return base->rho_at(base->theta0() + (*b) * phi);
    };
    auto drho_at = [base, b](const RVector& phi, int k) {
        const RVector theta = base->theta0() + (*b) * phi;
        HermitianOp acc = HermitianOp::zero(base->dim());
        for (int j = 0; j < base->p(); ++j) {
            const double c = (*b)(j, k);
            if (c != 0.0) {
                acc += base->drho_at(theta, j) * c;
            }
        }
        return acc;
    };
    return ParametricModel(RVector::Zero(basis.cols()), rho_at, drho_at, std::move(labels));
}

} // namespace qsemi
