#include "qsemi/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qsemi/error.hpp"

namespace qsemi {

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return std::round(r);
}

void require_order(int mu, int lo, int hi, const char* what) {
    if (mu < lo || mu > hi) {
        std::ostringstream os;
        os << what << ": order " << mu << " outside [" << lo << ", " << hi << "]";
        throw InvalidInput(os.str());
    }
}

void require_copies(int n) {
    if (n < 1) {
        throw InvalidInput("imaging: n must be at least 1");
    }
}

double poisson_log_pmf(int m, double lambda) {
    if (lambda == 0.0) {
        return m == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    return -lambda + m * std::log(lambda) - std::lgamma(m + 1.0);
}

} // namespace

SourceDistribution::SourceDistribution(std::vector<double> nodes, std::vector<double> weights,
                                       bool discrete)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), discrete_(discrete) {}

SourceDistribution SourceDistribution::discrete(std::vector<double> positions,
                                                std::vector<double> weights) {
    if (positions.empty() || positions.size() != weights.size()) {
        throw InvalidInput("discrete source: need matching non-empty positions and weights");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(positions[i]) || !std::isfinite(weights[i]) || weights[i] < 0.0) {
            throw InvalidInput("discrete source: weights must be finite and non-negative");
        }
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "discrete source: weights sum to " << total << ", expected 1";
        throw InvalidInput(os.str());
    }
    return SourceDistribution(std::move(positions), std::move(weights), true);
}

SourceDistribution SourceDistribution::gridded(std::vector<double> grid,
                                               std::vector<double> density) {
    const std::size_t n = grid.size();
    if (n < 3 || n % 2 == 0 || density.size() != n) {
        throw InvalidInput("gridded source: need an odd number (>= 3) of grid points and values");
    }
    const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
    if (!(h > 0.0)) {
        throw InvalidInput("gridded source: grid must be increasing");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double expected = grid.front() + h * static_cast<double>(i);
        if (std::abs(grid[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
            throw InvalidInput("gridded source: grid must be uniform");
        }
        if (!std::isfinite(density[i]) || density[i] < 0.0) {
            throw InvalidInput("gridded source: density must be finite and non-negative");
        }
    }
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double simpson = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w[i] = simpson * h / 3.0 * density[i];
        total += w[i];
    }
    if (std::abs(total - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "gridded source: density integrates to " << total << ", expected 1";
        throw InvalidInput(os.str());
    }
    return SourceDistribution(std::move(grid), std::move(w), false);
}

SourceDistribution SourceDistribution::two_point(double separation) {
    return discrete({-separation / 2.0, separation / 2.0}, {0.5, 0.5});
}

SourceDistribution SourceDistribution::point(double x0) { return discrete({x0}, {1.0}); }

SourceDistribution SourceDistribution::dilated(double factor) const {
    if (!(factor > 0.0)) {
        throw InvalidInput("dilation factor must be positive");
    }
    std::vector<double> x = nodes_;
    for (double& v : x) {
        v *= factor;
    }
    return SourceDistribution(std::move(x), weights_, discrete_);
}

double SourceDistribution::width() const {
    double w = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (weights_[i] > 0.0) {
            w = std::max(w, std::abs(nodes_[i]));
        }
    }
    return w;
}

std::vector<double> object_moments(const SourceDistribution& f, int mu_max) {
    require_order(mu_max, 0, 4 * kMaxImagingOrder, "object_moments");
    std::vector<double> beta(static_cast<std::size_t>(mu_max) + 1, 0.0);
    for (std::size_t i = 0; i < f.nodes().size(); ++i) {
        double xp = 1.0;
        for (int mu = 0; mu <= mu_max; ++mu) {
            beta[static_cast<std::size_t>(mu)] += f.weights()[i] * xp;
            xp *= f.nodes()[i];
        }
    }
    return beta;
}

double normal_central_moment(int k) {
    if (k < 0) {
        throw InvalidInput("normal_central_moment: order must be non-negative");
    }
    if (k % 2 == 1) {
        return 0.0;
    }
    double r = 1.0;
    for (int j = k - 1; j > 1; j -= 2) {
        r *= j;
    }
    return r;
}

std::vector<double> direct_imaging_estimator(int mu) {
    require_order(mu, 0, kMaxImagingOrder, "direct_imaging_estimator");
    // E[x^a] = sum_b C_ab beta_b with C unit lower triangular; the estimator
    // coefficients are row mu of C^{-1}, i.e. the solution of C^T c = e_mu.
    const int n = mu + 1;
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    c[static_cast<std::size_t>(mu)] = 1.0;
    for (int b = mu - 1; b >= 0; --b) {
        double s = 0.0;
        for (int a = b + 1; a <= mu; ++a) {
            s += binom(a, b) * normal_central_moment(a - b) * c[static_cast<std::size_t>(a)];
        }
        c[static_cast<std::size_t>(b)] = -s;
    }
    return c;
}

std::vector<double> image_moments(const SourceDistribution& f, int k_max) {
    require_order(k_max, 0, 2 * kMaxImagingOrder, "image_moments");
    const std::vector<double> beta = object_moments(f, k_max);
    std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (int k = 0; k <= k_max; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) {
            s += binom(k, j) * normal_central_moment(k - j) * beta[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(k)] = s;
    }
    return out;
}

double direct_imaging_error(const SourceDistribution& f, int mu, int n) {
    require_copies(n);
    const std::vector<double> c = direct_imaging_estimator(mu);
    const std::vector<double> ex = image_moments(f, 2 * mu);
    const double beta = object_moments(f, mu)[static_cast<std::size_t>(mu)];
    double second = 0.0;
    for (int a = 0; a <= mu; ++a) {
        for (int b = 0; b <= mu; ++b) {
            second += c[static_cast<std::size_t>(a)] * c[static_cast<std::size_t>(b)] *
                      ex[static_cast<std::size_t>(a + b)];
        }
    }
    return std::max(0.0, second - beta * beta) / n;
}

int spade_truncation(const SourceDistribution& f, double tail_tol) {
    const double w = f.width();
    const double lambda = w * w / 4.0;
    if (lambda == 0.0) {
        return 0;
    }
    // For M + 2 > lambda, P(m > M) <= pmf(M + 1) / (1 - lambda / (M + 2)).
    for (int m = 0; m < 100000; ++m) {
        if (m + 2 > lambda) {
            const double bound =
                std::exp(poisson_log_pmf(m + 1, lambda)) / (1.0 - lambda / (m + 2));
            if (bound < tail_tol) {
                return m;
            }
        }
    }
    throw ConvergenceError("spade_truncation: source too wide for a finite photon cutoff");
}

std::vector<double> spade_distribution(const SourceDistribution& f, int m_max) {
    if (m_max < 0) {
        throw InvalidInput("spade_distribution: m_max must be non-negative");
    }
    std::vector<double> p(static_cast<std::size_t>(m_max) + 1, 0.0);
    for (std::size_t i = 0; i < f.nodes().size(); ++i) {
        const double wi = f.weights()[i];
        if (wi == 0.0) {
            continue;
        }
        // |psi_X> is the coherent state alpha = X/2, so m is Poisson with mean X^2/4.
        const double lambda = f.nodes()[i] * f.nodes()[i] / 4.0;
        for (int m = 0; m <= m_max; ++m) {
            p[static_cast<std::size_t>(m)] += wi * std::exp(poisson_log_pmf(m, lambda));
        }
    }
    return p;
}

double spade_error_even(const SourceDistribution& f, int j, int n, int m_max) {
    require_copies(n);
    require_order(j, 0, kMaxImagingOrder, "spade_error_even");
    const int needed = spade_truncation(f);
    if (m_max > 0 && m_max < needed) {
        std::ostringstream os;
        os << "spade_error_even: m_max = " << m_max << " leaves tail probability above 1e-12 "
           << "(need at least " << needed << ")";
        throw ConvergenceError(os.str());
    }
    const int cut = std::max(m_max, needed) + j;
    const std::vector<double> p = spade_distribution(f, cut);

    const double scale = std::pow(4.0, j);
    double mean = 0.0;
    double second = 0.0;
    for (int m = j; m <= cut; ++m) {
        double est = scale;
        for (int i = 0; i < j; ++i) {
            est *= (m - i);
        }
        mean += p[static_cast<std::size_t>(m)] * est;
        second += p[static_cast<std::size_t>(m)] * est * est;
    }
    const double beta = object_moments(f, 2 * j)[static_cast<std::size_t>(2 * j)];
    if (std::abs(mean - beta) > 1e-9 * std::max(1.0, std::abs(beta))) {
        std::ostringstream os;
        os << "spade_error_even: estimator mean " << mean << " differs from beta_" << 2 * j
           << " = " << beta;
        throw ConvergenceError(os.str());
    }
    return std::max(0.0, second - beta * beta) / n;
}

double ec_lower_bound(const SourceDistribution& f, int mu, int n) {
    require_copies(n);
    require_order(mu, 1, kMaxImagingOrder, "ec_lower_bound");
    const std::vector<double> b = object_moments(f, 2 * mu);
    const auto at = [&](int k) { return b[static_cast<std::size_t>(k)]; };
    return (at(2 * mu) - at(mu) * at(mu) + mu * mu * at(2 * mu - 2)) / n;
}

} // namespace qsemi
