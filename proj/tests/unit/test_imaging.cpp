#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "qsemi/error.hpp"
#include "qsemi/imaging.hpp"
#include "qsemi/random.hpp"

using namespace qsemi;
using qsemi::testing::rel_err;

namespace {

// Probabilists' Hermite polynomial coefficients via He_{n+1} = x He_n - n He_{n-1}.
std::vector<double> hermite_he(int n) {
    std::vector<double> prev{1.0};
    if (n == 0) {
        return prev;
    }
    std::vector<double> cur{0.0, 1.0};
    for (int k = 1; k < n; ++k) {
        std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            next[i + 1] += cur[i];
        }
        for (std::size_t i = 0; i < prev.size(); ++i) {
            next[i] -= k * prev[i];
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

double poly(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        v = v * x + *it;
    }
    return v;
}

// E[g(x)] for x ~ sum_i w_i N(X_i, 1) by Gauss-type trapezoid on a wide grid.
template <class G>
double mixture_expectation(const SourceDistribution& f, G g) {
    const double lo = -12.0 - f.width();
    const double hi = 12.0 + f.width();
    const int n = 40000;
    const double h = (hi - lo) / n;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double x = lo + h * k;
        double dens = 0.0;
        for (std::size_t i = 0; i < f.nodes().size(); ++i) {
            const double u = x - f.nodes()[i];
            dens += f.weights()[i] * std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
        }
        s += (k == 0 || k == n ? 0.5 : 1.0) * dens * g(x);
    }
    return s * h;
}

SourceDistribution random_discrete(Rng& rng, int points) {
    std::vector<double> x(static_cast<std::size_t>(points));
    std::vector<double> w(static_cast<std::size_t>(points));
    std::uniform_real_distribution<double> pos(-1.0, 1.0);
    std::uniform_real_distribution<double> wt(0.1, 1.0);
    for (int i = 0; i < points; ++i) {
        x[static_cast<std::size_t>(i)] = pos(rng);
        w[static_cast<std::size_t>(i)] = wt(rng);
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) {
        v /= total;
    }
    return SourceDistribution::discrete(std::move(x), std::move(w));
}

} // namespace

TEST(SourceDistribution, Validation) {
    EXPECT_THROW(SourceDistribution::discrete({0.0, 1.0}, {0.5, 0.6}), InvalidInput);
    EXPECT_THROW(SourceDistribution::discrete({0.0}, {-1.0}), InvalidInput);
    EXPECT_THROW(SourceDistribution::gridded({0.0, 1.0}, {1.0, 1.0}), InvalidInput);
    EXPECT_THROW(SourceDistribution::gridded({0.0, 0.4, 1.0}, {1.0, 1.0, 1.0}), InvalidInput);
    EXPECT_NO_THROW(SourceDistribution::gridded({0.0, 0.5, 1.0}, {1.0, 1.0, 1.0}));
    EXPECT_THROW(SourceDistribution::gridded({0.0, 0.5, 1.0}, {2.0, 2.0, 2.0}), InvalidInput);
}

TEST(ObjectMoments, Examples) {
    const std::vector<double> b = object_moments(SourceDistribution::two_point(0.6), 4);
    EXPECT_NEAR(b[0], 1.0, 1e-15);
    EXPECT_NEAR(b[1], 0.0, 1e-15);
    EXPECT_NEAR(b[2], 0.09, 1e-15);
    EXPECT_NEAR(b[4], 0.0081, 1e-15);

    const std::vector<double> p = object_moments(SourceDistribution::point(0.7), 5);
    for (int mu = 0; mu <= 5; ++mu) {
        EXPECT_NEAR(p[static_cast<std::size_t>(mu)], std::pow(0.7, mu), 1e-15);
    }

    Rng rng = stream_rng(41, 0);
    const SourceDistribution f = random_discrete(rng, 5);
    const std::vector<double> base = object_moments(f, 6);
    const std::vector<double> scaled = object_moments(f.dilated(0.3), 6);
    for (int mu = 0; mu <= 6; ++mu) {
        EXPECT_NEAR(scaled[static_cast<std::size_t>(mu)],
                    std::pow(0.3, mu) * base[static_cast<std::size_t>(mu)], 1e-15);
    }
}

TEST(ObjectMoments, GriddedUniformDensity) {
    // uniform on [-1, 1]: beta_2 = 1/3 exactly; Simpson misses beta_4 = 1/5 by
    // (b - a) h^4 f''''/180 with f'''' = 24 * 0.5
    std::vector<double> grid;
    std::vector<double> dens;
    for (int i = 0; i <= 200; ++i) {
        grid.push_back(-1.0 + i * 0.01);
        dens.push_back(0.5);
    }
    const SourceDistribution f = SourceDistribution::gridded(grid, dens);
    const std::vector<double> b = object_moments(f, 4);
    EXPECT_NEAR(b[2], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(b[4], 0.2 + 2.0 * 1e-8 * 12.0 / 180.0, 1e-14);
    EXPECT_FALSE(f.is_discrete());
}

TEST(DirectImagingEstimator, Examples) {
    EXPECT_EQ(direct_imaging_estimator(0), (std::vector<double>{1.0}));
    EXPECT_EQ(direct_imaging_estimator(1), (std::vector<double>{0.0, 1.0}));
    EXPECT_EQ(direct_imaging_estimator(2), (std::vector<double>{-1.0, 0.0, 1.0}));
    EXPECT_THROW(direct_imaging_estimator(21), InvalidInput);
    EXPECT_THROW(direct_imaging_estimator(-1), InvalidInput);
}

TEST(DirectImagingEstimator, EqualsHermitePolynomials) {
    for (int mu = 0; mu <= kMaxImagingOrder; ++mu) {
        const std::vector<double> c = direct_imaging_estimator(mu);
        const std::vector<double> he = hermite_he(mu);
        ASSERT_EQ(c.size(), he.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            EXPECT_NEAR(c[i], he[i], 1e-12 * std::max(1.0, std::abs(he[i]))) << mu << " " << i;
        }
    }
}

TEST(DirectImagingEstimator, UnbiasedByQuadrature) {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = stream_rng(42, trial);
        const SourceDistribution f = random_discrete(rng, 1 + trial % 4);
        const std::vector<double> beta = object_moments(f, 6);
        for (int mu = 0; mu <= 6; ++mu) {
            const std::vector<double> c = direct_imaging_estimator(mu);
            const double e = mixture_expectation(f, [&](double x) { return poly(c, x); });
            EXPECT_NEAR(e, beta[static_cast<std::size_t>(mu)], 1e-8) << "mu " << mu;
        }
    }
}

TEST(DirectImagingError, Examples) {
    EXPECT_NEAR(direct_imaging_error(SourceDistribution::two_point(0.2), 2, 1), 2.04, 1e-12);
    EXPECT_NEAR(direct_imaging_error(SourceDistribution::point(0.0), 1, 1), 1.0, 1e-15);
    const SourceDistribution f = SourceDistribution::two_point(0.5);
    EXPECT_NEAR(direct_imaging_error(f, 3, 7), direct_imaging_error(f, 3, 1) / 7, 1e-14);
    EXPECT_THROW(direct_imaging_error(f, 2, 0), InvalidInput);
}

TEST(DirectImagingError, MatchesQuadratureVariance) {
    for (int trial = 0; trial < 5; ++trial) {
        Rng rng = stream_rng(43, trial);
        const SourceDistribution f = random_discrete(rng, 3);
        const std::vector<double> beta = object_moments(f, 4);
        for (int mu = 1; mu <= 4; ++mu) {
            const std::vector<double> c = direct_imaging_estimator(mu);
            const double b = beta[static_cast<std::size_t>(mu)];
            const double var =
                mixture_expectation(f, [&](double x) { return std::pow(poly(c, x) - b, 2); });
            EXPECT_LT(rel_err(direct_imaging_error(f, mu), var), 1e-8) << "mu " << mu;
        }
    }
}

TEST(SpadeErrorEven, Examples) {
    EXPECT_NEAR(spade_error_even(SourceDistribution::two_point(0.2), 1, 1), 0.04, 1e-14);
    EXPECT_EQ(spade_error_even(SourceDistribution::point(0.0), 1, 1), 0.0);
    const SourceDistribution f = SourceDistribution::two_point(0.8);
    EXPECT_NEAR(spade_error_even(f, 2, 5), spade_error_even(f, 2, 1) / 5, 1e-15);
}

TEST(SpadeErrorEven, TruncationGuard) {
    const SourceDistribution f = SourceDistribution::two_point(4.0);
    const int need = spade_truncation(f);
    EXPECT_GT(need, 5);
    EXPECT_THROW(spade_error_even(f, 1, 1, 2), ConvergenceError);
    // the cutoff bounds tail probability, not the (4m)^2-weighted tail
    EXPECT_LT(rel_err(spade_error_even(f, 1, 1, need + 5), spade_error_even(f, 1, 1)), 1e-10);
}

TEST(SpadeDistribution, PoissonMixtureSumsToOne) {
    const SourceDistribution f = SourceDistribution::two_point(1.3);
    const std::vector<double> p = spade_distribution(f, spade_truncation(f));
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
}

TEST(SpadeErrorEven, ScalingSlope) {
    for (int j = 1; j <= 2; ++j) {
        const double d0 = 0.05;
        const double d1 = 0.4;
        const double e0 = spade_error_even(SourceDistribution::two_point(d0), j);
        const double e1 = spade_error_even(SourceDistribution::two_point(d1), j);
        const double slope = std::log(e1 / e0) / std::log(d1 / d0);
        EXPECT_NEAR(slope, 2.0 * j, 0.1) << "j " << j;
    }
}

TEST(EcLowerBound, Examples) {
    EXPECT_NEAR(ec_lower_bound(SourceDistribution::two_point(0.2), 2, 1), 0.04, 1e-15);
    EXPECT_EQ(ec_lower_bound(SourceDistribution::point(0.0), 2, 1), 0.0);
    const SourceDistribution f = SourceDistribution::two_point(0.6);
    // mu = 1: variance of F plus one
    EXPECT_NEAR(ec_lower_bound(f, 1, 1), 0.09 + 1.0, 1e-15);
    EXPECT_THROW(ec_lower_bound(f, 0, 1), InvalidInput);
}

TEST(EcLowerBound, EqualsSpadeAtSecondMomentForDiscreteSources) {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = stream_rng(44, trial);
        const SourceDistribution f = random_discrete(rng, 1 + trial % 5);
        const double ec = ec_lower_bound(f, 2);
        const double sp = spade_error_even(f, 1);
        EXPECT_NEAR(ec, sp, 1e-9);
    }
}

TEST(EcLowerBound, BelowDirectImaging) {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = stream_rng(45, trial);
        const SourceDistribution f = random_discrete(rng, 1 + trial % 5).dilated(0.2 + 0.3 * (trial % 4));
        for (int mu = 1; mu <= 6; ++mu) {
            EXPECT_LE(ec_lower_bound(f, mu), direct_imaging_error(f, mu) + 1e-9)
                << "trial " << trial << " mu " << mu;
        }
    }
}

TEST(Imaging, DirectStaysOrderOneWhileSpadeVanishes) {
    double prev_ratio = 0.0;
    for (double delta : {0.4, 0.2, 0.1, 0.05}) {
        const SourceDistribution f = SourceDistribution::two_point(delta);
        const double direct = direct_imaging_error(f, 2);
        const double spade = spade_error_even(f, 1);
        EXPECT_NEAR(direct, 2.0, 0.2);
        const double ratio = direct / spade;
        EXPECT_GT(ratio, prev_ratio);
        prev_ratio = ratio;
    }
}
