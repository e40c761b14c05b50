#pragma once

#include <vector>

#include "qsemi/operators.hpp"

// Incoherent imaging with a Gaussian point-spread function of unit width:
// object moments, the direct-imaging and SPADE moment estimators, and the
// extended-convexity lower bound.

namespace qsemi {

inline constexpr int kMaxImagingOrder = 20;

/// Source density on the object plane, stored as quadrature nodes. Discrete
/// sources are exact; gridded densities use composite Simpson weights.
class SourceDistribution {
public:
    static SourceDistribution discrete(std::vector<double> positions, std::vector<double> weights);
    /// Uniform grid with an odd number of points and density values on it.
    static SourceDistribution gridded(std::vector<double> grid, std::vector<double> density);
    /// Two equal-weight points at +/- separation/2.
    static SourceDistribution two_point(double separation);
    static SourceDistribution point(double x0);

    /// Same source with every position scaled by factor.
    SourceDistribution dilated(double factor) const;

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    bool is_discrete() const { return discrete_; }
    /// Largest |X| carrying weight.
    double width() const;

private:
    SourceDistribution(std::vector<double> nodes, std::vector<double> weights, bool discrete);
    std::vector<double> nodes_;
    std::vector<double> weights_;
    bool discrete_ = true;
};

/// beta_mu = int F(X) X^mu dX for mu = 0..mu_max.
std::vector<double> object_moments(const SourceDistribution& f, int mu_max);

/// Central moment of the standard normal: (k-1)!! for even k, 0 for odd k.
double normal_central_moment(int k);

/// Coefficients c_nu of the unbiased direct-imaging estimator
/// sum_nu c_nu x^nu of beta_mu. Valid for 0 <= mu <= 20.
std::vector<double> direct_imaging_estimator(int mu);

/// E[x^k] under the image-plane density p(x) = int F(X) phi(x - X) dX, k = 0..k_max.
std::vector<double> image_moments(const SourceDistribution& f, int k_max);

/// Variance of the direct-imaging estimator of beta_mu divided by n.
double direct_imaging_error(const SourceDistribution& f, int mu, int n = 1);

/// Probability p(m) of m photons in the SPADE mode m, m = 0..m_max.
std::vector<double> spade_distribution(const SourceDistribution& f, int m_max);

/// Smallest m_max with SPADE tail probability below tail_tol for every node.
int spade_truncation(const SourceDistribution& f, double tail_tol = 1e-12);

/// Variance of the SPADE estimator [m >= j] 4^j m!/(m-j)! of beta_{2j}, divided
/// by n. m_max <= 0 selects spade_truncation(f). Throws ConvergenceError when a
/// supplied m_max leaves tail probability above 1e-12 or the estimator mean
/// misses beta_{2j} by more than 1e-9 relative.
double spade_error_even(const SourceDistribution& f, int j, int n = 1, int m_max = 0);

/// (beta_{2mu} - beta_mu^2 + mu^2 beta_{2mu-2}) / n
double ec_lower_bound(const SourceDistribution& f, int mu, int n = 1);

} // namespace qsemi
