#pragma once

// Small statistics toolkit used by the experiments and the test suites.

#include <cstddef>
#include <span>
#include <vector>

namespace snslab::stats {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  ///< standard error of the mean
    double sd = 0.0;
    std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> x);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_se = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs at least two distinct x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double dof = 0.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov law.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);
/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x);

/// Chi-square test of homogeneity for a 2 x k table of counts. Columns with
/// zero total are dropped.
TestResult chi_square_homogeneity(std::span<const long> a, std::span<const long> b);
double chi_square_sf(double x, double dof);

/// Two-sided normal tail probability of |Z| > |z|.
double normal_two_sided_p(double z);

/// Wasserstein-1 distance between two weighted empirical measures on the line.
/// Weights are normalized internally; empty weight vectors mean uniform.
double wasserstein1(std::span<const double> xa, std::span<const double> wa, std::span<const double> xb,
                    std::span<const double> wb);
double wasserstein1(std::span<const double> xa, std::span<const double> xb);

}  // namespace snslab::stats
