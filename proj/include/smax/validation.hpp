#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "smax/chain.hpp"

namespace smax {

struct KsResult {
    double statistic = 0.0;
    std::size_t n = 0;
    double threshold = 0.0;
    bool pass = false;
};

/* sup_z |empirical CDF - exp(-scale_pt/z)| over a sorted copy of samples. */
double kolmogorov_distance_frechet(std::vector<double> samples, double scale_pt = 1.0);

/* One-sample test against the standard Frechet CDF at the 1% level
 * (asymptotic critical value 1.63/sqrt(n)). */
KsResult ks_frechet(const std::vector<double>& samples);

/* Two-sample test, threshold 1.63 * sqrt((n+m)/(n m)). */
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

struct MaxStabilityResult {
    std::array<KsResult, 2> probe_ks;
    double bivariate_discrepancy = 0.0;
    double bivariate_threshold = 0.0;
    bool pass = false;
};

/*
 * Max-stability: the law of (1/n) max of n independent copies of Z must be
 * the law of Z. Compared at two probes by two-sample KS plus the sup over a
 * 10x10 grid of Frechet quantiles of the bivariate empirical-CDF gap.
 */
MaxStabilityResult max_stability_check(const ChainConfig& config, int n_copies,
                                       const UnitVec3& probe1, const UnitVec3& probe2,
                                       std::size_t reps, const RngStream& rng,
                                       int threads = 1);

struct RotationStabilityResult {
    double lhs = 0.0; /* grid quadrature of integral with rotated points */
    double rhs = 0.0; /* grid quadrature of integral with original points */
    double rel_err = 0.0;
    double mc_lhs = 0.0;
    double mc_rhs = 0.0;
    double mc_stderr_lhs = 0.0;
    double mc_stderr_rhs = 0.0;
    bool grid_mc_consistent = false; /* both sides within 3 MC standard errors */
};

/*
 * Rotational stability of the spectral integral:
 *   int max_m f(R x_m; mu) lambda(dmu) = int max_m f(x_m; mu) lambda(dmu).
 * Both sides by Fibonacci-grid quadrature, cross-checked by Monte Carlo
 * over uniform marks (times 4 pi).
 */
RotationStabilityResult rotation_stability_check(const std::vector<UnitVec3>& points,
                                                 double theta, const UnitVec3& axis,
                                                 double kappa, std::size_t grid_n,
                                                 std::size_t mc_n, RngStream& rng);

/* Stationary marginal at a probe vs the mode's Frechet scale. */
KsResult chain_margin_check(const ChainConfig& config, const StationaryParams& sp,
                            const UnitVec3& probe, std::size_t reps, const RngStream& rng,
                            int threads = 1);

}  // namespace smax
