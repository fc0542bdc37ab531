#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "smax/chain.hpp"

namespace smax {

/*
 * Drift machinery for the Lyapunov functional L(h) = ||h^gamma||_inf.
 * One transition satisfies (PL)(h) <= beta L(h) + K with beta = a^gamma and
 * K = (1-a)^gamma sigma_Z^gamma Gamma(1-gamma), sigma_Z being the Frechet
 * scale of ||Z||_inf under the active intensity mode.
 */
struct DriftParams {
    double gamma = 0.5;
    double beta = 0.0;
    double bigK = 0.0;
};

DriftParams make_drift_params(double gamma, double a, double sigma_z);

struct DriftReport {
    double L_h = 0.0;
    double pl_closed = 0.0;
    double pl_mc = 0.0;
    double mc_stderr = 0.0;
    double rhs = 0.0; /* beta * L_h + bigK */
    bool pass = false;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

struct MinorizationReport {
    double R = 0.0;
    double alpha_analytic = 0.0;
    double alpha_empirical = 0.0;
    std::size_t n = 0;
    double stderr_ = 0.0;
    bool pass = false;
};

struct ConvergenceReport {
    UnitVec3 probe;
    int horizon = 0;
    std::vector<double> distances; /* Kolmogorov distance per t = 0..horizon */
    double fitted_log_slope = 0.0;
    double noise_floor = 0.0;
    double slope_threshold = 0.0; /* log(a) + 0.1 */
    bool pass = false;
};

double lyapunov(const InitialField& h, double gamma);
double lyapunov(const ChainState& state, double gamma);

/*
 * E[max(a^g L(h), ((1-a) ||Z||)^g)] in closed form. With c = a^g L(h),
 * m = (1-a) sigma_Z and tau = m c^{-1/g}:
 *
 *   (PL)(h) = c e^{-tau} + m^g gamma_lower(1-g, tau),
 *
 * using ||Z||_inf = sigma_Z / E, E ~ Exp(1). The c = 0 limit is
 * m^g Gamma(1-g), which is exactly the drift constant K.
 */
double pl_closed_form(double L_h, double gamma, double a, double sigma_z);

/*
 * Monte Carlo counterpart: averages max(a^g L(h), (1-a)^g ||Z_k||^g) over n
 * innovations. For the max-stable kind, ||Z_k||_inf is drawn through
 * sup_norm_sample (provably the same value simulate_innovation would
 * produce); plug-in kinds realize the field and use its sup bound.
 */
std::pair<double, double> pl_monte_carlo(const InitialField& h, const ChainConfig& config,
                                         double gamma, std::size_t n, const RngStream& rng,
                                         int threads = 1);

DriftReport drift_check(const InitialField& h, const ChainConfig& config, double gamma,
                        std::size_t n, const RngStream& rng, int threads = 1);

/*
 * Analytic one-step coupling probability from a small set of radius R:
 * alpha = 1 - exp(-rate * kappa (1-a) e^{-kappa} / (4 pi sinh(kappa) a R)),
 * with kappa/sinh(kappa) -> 1 as kappa -> 0.
 */
double minorization_alpha(double R, double a, double kappa, double intensity_rate_);

struct CouplingEstimate {
    double fraction = 0.0;
    double stderr_ = 0.0;
    std::vector<std::uint8_t> flagged; /* per replicate; re-derive stream rng.derive(k) */
};

/*
 * Fraction of innovations whose certified infimum clears
 * a/(1-a) * max(sup h1, sup h2); on that event one shared step erases both
 * histories, coupling the chains exactly.
 */
CouplingEstimate empirical_coupling_prob(const InitialField& h1, const InitialField& h2,
                                         const ChainConfig& config, std::size_t n,
                                         const RngStream& rng, int threads = 1);

/*
 * Kolmogorov distance to the stationary marginal at a probe point for
 * t = 0..horizon over reps trajectories from h0, with a least-squares slope
 * of log-distance over the prefix of points above the KS noise floor
 * 1.63/sqrt(reps). Fewer than two fittable points means the chain is at the
 * floor immediately; the slope is reported as -infinity and passes.
 */
ConvergenceReport convergence_rate(const ChainConfig& config, const InitialField& h0,
                                   const UnitVec3& probe, int horizon, std::size_t reps,
                                   const RngStream& rng, int threads = 1);

}  // namespace smax
