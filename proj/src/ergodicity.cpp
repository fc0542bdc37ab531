#include "smax/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "smax/parallel.hpp"
#include "smax/special.hpp"
#include "smax/validation.hpp"

namespace smax {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("gamma must lie strictly in (0,1)");
}

}  // namespace

DriftParams make_drift_params(double gamma, double a, double sigma_z) {
    check_gamma(gamma);
    if (!(a > 0.0) || !(a < 1.0))
        throw std::invalid_argument("make_drift_params: a must lie in (0,1)");
    DriftParams p;
    p.gamma = gamma;
    p.beta = std::pow(a, gamma);
    double m = (1.0 - a) * sigma_z;
    p.bigK = std::pow(m, gamma) * std::tgamma(1.0 - gamma);
    return p;
}

double lyapunov(const InitialField& h, double gamma) {
    check_gamma(gamma);
    return std::pow(h.sup(), gamma);
}

double lyapunov(const ChainState& state, double gamma) {
    check_gamma(gamma);
    return std::pow(state_sup(state), gamma);
}

double pl_closed_form(double L_h, double gamma, double a, double sigma_z) {
    check_gamma(gamma);
    if (!(L_h >= 0.0)) throw std::invalid_argument("pl_closed_form: L_h must be >= 0");
    const double m = (1.0 - a) * sigma_z;
    const double c = std::pow(a, gamma) * L_h;
    if (c == 0.0) return std::pow(m, gamma) * std::tgamma(1.0 - gamma);
    const double tau = m * std::pow(c, -1.0 / gamma);
    return c * std::exp(-tau) +
           std::pow(m, gamma) * lower_incomplete_gamma(1.0 - gamma, tau);
}

std::pair<double, double> pl_monte_carlo(const InitialField& h, const ChainConfig& config,
                                         double gamma, std::size_t n, const RngStream& rng,
                                         int threads) {
    check_gamma(gamma);
    if (n < 100) throw std::invalid_argument("pl_monte_carlo: need n >= 100");
    const double c = std::pow(config.a, gamma) * lyapunov(h, gamma);
    const double w = std::pow(1.0 - config.a, gamma);
    const bool custom = config.innovation.kind == InnovationSpec::Kind::custom;

    std::vector<double> values(n);
    parallel_for(n, threads, [&](std::size_t k) {
        RngStream stream = rng.derive(k);
        double sup;
        if (custom) {
            sup = config.innovation.make_custom(stream)->sup_bound();
        } else {
            sup = sup_norm_sample(config.kappa, stream, config.intensity);
        }
        values[k] = std::max(c, w * std::pow(sup, gamma));
    });

    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {mean, sd / std::sqrt(static_cast<double>(n))};
}

DriftReport drift_check(const InitialField& h, const ChainConfig& config, double gamma,
                        std::size_t n, const RngStream& rng, int threads) {
    if (config.innovation.kind != InnovationSpec::Kind::vmf_maxstable)
        throw std::invalid_argument("drift_check: closed form needs the max-stable kind");
    DriftParams p = make_drift_params(gamma, config.a, config.sigma_z());
    DriftReport r;
    r.L_h = lyapunov(h, gamma);
    r.pl_closed = pl_closed_form(r.L_h, gamma, config.a, config.sigma_z());
    auto [est, se] = pl_monte_carlo(h, config, gamma, n, rng, threads);
    r.pl_mc = est;
    r.mc_stderr = se;
    r.rhs = p.beta * r.L_h + p.bigK;
    r.n = n;
    r.seed = rng.master_seed();
    r.pass = (r.pl_mc <= r.rhs + 3.0 * se) && (std::fabs(r.pl_mc - r.pl_closed) <= 3.0 * se);
    return r;
}

double minorization_alpha(double R, double a, double kappa, double intensity_rate_) {
    if (!(R > 0.0)) throw std::invalid_argument("minorization_alpha: R must be > 0");
    if (!(a > 0.0) || !(a < 1.0))
        throw std::invalid_argument("minorization_alpha: a must lie in (0,1)");
    if (!(kappa >= 0.0)) throw std::invalid_argument("minorization_alpha: kappa must be >= 0");
    if (!(intensity_rate_ > 0.0))
        throw std::invalid_argument("minorization_alpha: rate must be > 0");
    const double ratio = kappa < 1e-8 ? 1.0 : kappa / std::sinh(kappa);
    const double expo =
        intensity_rate_ * ratio * std::exp(-kappa) * (1.0 - a) / (kFourPi * a * R);
    return -std::expm1(-expo);
}

CouplingEstimate empirical_coupling_prob(const InitialField& h1, const InitialField& h2,
                                         const ChainConfig& config, std::size_t n,
                                         const RngStream& rng, int threads) {
    config.validate();
    const double threshold =
        config.a / (1.0 - config.a) * std::max(h1.sup(), h2.sup());
    const bool custom = config.innovation.kind == InnovationSpec::Kind::custom;

    CouplingEstimate out;
    out.flagged.assign(n, 0);
    parallel_for(n, threads, [&](std::size_t k) {
        RngStream stream = rng.derive(k);
        double inf_bound;
        if (custom) {
            inf_bound = config.innovation.make_custom(stream)->inf_bound();
        } else {
            InnovationField z = simulate_innovation(config.kappa, whole_sphere, stream,
                                                    config.intensity, config.event_cap);
            inf_bound = field_inf_bound(z);
        }
        out.flagged[k] = inf_bound >= threshold ? 1 : 0;
    });

    std::size_t hits = 0;
    for (auto f : out.flagged) hits += f;
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    out.fraction = p;
    out.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return out;
}

ConvergenceReport convergence_rate(const ChainConfig& config, const InitialField& h0,
                                   const UnitVec3& probe, int horizon, std::size_t reps,
                                   const RngStream& rng, int threads) {
    if (horizon < 5) throw std::invalid_argument("convergence_rate: horizon must be >= 5");
    if (reps < 1000) throw std::invalid_argument("convergence_rate: need reps >= 1000");
    config.validate();

    const std::size_t T = static_cast<std::size_t>(horizon);
    std::vector<std::vector<double>> values(T + 1, std::vector<double>(reps));
    parallel_for(reps, threads, [&](std::size_t rep) {
        RngStream stream = rng.derive(rep);
        ChainState st = make_initial_state(h0, config);
        values[0][rep] = eval_state(st, probe);
        for (std::size_t t = 1; t <= T; ++t) {
            st = step(st, stream);
            values[t][rep] = eval_state(st, probe);
        }
    });

    ConvergenceReport out;
    out.probe = probe;
    out.horizon = horizon;
    out.noise_floor = 1.63 / std::sqrt(static_cast<double>(reps));
    out.slope_threshold = std::log(config.a) + 0.1;
    const double sigma_pt = config.sigma_point();
    out.distances.reserve(T + 1);
    for (std::size_t t = 0; t <= T; ++t)
        out.distances.push_back(kolmogorov_distance_frechet(values[t], sigma_pt));

    /* Fit over the prefix of distances still above the noise floor. */
    std::size_t fit_len = 0;
    while (fit_len <= T && out.distances[fit_len] > out.noise_floor) ++fit_len;
    if (fit_len < 2) {
        out.fitted_log_slope = -std::numeric_limits<double>::infinity();
    } else {
        double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
        for (std::size_t t = 0; t < fit_len; ++t) {
            double y = std::log(out.distances[t]);
            st += static_cast<double>(t);
            sy += y;
            stt += static_cast<double>(t) * static_cast<double>(t);
            sty += static_cast<double>(t) * y;
        }
        const double len = static_cast<double>(fit_len);
        out.fitted_log_slope = (len * sty - st * sy) / (len * stt - st * st);
    }
    out.pass = out.fitted_log_slope <= out.slope_threshold;
    return out;
}

}  // namespace smax
