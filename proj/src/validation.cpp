#include "smax/validation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smax/parallel.hpp"

namespace smax {

double kolmogorov_distance_frechet(std::vector<double> samples, double scale_pt) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double cdf = std::exp(-scale_pt / samples[i]);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(cdf - lo, hi - cdf));
    }
    return d;
}

KsResult ks_frechet(const std::vector<double>& samples) {
    if (samples.size() < 100)
        throw std::invalid_argument("ks_frechet: need at least 100 samples");
    for (double v : samples)
        if (!(v > 0.0))
            throw std::invalid_argument("ks_frechet: samples must be positive");
    KsResult r;
    r.n = samples.size();
    r.statistic = kolmogorov_distance_frechet(samples);
    r.threshold = 1.63 / std::sqrt(static_cast<double>(r.n));
    r.pass = r.statistic < r.threshold;
    return r;
}

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
    if (x.empty() || y.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());

    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        /* Both ECDFs jump together at a shared value, so the gap is only
         * meaningful once every element of the tied block is consumed.
         * Atoms are real here: the decayed start is an exact value the
         * chain takes with positive probability. */
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == t) ++i;
        while (j < y.size() && y[j] == t) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / nx -
                                  static_cast<double>(j) / ny));
    }
    KsResult r;
    r.n = x.size();
    r.statistic = d;
    r.threshold = 1.63 * std::sqrt((nx + ny) / (nx * ny));
    r.pass = r.statistic < r.threshold;
    return r;
}

MaxStabilityResult max_stability_check(const ChainConfig& config, int n_copies,
                                       const UnitVec3& probe1, const UnitVec3& probe2,
                                       std::size_t reps, const RngStream& rng,
                                       int threads) {
    if (n_copies < 1)
        throw std::invalid_argument("max_stability_check: n_copies must be >= 1");
    config.validate();

    std::vector<double> ref1(reps), ref2(reps), max1(reps), max2(reps);
    parallel_for(reps, threads, [&](std::size_t rep) {
        RngStream base = rng.derive(rep);
        RngStream ref_stream = base.derive(0);
        InnovationField z = simulate_innovation(config.kappa, whole_sphere, ref_stream,
                                                config.intensity, config.event_cap);
        ref1[rep] = eval_field(z, probe1);
        ref2[rep] = eval_field(z, probe2);

        double m1 = 0.0, m2 = 0.0;
        for (int k = 0; k < n_copies; ++k) {
            RngStream copy_stream = base.derive(static_cast<std::uint64_t>(k) + 1);
            InnovationField zk =
                simulate_innovation(config.kappa, whole_sphere, copy_stream,
                                    config.intensity, config.event_cap);
            m1 = std::max(m1, eval_field(zk, probe1));
            m2 = std::max(m2, eval_field(zk, probe2));
        }
        max1[rep] = m1 / static_cast<double>(n_copies);
        max2[rep] = m2 / static_cast<double>(n_copies);
    });

    MaxStabilityResult out;
    out.probe_ks[0] = ks_two_sample(max1, ref1);
    out.probe_ks[1] = ks_two_sample(max2, ref2);

    /* Bivariate empirical CDFs compared on a fixed grid of Frechet
     * quantiles, z_q = -sigma_pt / log((q+0.5)/10). */
    const double sigma_pt = config.sigma_point();
    std::array<double, 10> q{};
    for (int k = 0; k < 10; ++k)
        q[k] = -sigma_pt / std::log((static_cast<double>(k) + 0.5) / 10.0);

    double disc = 0.0;
    for (double zj : q) {
        for (double zk : q) {
            std::size_t c_ref = 0, c_max = 0;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                if (ref1[rep] <= zj && ref2[rep] <= zk) ++c_ref;
                if (max1[rep] <= zj && max2[rep] <= zk) ++c_max;
            }
            disc = std::max(disc, std::fabs(static_cast<double>(c_ref) -
                                            static_cast<double>(c_max)) /
                                      static_cast<double>(reps));
        }
    }
    out.bivariate_discrepancy = disc;
    /* Regression constant calibrated at 1e4 replicates, scaled like a KS
     * statistic for other sizes. */
    out.bivariate_threshold = 0.03 * std::sqrt(10000.0 / static_cast<double>(reps));
    out.pass = out.probe_ks[0].pass && out.probe_ks[1].pass &&
               disc < out.bivariate_threshold;
    return out;
}

RotationStabilityResult rotation_stability_check(const std::vector<UnitVec3>& points,
                                                 double theta, const UnitVec3& axis,
                                                 double kappa, std::size_t grid_n,
                                                 std::size_t mc_n, RngStream& rng) {
    if (points.empty() || points.size() > 10)
        throw std::invalid_argument("rotation_stability_check: need 1..10 points");

    Rotation rot = rodrigues_matrix(theta, axis);
    std::vector<UnitVec3> rotated;
    rotated.reserve(points.size());
    for (const auto& p : points) rotated.push_back(rot.apply(p));

    const double coef = vmf_coefficient(kappa);
    auto integrand = [&](const std::vector<UnitVec3>& pts, const UnitVec3& mu) {
        double best = 0.0;
        for (const auto& p : pts)
            best = std::max(best, vmf_density_dot(p.dot(mu), kappa, coef));
        return best;
    };

    RotationStabilityResult out;
    SphericalGrid grid = fibonacci_grid(grid_n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.lhs += grid.weights[i] * integrand(rotated, grid.nodes[i]);
        out.rhs += grid.weights[i] * integrand(points, grid.nodes[i]);
    }
    out.rel_err = std::fabs(out.lhs - out.rhs) / std::max(std::fabs(out.rhs), 1e-300);

    double s_l = 0.0, s2_l = 0.0, s_r = 0.0, s2_r = 0.0;
    for (std::size_t k = 0; k < mc_n; ++k) {
        UnitVec3 mu = uniform_sphere_sample(rng);
        double l = integrand(rotated, mu);
        double r = integrand(points, mu);
        s_l += l;
        s2_l += l * l;
        s_r += r;
        s2_r += r * r;
    }
    const double m = static_cast<double>(mc_n);
    out.mc_lhs = kFourPi * s_l / m;
    out.mc_rhs = kFourPi * s_r / m;
    double var_l = std::max(0.0, s2_l / m - (s_l / m) * (s_l / m));
    double var_r = std::max(0.0, s2_r / m - (s_r / m) * (s_r / m));
    out.mc_stderr_lhs = kFourPi * std::sqrt(var_l / m);
    out.mc_stderr_rhs = kFourPi * std::sqrt(var_r / m);
    out.grid_mc_consistent =
        std::fabs(out.lhs - out.mc_lhs) <= 3.0 * out.mc_stderr_lhs &&
        std::fabs(out.rhs - out.mc_rhs) <= 3.0 * out.mc_stderr_rhs;
    return out;
}

KsResult chain_margin_check(const ChainConfig& config, const StationaryParams& sp,
                            const UnitVec3& probe, std::size_t reps, const RngStream& rng,
                            int threads) {
    const double sigma_pt = config.sigma_point();
    std::vector<double> samples(reps);
    parallel_for(reps, threads, [&](std::size_t rep) {
        RngStream stream = rng.derive(rep);
        ChainState st = stationary_draw(config, sp, stream);
        samples[rep] = eval_state(st, probe) / sigma_pt;
    });
    return ks_frechet(samples);
}

}  // namespace smax
