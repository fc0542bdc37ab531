#include "smax/geometry.hpp"

#include <cmath>

namespace smax {

Rotation Rotation::inverse() const { return rodrigues_matrix(-theta, axis); }

Rotation rodrigues_matrix(double theta, const UnitVec3& axis) {
    if (!std::isfinite(theta))
        throw std::invalid_argument("rodrigues_matrix: theta must be finite");

    double c = std::cos(theta);
    double s = std::sin(theta);
    double k = 1.0 - c;
    double ux = axis.x(), uy = axis.y(), uz = axis.z();

    Rotation r;
    r.theta = theta;
    r.axis = axis;
    Mat3& m = r.matrix;
    m(0, 0) = c + k * ux * ux;
    m(0, 1) = k * ux * uy - s * uz;
    m(0, 2) = k * ux * uz + s * uy;
    m(1, 0) = k * uy * ux + s * uz;
    m(1, 1) = c + k * uy * uy;
    m(1, 2) = k * uy * uz - s * ux;
    m(2, 0) = k * uz * ux - s * uy;
    m(2, 1) = k * uz * uy + s * ux;
    m(2, 2) = c + k * uz * uz;
    return r;
}

double vmf_coefficient(double kappa) {
    if (kappa < 1e-8) return 1.0 / kFourPi;
    /* kappa / (2 pi (1 - e^{-2 kappa})); expm1 keeps small kappa accurate. */
    return kappa / (2.0 * kPi * (-std::expm1(-2.0 * kappa)));
}

double vmf_density(const UnitVec3& x, const VmfParams& p) {
    return vmf_density_dot(x.dot(p.mu), p.kappa, vmf_coefficient(p.kappa));
}

double vmf_sup(const VmfParams& p) { return vmf_coefficient(p.kappa); }

double vmf_inf(const VmfParams& p) {
    if (p.kappa < 1e-8) return 1.0 / kFourPi;
    return vmf_coefficient(p.kappa) * std::exp(-2.0 * p.kappa);
}

SphericalGrid fibonacci_grid(std::size_t n) {
    if (n == 0) throw std::invalid_argument("fibonacci_grid: n must be >= 1");

    static const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    SphericalGrid g;
    g.nodes.reserve(n);
    g.weights.assign(n, kFourPi / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden_angle * static_cast<double>(i);
        g.nodes.emplace_back(Vec3(r * std::cos(phi), r * std::sin(phi), z));
    }
    return g;
}

UnitVec3 uniform_sphere_sample(RngStream& rng) {
    for (;;) {
        auto [n0, n1] = rng.normal_pair();
        auto [n2, n3] = rng.normal_pair();
        (void)n3;
        Vec3 v(n0, n1, n2);
        if (v.dot(v) > 1e-24) return UnitVec3(v);
        /* Degenerate draw; astronomically rare, retry keeps the contract. */
    }
}

}  // namespace smax
