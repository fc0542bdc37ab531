#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "smax/rng.hpp"
#include "smax/vec3.hpp"

namespace smax {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kFourPi = 4.0 * kPi;

/* Default cap on the vMF concentration. Beyond this, sinh overflows long
 * before, and exact-simulation cost grows like e^{2 kappa}. */
inline constexpr double kDefaultKappaMax = 10.0;

/* Point on the unit sphere. Construction normalizes, so downstream code can
 * rely on |v| = 1 to within an ulp. */
struct UnitVec3 {
    Vec3 v;

    UnitVec3() : v(0.0, 0.0, 1.0) {}
    UnitVec3(double x, double y, double z) : UnitVec3(Vec3(x, y, z)) {}
    explicit UnitVec3(const Vec3& raw) {
        double n = raw.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw std::invalid_argument("UnitVec3: vector must have positive finite norm");
        v = raw * (1.0 / n);
    }

    double x() const { return v.x; }
    double y() const { return v.y; }
    double z() const { return v.z; }
    double dot(const UnitVec3& o) const { return v.dot(o.v); }

    /* Wraps components already unit length to within 1e-9 without
     * renormalizing, so deserialized points stay bit-identical. */
    static UnitVec3 trusted(double x, double y, double z) {
        Vec3 raw(x, y, z);
        double n = raw.norm();
        if (!(std::fabs(n - 1.0) <= 1e-9))
            throw std::invalid_argument("UnitVec3::trusted: norm not within 1e-9 of 1");
        UnitVec3 u;
        u.v = raw;
        return u;
    }
};

/* Rotation about a fixed axis, with the matrix cached at construction. */
struct Rotation {
    double theta = 0.0;
    UnitVec3 axis;
    Mat3 matrix = Mat3::identity();

    Vec3 apply(const Vec3& p) const { return matrix.apply(p); }
    UnitVec3 apply(const UnitVec3& p) const { return UnitVec3(matrix.apply(p.v)); }
    Rotation inverse() const;
};

/* cos(t) I + sin(t) [u]_x + (1 - cos(t)) u u^T */
Rotation rodrigues_matrix(double theta, const UnitVec3& axis);

struct VmfParams {
    UnitVec3 mu;
    double kappa = 0.0;

    VmfParams() = default;
    VmfParams(const UnitVec3& mu_, double kappa_, double kappa_max = kDefaultKappaMax)
        : mu(mu_), kappa(kappa_) {
        if (!(kappa >= 0.0) || !std::isfinite(kappa))
            throw std::invalid_argument("VmfParams: kappa must be finite and >= 0");
        if (kappa > kappa_max)
            throw std::invalid_argument("VmfParams: kappa exceeds cap");
    }
};

/*
 * von Mises-Fisher density on S^2, evaluated in the overflow-free form
 *   f(x) = C(kappa) * exp(kappa * (mu.x - 1)),  C = kappa / (2 pi (1 - e^{-2 kappa})).
 * The inner product is clamped to [-1, 1] so that
 *   vmf_inf(p) <= vmf_density(x, p) <= vmf_sup(p)
 * holds for every representable x; envelope and pruning logic depend on it.
 * kappa below 1e-8 takes the uniform limit 1 / (4 pi).
 */
double vmf_coefficient(double kappa);
double vmf_density(const UnitVec3& x, const VmfParams& p);
double vmf_sup(const VmfParams& p);
double vmf_inf(const VmfParams& p);

/* Density from a precomputed coefficient and inner product; the hot path for
 * event-set evaluation. dot is clamped here, not by the caller. */
inline double vmf_density_dot(double dot, double kappa, double coefficient) {
    if (dot > 1.0) dot = 1.0;
    if (dot < -1.0) dot = -1.0;
    if (kappa < 1e-8) return coefficient;
    return coefficient * std::exp(kappa * (dot - 1.0));
}

/* Quadrature nodes and weights; weights are steradians and sum to 4 pi. */
struct SphericalGrid {
    std::vector<UnitVec3> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/* Fibonacci lattice with equal weights 4 pi / n. */
SphericalGrid fibonacci_grid(std::size_t n);

/* Normalized triple of standard normals; consumes exactly four uniforms. */
UnitVec3 uniform_sphere_sample(RngStream& rng);

}  // namespace smax
