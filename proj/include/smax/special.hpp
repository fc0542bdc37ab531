#pragma once

namespace smax {

/*
 * Lower incomplete gamma, gamma(s, x) = integral_0^x t^{s-1} e^{-t} dt,
 * unnormalized. Series expansion for x < s + 1, continued fraction (modified
 * Lentz) for the complement otherwise. Accurate to ~1e-14 relative over the
 * range used here (s in (0,1), x >= 0); checked against high-precision
 * reference values in the tests.
 */
double lower_incomplete_gamma(double s, double x);

}  // namespace smax
