#include "smax/special.hpp"

#include <cmath>
#include <stdexcept>

namespace smax {

namespace {

/* gamma(s, x) = x^s e^{-x} sum_{n>=0} x^n / (s (s+1) ... (s+n)) */
double lig_series(double s, double x) {
    double ap = s;
    double term = 1.0 / s;
    double sum = term;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + s * std::log(x));
}

/* Upper incomplete gamma by the Legendre continued fraction, Lentz form. */
double uig_cf(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + s * std::log(x)) * h;
}

}  // namespace

double lower_incomplete_gamma(double s, double x) {
    if (!(s > 0.0) || !(x >= 0.0))
        throw std::invalid_argument("lower_incomplete_gamma: need s > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return lig_series(s, x);
    return std::tgamma(s) - uig_cf(s, x);
}

}  // namespace smax
