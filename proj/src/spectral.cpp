#include "smax/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace smax {

namespace {

[[noreturn]] void throw_cap(double kappa, std::size_t cap) {
    throw std::runtime_error("simulate_innovation: event cap " + std::to_string(cap) +
                             " reached before stopping at kappa = " + std::to_string(kappa) +
                             "; reduce kappa or raise the cap");
}

using detail::advance_arrival;

/* rate/s can round to the previous weight even for distinct arrivals; the
 * sorted-events invariant wants strict decrease, so shave an ulp if needed. */
double next_weight(double rate, double s, const std::vector<SpectralEvent>& events) {
    double u = rate / s;
    if (!events.empty() && u >= events.back().weight)
        u = std::nextafter(events.back().weight, 0.0);
    return u;
}

}  // namespace

InnovationField simulate_innovation(double kappa, const SphericalGrid& eval_set,
                                    RngStream& rng, IntensityMode imode,
                                    std::size_t event_cap) {
    if (eval_set.size() == 0)
        throw std::invalid_argument("simulate_innovation: empty eval_set");
    const double rate = intensity_rate(imode);
    const double coef = vmf_coefficient(kappa);

    InnovationField field;
    field.kappa = kappa;
    field.mode = EvalMode::grid;
    field.rate = rate;

    std::vector<double> envelope(eval_set.size(), 0.0);
    double env_min = 0.0;
    double s = 0.0;
    for (;;) {
        s = advance_arrival(s, rng);
        double u = next_weight(rate, s, field.events);
        if (u * coef < env_min) break;
        if (field.events.size() >= event_cap) throw_cap(kappa, event_cap);
        UnitVec3 mark = uniform_sphere_sample(rng);
        field.events.push_back({u, mark});

        env_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < eval_set.size(); ++i) {
            double v = u * vmf_density_dot(mark.dot(eval_set.nodes[i]), kappa, coef);
            if (v > envelope[i]) envelope[i] = v;
            env_min = std::min(env_min, envelope[i]);
        }
    }
    return field;
}

InnovationField simulate_innovation(double kappa, WholeSphere, RngStream& rng,
                                    IntensityMode imode, std::size_t event_cap) {
    const double rate = intensity_rate(imode);
    const double coef = vmf_coefficient(kappa);
    const double inf_factor = kappa < 1e-8 ? coef : coef * std::exp(-2.0 * kappa);

    InnovationField field;
    field.kappa = kappa;
    field.mode = EvalMode::sphere;
    field.rate = rate;

    double env = 0.0; /* U_1 * vmf_inf once the first event lands */
    double s = 0.0;
    for (;;) {
        s = advance_arrival(s, rng);
        double u = next_weight(rate, s, field.events);
        if (u * coef < env) break;
        if (field.events.size() >= event_cap) throw_cap(kappa, event_cap);
        field.events.push_back({u, uniform_sphere_sample(rng)});
        if (field.events.size() == 1) env = u * inf_factor;
    }
    return field;
}

double eval_field(const InnovationField& field, const UnitVec3& x) {
    const double coef = vmf_coefficient(field.kappa);
    double best = 0.0;
    for (const auto& e : field.events) {
        if (e.weight * coef <= best) break; /* sorted: no later event can win */
        double v = e.weight * vmf_density_dot(e.center.dot(x), field.kappa, coef);
        if (v > best) best = v;
    }
    return best;
}

double field_sup(const InnovationField& field) {
    if (field.events.empty())
        throw std::invalid_argument("field_sup: field has no events");
    return field.events.front().weight * vmf_coefficient(field.kappa);
}

double field_inf_bound(const InnovationField& field) {
    if (field.events.empty())
        throw std::invalid_argument("field_inf_bound: field has no events");
    const double coef = vmf_coefficient(field.kappa);
    const double inf_factor =
        field.kappa < 1e-8 ? coef : coef * std::exp(-2.0 * field.kappa);
    return field.events.front().weight * inf_factor;
}

double sup_norm_sample(double kappa, RngStream& rng, IntensityMode imode) {
    double s = advance_arrival(0.0, rng);
    double weight = intensity_rate(imode) / s;
    return weight * vmf_coefficient(kappa);
}

}  // namespace smax
