#include "smax/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smax {

namespace {

double inf_factor(double kappa, double coef) {
    return kappa < 1e-8 ? coef : coef * std::exp(-2.0 * kappa);
}

void check_positive_finite(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

}  // namespace

/* ---------------------------------------------------------------- config */

ChainConfig ChainConfig::direct(double a, double theta, const UnitVec3& axis,
                                double kappa, IntensityMode imode) {
    ChainConfig c;
    c.a = a;
    c.a_provenance = AProvenance::direct;
    c.theta = theta;
    c.axis = axis;
    c.kappa = kappa;
    c.intensity = imode;
    c.validate();
    return c;
}

ChainConfig ChainConfig::continuous(double nu, double step_len, double theta,
                                    const UnitVec3& axis, double kappa,
                                    IntensityMode imode) {
    check_positive_finite(nu, "ChainConfig: nu");
    check_positive_finite(step_len, "ChainConfig: step_len");
    ChainConfig c;
    c.a = std::exp(-nu * step_len);
    c.a_provenance = AProvenance::continuous;
    c.nu = nu;
    c.step_len = step_len;
    c.theta = theta;
    c.axis = axis;
    c.kappa = kappa;
    c.intensity = imode;
    c.validate();
    return c;
}

ChainConfig ChainConfig::discrete(double phi, double theta, const UnitVec3& axis,
                                  double kappa, IntensityMode imode) {
    ChainConfig c;
    c.a = phi;
    c.a_provenance = AProvenance::discrete;
    c.theta = theta;
    c.axis = axis;
    c.kappa = kappa;
    c.intensity = imode;
    c.validate();
    return c;
}

void ChainConfig::validate() const {
    if (!(a > 0.0) || !(a < 1.0))
        throw std::invalid_argument("ChainConfig: a must lie in (0,1)");
    if (!std::isfinite(theta))
        throw std::invalid_argument("ChainConfig: theta must be finite");
    if (!(kappa >= 0.0) || kappa > kappa_max)
        throw std::invalid_argument("ChainConfig: kappa out of range [0, kappa_max]");
    if (a_provenance == AProvenance::continuous &&
        std::fabs(a - std::exp(-nu * step_len)) > 1e-12)
        throw std::invalid_argument("ChainConfig: a inconsistent with exp(-nu*step)");
}

/* --------------------------------------------------------- initial field */

InitialField InitialField::constant(double c) {
    check_positive_finite(c, "InitialField: constant level");
    InitialField h;
    h.kind_ = Kind::constant;
    h.c_ = c;
    return h;
}

InitialField InitialField::event_set(InnovationField field) {
    if (field.events.empty())
        throw std::invalid_argument("InitialField: event set must be non-empty");
    InitialField h;
    h.kind_ = Kind::event_set;
    h.field_ = std::move(field);
    return h;
}

InitialField InitialField::vmf_mixture(
    std::vector<std::pair<double, VmfParams>> components) {
    if (components.empty())
        throw std::invalid_argument("InitialField: mixture must be non-empty");
    for (const auto& [w, p] : components) {
        (void)p;
        check_positive_finite(w, "InitialField: mixture weight");
    }
    InitialField h;
    h.kind_ = Kind::vmf_mixture;
    h.mixture_ = std::move(components);
    return h;
}

double InitialField::eval(const UnitVec3& x) const {
    switch (kind_) {
        case Kind::constant:
            return c_;
        case Kind::event_set:
            return eval_field(field_, x);
        case Kind::vmf_mixture: {
            double best = 0.0;
            for (const auto& [w, p] : mixture_) best = std::max(best, w * vmf_density(x, p));
            return best;
        }
    }
    return c_;
}

double InitialField::sup() const {
    switch (kind_) {
        case Kind::constant:
            return c_;
        case Kind::event_set:
            return field_sup(field_);
        case Kind::vmf_mixture: {
            double best = 0.0;
            for (const auto& [w, p] : mixture_) best = std::max(best, w * vmf_sup(p));
            return best;
        }
    }
    return c_;
}

/* ----------------------------------------------------------------- state */

ChainState make_initial_state(const InitialField& h, const ChainConfig& config) {
    config.validate();
    ChainState st;
    st.config = config;
    st.initial = std::make_shared<InitialField>(h);
    st.initial_rotation = rodrigues_matrix(0.0, config.axis);
    return st;
}

double eval_state(const ChainState& state, const UnitVec3& x) {
    double best = 0.0;
    if (state.initial) {
        best = state.scale * state.initial->eval(state.initial_rotation.apply(x));
    }
    for (const auto& term : state.custom) {
        if (term.scale * term.field->sup_bound() <= best) continue;
        best = std::max(best, term.scale * term.field->eval(term.rotation.apply(x)));
    }
    const double coef = vmf_coefficient(state.config.kappa);
    for (const auto& e : state.events) {
        if (e.weight * coef <= best) break; /* sorted: later events are smaller */
        double v = e.weight * vmf_density_dot(e.center.dot(x), state.config.kappa, coef);
        if (v > best) best = v;
    }
    return best;
}

double state_sup(const ChainState& state) {
    double best = 0.0;
    if (state.initial) best = state.scale * state.initial->sup();
    if (!state.events.empty())
        best = std::max(best,
                        state.events.front().weight * vmf_coefficient(state.config.kappa));
    for (const auto& term : state.custom)
        best = std::max(best, term.scale * term.field->sup_bound());
    return best;
}

ChainState prune(ChainState state) {
    if (state.events.empty()) return state;
    const double coef = vmf_coefficient(state.config.kappa);
    const double envelope = state.events.front().weight * inf_factor(state.config.kappa, coef);

    /* weight * vmf_sup is decreasing along the sorted list: one cutoff. */
    std::size_t keep = state.events.size();
    while (keep > 1 && state.events[keep - 1].weight * coef < envelope) --keep;
    state.events.resize(keep);

    if (state.initial && state.scale * state.initial->sup() < envelope) {
        state.initial.reset();
        state.scale = 0.0;
    }
    std::erase_if(state.custom, [&](const CustomTerm& term) {
        return term.scale * term.field->sup_bound() < envelope;
    });
    return state;
}

/* ----------------------------------------------------------------- steps */

namespace {

/* Decay every term by a_s and fold one increment of rotation into them.
 * The initial term's scale and angle come from the accumulated elapsed time
 * in closed form, not from repeated products: that way two substeps of s/2
 * and one substep of s put the deterministic atom a^s h(...) on the same
 * representable number, which distributional comparisons rely on. */
ChainState decay_and_rotate(const ChainState& state, double s, double a_s,
                            double angle_inc) {
    ChainState out;
    out.config = state.config;
    out.t = state.t + 1;
    out.elapsed = state.elapsed + s;
    out.initial = state.initial;
    out.scale = state.initial ? std::pow(state.config.a, out.elapsed) : 0.0;
    out.initial_angle = state.config.theta * out.elapsed;
    out.initial_rotation = rodrigues_matrix(out.initial_angle, state.config.axis);

    Rotation counter = rodrigues_matrix(-angle_inc, state.config.axis);
    out.events.reserve(state.events.size());
    for (const auto& e : state.events)
        out.events.push_back({e.weight * a_s, counter.apply(e.center)});

    out.custom.reserve(state.custom.size());
    for (const auto& term : state.custom) {
        CustomTerm c = term;
        c.scale *= a_s;
        c.angle += angle_inc;
        c.rotation = rodrigues_matrix(c.angle, state.config.axis);
        out.custom.push_back(std::move(c));
    }
    return out;
}

void merge_scaled_events(ChainState& st, const InnovationField& z, double innov_scale) {
    std::vector<SpectralEvent> fresh;
    fresh.reserve(z.events.size());
    for (const auto& e : z.events) fresh.push_back({innov_scale * e.weight, e.center});

    std::vector<SpectralEvent> merged;
    merged.reserve(st.events.size() + fresh.size());
    std::merge(st.events.begin(), st.events.end(), fresh.begin(), fresh.end(),
               std::back_inserter(merged),
               [](const SpectralEvent& a, const SpectralEvent& b) {
                   return a.weight > b.weight;
               });
    st.events = std::move(merged);
}

ChainState step_core(const ChainState& state, double s, RngStream& rng, bool do_prune) {
    const double a_s = s == 1.0 ? state.config.a : std::pow(state.config.a, s);
    ChainState out = decay_and_rotate(state, s, a_s, state.config.theta * s);
    const double innov_scale = 1.0 - a_s;
    if (state.config.innovation.kind == InnovationSpec::Kind::vmf_maxstable) {
        InnovationField z =
            simulate_innovation(state.config.kappa, whole_sphere, rng,
                                state.config.intensity, state.config.event_cap);
        merge_scaled_events(out, z, innov_scale);
    } else {
        CustomTerm term;
        term.scale = innov_scale;
        term.rotation = rodrigues_matrix(0.0, state.config.axis);
        term.field = state.config.innovation.make_custom(rng);
        out.custom.push_back(std::move(term));
    }
    return do_prune ? prune(std::move(out)) : out;
}

}  // namespace

ChainState step(const ChainState& state, RngStream& rng, bool do_prune) {
    return step_core(state, 1.0, rng, do_prune);
}

ChainState step_s(const ChainState& state, double s, RngStream& rng) {
    if (state.config.a_provenance != AProvenance::continuous)
        throw std::invalid_argument("step_s: requires continuous-time provenance");
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("step_s: s must be positive and finite");
    return step_core(state, s, rng, true);
}

ChainState step_with_innovation(const ChainState& state, const InnovationField& z,
                                bool do_prune) {
    if (z.kappa != state.config.kappa)
        throw std::invalid_argument("step_with_innovation: innovation kappa mismatch");
    ChainState out = decay_and_rotate(state, 1.0, state.config.a, state.config.theta);
    merge_scaled_events(out, z, 1.0 - state.config.a);
    return do_prune ? prune(std::move(out)) : out;
}

ChainState step_with_custom(const ChainState& state,
                            std::shared_ptr<const CustomField> z) {
    ChainState out = decay_and_rotate(state, 1.0, state.config.a, state.config.theta);
    CustomTerm term;
    term.scale = 1.0 - state.config.a;
    term.rotation = rodrigues_matrix(0.0, state.config.axis);
    term.field = std::move(z);
    out.custom.push_back(std::move(term));
    return prune(std::move(out));
}

/* ------------------------------------------------------------ stationary */

int truncation_depth(double epsilon, double delta, double sigma_z, double a) {
    if (!(epsilon > 0.0) || !(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("truncation_depth: need epsilon > 0, delta in (0,1)");
    if (!(a > 0.0) || !(a < 1.0))
        throw std::invalid_argument("truncation_depth: need a in (0,1)");
    double j = std::ceil(std::log(epsilon * delta / sigma_z) / std::log(a)) - 1.0;
    return j < 0.0 ? 0 : static_cast<int>(j);
}

ChainState stationary_draw(const ChainConfig& config, const StationaryParams& sp,
                           RngStream& rng) {
    config.validate();
    const int J = sp.J >= 0
                      ? sp.J
                      : truncation_depth(sp.epsilon, sp.delta, config.sigma_z(), config.a);

    ChainState st;
    st.config = config;
    st.initial.reset();
    st.scale = 0.0;
    st.initial_rotation = rodrigues_matrix(0.0, config.axis);

    if (config.innovation.kind == InnovationSpec::Kind::custom) {
        for (int j = 0; j <= J; ++j) {
            RngStream stream = rng.derive(static_cast<std::uint64_t>(j));
            CustomTerm term;
            term.scale = std::pow(config.a, j) * (1.0 - config.a);
            term.angle = config.theta * j;
            term.rotation = rodrigues_matrix(term.angle, config.axis);
            term.field = config.innovation.make_custom(stream);
            st.custom.push_back(std::move(term));
        }
        return prune(std::move(st));
    }

    const double rate = intensity_rate(config.intensity);
    const double coef = vmf_coefficient(config.kappa);
    const double inf_fac = inf_factor(config.kappa, coef);
    double envelope = 0.0; /* best kept weight so far, times vmf_inf */

    for (int j = 0; j <= J; ++j) {
        RngStream stream = rng.derive(static_cast<std::uint64_t>(j));
        const double fac = std::pow(config.a, j) * (1.0 - config.a);
        Rotation counter = rodrigues_matrix(-config.theta * j, config.axis);

        double s = detail::advance_arrival(0.0, stream);
        double w = fac * (rate / s);
        /* Even this innovation's largest atom is dominated by what we
         * already hold: skip it after a single draw. */
        if (w * coef < envelope) continue;

        std::size_t count = 0;
        double own_env = 0.0;
        for (;;) {
            if (w * coef < std::max(envelope, own_env)) break;
            if (++count > config.event_cap)
                throw std::runtime_error("stationary_draw: event cap exceeded");
            UnitVec3 mark = uniform_sphere_sample(stream);
            st.events.push_back({w, counter.apply(mark)});
            if (count == 1) {
                own_env = w * inf_fac;
                envelope = std::max(envelope, own_env);
            }
            s = detail::advance_arrival(s, stream);
            w = fac * (rate / s);
        }
    }

    std::stable_sort(st.events.begin(), st.events.end(),
                     [](const SpectralEvent& a, const SpectralEvent& b) {
                         return a.weight > b.weight;
                     });
    return prune(std::move(st));
}

/* -------------------------------------------------------------- coupling */

std::vector<double> coupled_trajectory(const InitialField& h1, const InitialField& h2,
                                       const ChainConfig& config, int horizon,
                                       const SphericalGrid& eval_set, RngStream& rng) {
    if (horizon < 1) throw std::invalid_argument("coupled_trajectory: horizon must be >= 1");
    ChainState s1 = make_initial_state(h1, config);
    ChainState s2 = make_initial_state(h2, config);

    auto grid_distance = [&](const ChainState& a, const ChainState& b) {
        double d = 0.0;
        for (const auto& node : eval_set.nodes)
            d = std::max(d, std::fabs(eval_state(a, node) - eval_state(b, node)));
        return d;
    };

    std::vector<double> distances;
    distances.reserve(static_cast<std::size_t>(horizon) + 1);
    distances.push_back(grid_distance(s1, s2));
    for (int t = 1; t <= horizon; ++t) {
        if (config.innovation.kind == InnovationSpec::Kind::vmf_maxstable) {
            InnovationField z = simulate_innovation(config.kappa, whole_sphere, rng,
                                                    config.intensity, config.event_cap);
            s1 = step_with_innovation(s1, z);
            s2 = step_with_innovation(s2, z);
        } else {
            auto field = config.innovation.make_custom(rng);
            s1 = step_with_custom(s1, field);
            s2 = step_with_custom(s2, field);
        }
        distances.push_back(grid_distance(s1, s2));
    }
    return distances;
}

}  // namespace smax
