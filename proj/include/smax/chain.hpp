#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "smax/spectral.hpp"

namespace smax {

enum class AProvenance { direct, continuous, discrete };

/*
 * Chain parameters. a is the one-step persistence; under continuous-time
 * provenance a = exp(-nu * step) and arbitrary substeps are allowed, under
 * discrete provenance a = phi and only unit steps make sense.
 */
struct ChainConfig {
    double a = 0.5;
    AProvenance a_provenance = AProvenance::direct;
    double nu = 0.0;      /* continuous provenance only */
    double step_len = 1.0; /* continuous provenance only */
    double theta = 0.0;
    UnitVec3 axis{0.0, 0.0, 1.0};
    double kappa = 0.0;
    IntensityMode intensity = IntensityMode::exact;
    InnovationSpec innovation = InnovationSpec::vmf();
    double kappa_max = kDefaultKappaMax;
    std::size_t event_cap = kDefaultEventCap;

    static ChainConfig direct(double a, double theta, const UnitVec3& axis, double kappa,
                              IntensityMode imode = IntensityMode::exact);
    static ChainConfig continuous(double nu, double step_len, double theta,
                                  const UnitVec3& axis, double kappa,
                                  IntensityMode imode = IntensityMode::exact);
    static ChainConfig discrete(double phi, double theta, const UnitVec3& axis,
                                double kappa, IntensityMode imode = IntensityMode::exact);

    /* Frechet scale of ||Z||_inf under the active intensity mode. */
    double sigma_z() const { return intensity_rate(intensity) * vmf_coefficient(kappa); }
    /* Frechet scale of the one-point margins of Z (and of the stationary chain). */
    double sigma_point() const { return pointwise_scale(intensity); }

    void validate() const;
};

/*
 * Initial condition h in C(S^2, (0,inf)), restricted to kinds whose exact
 * supremum is available in closed form. Mixtures combine components by max,
 * so sup commutes with the combination.
 */
class InitialField {
public:
    enum class Kind { constant, event_set, vmf_mixture };

    static InitialField constant(double c);
    static InitialField event_set(InnovationField field);
    static InitialField vmf_mixture(std::vector<std::pair<double, VmfParams>> components);

    Kind kind() const { return kind_; }
    double eval(const UnitVec3& x) const;
    double sup() const;

private:
    InitialField() = default;
    Kind kind_ = Kind::constant;
    double c_ = 1.0;
    InnovationField field_;
    std::vector<std::pair<double, VmfParams>> mixture_;
};

/* A plug-in innovation folded into the state: scale * field(R_{angle,u} x). */
struct CustomTerm {
    double scale = 1.0;
    double angle = 0.0;
    Rotation rotation; /* cached rodrigues_matrix(angle, axis) */
    std::shared_ptr<const CustomField> field;
};

/*
 * The chain X(t,.) as an exactly evaluable object:
 *
 *   X(t,x) = max( scale * h(R_{angle,u} x),
 *                 max_i weight_i * f(x; center_i, kappa),
 *                 max_k custom_k )
 *
 * Event centers absorb rotations through f(Rx; mu) = f(x; R^T mu), so a step
 * rescales weights, counter-rotates centers, and merges fresh events.
 */
struct ChainState {
    ChainConfig config;
    int t = 0;
    double elapsed = 0.0;            /* total substep time consumed */
    double scale = 1.0;              /* a^elapsed while the initial term lives,
                                      * recomputed in closed form so equal
                                      * elapsed times give equal atoms */
    double initial_angle = 0.0;      /* theta * elapsed */
    Rotation initial_rotation;       /* cached matrix for initial_angle */
    std::shared_ptr<const InitialField> initial;
    std::vector<SpectralEvent> events; /* sorted by descending weight */
    std::vector<CustomTerm> custom;
};

ChainState make_initial_state(const InitialField& h, const ChainConfig& config);

double eval_state(const ChainState& state, const UnitVec3& x);

/* Exact sup over S^2 (upper bound if custom plug-in terms are present). */
double state_sup(const ChainState& state);

/*
 * One transition: x -> max{ a X(t, R_{theta,u} x), (1-a) Z(t+1, x) }.
 * The innovation is simulated sphere-exact so that the state stays exactly
 * evaluable at arbitrary (rotated) points for the rest of its life.
 * do_prune = false keeps every term; simulation draws are unaffected, which
 * is what makes pruned/unpruned twin runs comparable under matched seeds.
 */
ChainState step(const ChainState& state, RngStream& rng, bool do_prune = true);

/* Arbitrary substep under continuous-time provenance: a^s, theta*s, 1-a^s. */
ChainState step_s(const ChainState& state, double s, RngStream& rng);

/* Deterministic transition with a caller-supplied innovation realization;
 * the building block for synchronous coupling and for stubbed tests. */
ChainState step_with_innovation(const ChainState& state, const InnovationField& z,
                                bool do_prune = true);
ChainState step_with_custom(const ChainState& state,
                            std::shared_ptr<const CustomField> z);

/*
 * Drop terms that are dominated pointwise: event e goes when
 * weight_e * vmf_sup < top_weight * vmf_inf, the initial and custom terms
 * when their sup bound falls below the same envelope. Evaluation anywhere
 * on S^2 is unchanged.
 */
ChainState prune(ChainState state);

struct StationaryParams {
    double epsilon = 1e-3;
    double delta = 1e-3;
    int J = -1; /* derived from (epsilon, delta) when negative */
};

/* Smallest depth with sigma_Z a^{J+1} / epsilon <= delta (union bound on the
 * discarded tail), clamped to >= 0. */
int truncation_depth(double epsilon, double delta, double sigma_z, double a);

/*
 * Truncated stationary draw max_{j<=J} a^j (1-a) Z_j(R_{theta j,u} x) as a
 * state with no initial term. The discarded tail exceeds epsilon anywhere
 * with probability at most delta.
 */
ChainState stationary_draw(const ChainConfig& config, const StationaryParams& sp,
                           RngStream& rng);

/*
 * Synchronous coupling: two chains driven by identical innovations. Returns
 * d_t = max over eval nodes of |X1(t,x) - X2(t,x)| for t = 0..T; the shared
 * innovation makes d_t <= a^t ||h1 - h2||_inf deterministically.
 */
std::vector<double> coupled_trajectory(const InitialField& h1, const InitialField& h2,
                                       const ChainConfig& config, int horizon,
                                       const SphericalGrid& eval_set, RngStream& rng);

}  // namespace smax
