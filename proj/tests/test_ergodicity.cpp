#include <cmath>

#include "doctest.h"
#include "smax/ergodicity.hpp"

using namespace smax;

namespace {
const UnitVec3 ez(0.0, 0.0, 1.0);
}

TEST_CASE("ergodicity: drift parameters") {
    DriftParams p = make_drift_params(0.5, 0.25, 1.0);
    CHECK(p.beta == 0.5);
    CHECK(p.bigK == pl_closed_form(0.0, 0.5, 0.25, 1.0));

    CHECK(make_drift_params(0.5, 0.5, 1.0).beta ==
          doctest::Approx(0.70710678118654752).epsilon(1e-15));
    CHECK(make_drift_params(0.5, 0.5, 1.0).bigK ==
          doctest::Approx(1.2533141373155003).epsilon(1e-14));
    CHECK(make_drift_params(0.3, 0.25, 1.0).beta ==
          doctest::Approx(0.65975395538644714).epsilon(1e-15));
    CHECK(make_drift_params(0.7, 0.9, 2.3130352854993313).beta ==
          doctest::Approx(0.92890169768537105).epsilon(1e-15));

    CHECK_THROWS_AS(make_drift_params(0.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_drift_params(1.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_drift_params(0.5, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("ergodicity: lyapunov functional") {
    InitialField h = InitialField::vmf_mixture({{2.0, VmfParams(ez, 2.0)}});
    CHECK(lyapunov(h, 0.5) == doctest::Approx(0.80529337317237816).epsilon(1e-14));
    CHECK_THROWS_AS((void)lyapunov(h, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)lyapunov(h, 1.0), std::invalid_argument);
}

TEST_CASE("ergodicity: one-step expectation in closed form") {
    struct Ref {
        double L, gamma, a, sigma, value;
    };
    const Ref refs[] = {
        {0.0, 0.5, 0.5, 1.0, 1.2533141373155003},
        {1.0, 0.5, 0.5, 1.0, 1.3162988648423043},
        {2.0, 0.5, 0.5, 1.0, 1.7537404851404492},
        {1.0, 0.3, 0.25, 1.0, 1.1931463821059654},
        {10.0, 0.7, 0.9, 2.3130352854993313, 9.4964297016218777},
        {1e6, 0.5, 0.5, 1.0, 707106.78118725463},
        {5.0, 0.5, 0.9, 4.0746294414550962, 4.8290588879427413},
        {100.0, 0.5, 0.5, 1.0, 70.717749068617845},
    };
    for (const auto& r : refs) {
        CAPTURE(r.L);
        CAPTURE(r.gamma);
        CHECK(pl_closed_form(r.L, r.gamma, r.a, r.sigma) ==
              doctest::Approx(r.value).epsilon(1e-13));
    }

    SUBCASE("large levels approach the linear drift bound") {
        double beta = make_drift_params(0.5, 0.5, 1.0).beta;
        CHECK(std::fabs(pl_closed_form(1e6, 0.5, 0.5, 1.0) / (beta * 1e6) - 1.0) < 1e-9);
    }

    SUBCASE("domain") {
        CHECK_THROWS_AS((void)pl_closed_form(-1.0, 0.5, 0.5, 1.0), std::invalid_argument);
        CHECK_THROWS_AS((void)pl_closed_form(1.0, 0.0, 0.5, 1.0), std::invalid_argument);
    }
}

TEST_CASE("ergodicity: monte carlo agrees with the closed form") {
    ChainConfig cfg = ChainConfig::direct(0.5, 0.3, ez, 1.0);
    InitialField h = InitialField::constant(1.0);
    const double gamma = 0.3;
    auto [mc, se] = pl_monte_carlo(h, cfg, gamma, 20000, RngStream(1234));
    double closed = pl_closed_form(1.0, gamma, cfg.a, cfg.sigma_z());
    CHECK(std::fabs(mc - closed) <= 4.0 * se);
    CHECK(se > 0.0);
    CHECK_THROWS_AS((void)pl_monte_carlo(h, cfg, gamma, 50, RngStream(1)),
                    std::invalid_argument);
}

TEST_CASE("ergodicity: drift check passes and fills the report") {
    ChainConfig cfg = ChainConfig::direct(0.5, 0.3, ez, 1.0);
    InitialField h = InitialField::constant(1.0);
    DriftReport rep = drift_check(h, cfg, 0.3, 20000, RngStream(1234));
    CHECK(rep.pass);
    CHECK(rep.L_h == 1.0);
    CHECK(rep.n == 20000);
    CHECK(rep.seed == 1234);
    CHECK(rep.pl_mc <= rep.rhs + 3.0 * rep.mc_stderr);
    CHECK(rep.pl_closed == pl_closed_form(1.0, 0.3, cfg.a, cfg.sigma_z()));

    SUBCASE("plug-in innovations have no closed form to check against") {
        ChainConfig custom = cfg;
        custom.innovation = InnovationSpec::custom_of([](RngStream& r) {
            struct One : CustomField {
                double eval(const UnitVec3&) const override { return 1.0; }
                double sup_bound() const override { return 1.0; }
            };
            (void)r;
            return std::make_shared<const One>();
        });
        CHECK_THROWS_AS((void)drift_check(h, custom, 0.3, 200, RngStream(1)),
                        std::invalid_argument);
    }
}

TEST_CASE("ergodicity: analytic minorization mass") {
    const double rate = kFourPi;
    CHECK(minorization_alpha(1.0, 0.5, 0.0, rate) ==
          doctest::Approx(0.63212055882855768).epsilon(1e-15));
    CHECK(minorization_alpha(0.5, 0.5, 1.0, rate) ==
          doctest::Approx(0.46531130021499713).epsilon(1e-14));
    CHECK(minorization_alpha(1.0, 0.5, 1.0, rate) ==
          doctest::Approx(0.26877588949419695).epsilon(1e-14));
    CHECK(minorization_alpha(5.0, 0.5, 1.0, rate) ==
          doctest::Approx(0.060687502641386484).epsilon(1e-14));

    SUBCASE("monotone in the set radius and the concentration") {
        double prev = 1.0;
        for (double R : {0.1, 0.5, 1.0, 5.0, 50.0}) {
            double alpha = minorization_alpha(R, 0.5, 1.0, rate);
            CHECK(alpha < prev);
            prev = alpha;
        }
        prev = 1.0;
        for (double kappa : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            double alpha = minorization_alpha(1.0, 0.5, kappa, rate);
            CHECK(alpha < prev);
            prev = alpha;
        }
        CHECK(minorization_alpha(1e12, 0.5, 1.0, rate) < 1e-10);
        CHECK(minorization_alpha(1e12, 0.5, 1.0, rate) > 0.0);
    }

    SUBCASE("domain") {
        CHECK_THROWS_AS((void)minorization_alpha(0.0, 0.5, 1.0, rate),
                        std::invalid_argument);
        CHECK_THROWS_AS((void)minorization_alpha(1.0, 1.0, 1.0, rate),
                        std::invalid_argument);
        CHECK_THROWS_AS((void)minorization_alpha(1.0, 0.5, -1.0, rate),
                        std::invalid_argument);
    }
}

TEST_CASE("ergodicity: regeneration is certain when persistence vanishes") {
    /* With a ~ 0 the innovation dwarfs any bounded pair of starts, so the
     * one-step coupling event has probability one. */
    ChainConfig cfg = ChainConfig::direct(1e-6, 0.3, ez, 1.0);
    CouplingEstimate est =
        empirical_coupling_prob(InitialField::constant(2.0), InitialField::constant(1.0),
                                cfg, 1000, RngStream(50));
    CHECK(est.fraction == 1.0);
    CHECK(est.flagged.size() == 1000);
    for (auto f : est.flagged) CHECK(f == 1);
}

TEST_CASE("ergodicity: convergence diagnostics") {
    SUBCASE("probe choice is irrelevant for uniform innovations") {
        ChainConfig cfg = ChainConfig::direct(0.5, 0.3, ez, 0.0);
        InitialField h0 = InitialField::constant(100.0);
        ConvergenceReport r1 = convergence_rate(cfg, h0, ez, 6, 1000, RngStream(99));
        ConvergenceReport r2 = convergence_rate(cfg, h0, UnitVec3(0.7, -0.1, 0.7), 6,
                                                1000, RngStream(99));
        REQUIRE(r1.distances.size() == 7);
        REQUIRE(r2.distances.size() == 7);
        for (std::size_t t = 0; t < r1.distances.size(); ++t)
            CHECK(r1.distances[t] == r2.distances[t]);
        CHECK(r1.distances[0] == doctest::Approx(0.99004983374916811).epsilon(1e-12));
        CHECK(r1.noise_floor == doctest::Approx(1.63 / std::sqrt(1000.0)).epsilon(1e-15));
        CHECK(r1.slope_threshold == doctest::Approx(std::log(0.5) + 0.1).epsilon(1e-15));
    }

    SUBCASE("preconditions") {
        ChainConfig cfg = ChainConfig::direct(0.5, 0.3, ez, 0.0);
        InitialField h0 = InitialField::constant(100.0);
        CHECK_THROWS_AS((void)convergence_rate(cfg, h0, ez, 4, 1000, RngStream(1)),
                        std::invalid_argument);
        CHECK_THROWS_AS((void)convergence_rate(cfg, h0, ez, 6, 999, RngStream(1)),
                        std::invalid_argument);
    }
}
