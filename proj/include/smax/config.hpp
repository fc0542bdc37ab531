#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smax/chain.hpp"

namespace smax {

/*
 * Run configuration, parsed from a TOML-style document with sections
 * [model], [sim], [verify]. Exactly one of model.a, model.(nu,step),
 * model.phi selects the persistence; unknown keys are errors.
 */
struct RunConfig {
    double a = 0.5;
    AProvenance a_provenance = AProvenance::direct;
    double nu = 0.0;
    double step = 1.0;
    double theta = 0.0;
    UnitVec3 axis{0.0, 0.0, 1.0};
    double kappa = 0.0;
    IntensityMode intensity_mode = IntensityMode::exact;

    std::uint64_t seed = 0;
    std::size_t grid_n = 4096;
    EvalMode eval_mode = EvalMode::grid;

    double gamma = 0.5;
    double R = 1.0;
    std::size_t replications = 10000;
    double epsilon = 1e-3;
    double delta = 1e-3;
    int horizon = 12;

    ChainConfig chain() const;
};

/* overrides are "section.key=value" strings applied before validation. */
RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides = {});
RunConfig parse_config(const std::string& path,
                       const std::vector<std::string>& overrides = {});

}  // namespace smax
