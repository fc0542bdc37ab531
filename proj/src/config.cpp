#include "smax/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace smax {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("config: " + msg); }

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

/* Strips a trailing comment, respecting double-quoted strings. */
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

class KeyBag {
public:
    void insert(const std::string& path, const std::string& value, bool replace) {
        auto it = kv_.find(path);
        if (it != kv_.end() && !replace) fail("duplicate key \"" + path + "\"");
        kv_[path] = value;
    }

    bool has(const std::string& path) const { return kv_.count(path) != 0; }

    std::optional<std::string> take(const std::string& path) {
        auto it = kv_.find(path);
        if (it == kv_.end()) return std::nullopt;
        std::string v = it->second;
        kv_.erase(it);
        return v;
    }

    void expect_empty() const {
        if (!kv_.empty()) fail("unknown key \"" + kv_.begin()->first + "\"");
    }

private:
    std::map<std::string, std::string> kv_;
};

double as_double(const std::string& path, const std::string& raw) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(raw, &used);
    } catch (const std::exception&) {
        fail("key \"" + path + "\": not a number: " + raw);
    }
    if (used != raw.size()) fail("key \"" + path + "\": not a number: " + raw);
    return v;
}

std::uint64_t as_u64(const std::string& path, const std::string& raw) {
    if (!raw.empty() && raw[0] == '-') fail("key \"" + path + "\": must be non-negative");
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(raw, &used);
    } catch (const std::exception&) {
        fail("key \"" + path + "\": not an unsigned integer: " + raw);
    }
    if (used != raw.size()) fail("key \"" + path + "\": not an unsigned integer: " + raw);
    return v;
}

long as_long(const std::string& path, const std::string& raw) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(raw, &used);
    } catch (const std::exception&) {
        fail("key \"" + path + "\": not an integer: " + raw);
    }
    if (used != raw.size()) fail("key \"" + path + "\": not an integer: " + raw);
    return v;
}

std::string as_word(const std::string& path, const std::string& raw) {
    std::string s = raw;
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    if (s.empty()) fail("key \"" + path + "\": empty string");
    return s;
}

UnitVec3 as_axis(const std::string& path, const std::string& raw) {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
        fail("key \"" + path + "\": expected [x, y, z]");
    std::string body = raw.substr(1, raw.size() - 2);
    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= body.size()) {
        std::size_t pos = body.find(',', start);
        std::string piece =
            trim(pos == std::string::npos ? body.substr(start) : body.substr(start, pos - start));
        if (piece.empty()) fail("key \"" + path + "\": expected [x, y, z]");
        vals.push_back(as_double(path, piece));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (vals.size() != 3) fail("key \"" + path + "\": expected exactly 3 components");
    try {
        return UnitVec3(vals[0], vals[1], vals[2]);
    } catch (const std::exception& e) {
        fail("key \"" + path + "\": " + e.what());
    }
}

KeyBag parse_raw(const std::string& text) {
    KeyBag bag;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "model" && section != "sim" && section != "verify")
                fail("unknown section \"" + section + "\"");
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            fail("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty()) fail("key \"" + key + "\" appears before any section");
        bag.insert(section + "." + key, value, false);
    }
    return bag;
}

void apply_overrides(KeyBag& bag, const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        std::size_t eq = ov.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= ov.size())
            fail("override must look like section.key=value: " + ov);
        std::string key = trim(ov.substr(0, eq));
        std::string value = trim(ov.substr(eq + 1));
        if (key.find('.') == std::string::npos)
            fail("override key must be section-qualified: " + ov);
        bag.insert(key, value, true);
    }
}

void check_range(bool ok, const std::string& path, const std::string& what) {
    if (!ok) fail("key \"" + path + "\": " + what);
}

}  // namespace

ChainConfig RunConfig::chain() const {
    ChainConfig c;
    switch (a_provenance) {
        case AProvenance::direct:
            c = ChainConfig::direct(a, theta, axis, kappa, intensity_mode);
            break;
        case AProvenance::continuous:
            c = ChainConfig::continuous(nu, step, theta, axis, kappa, intensity_mode);
            break;
        case AProvenance::discrete:
            c = ChainConfig::discrete(a, theta, axis, kappa, intensity_mode);
            break;
    }
    return c;
}

RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides) {
    KeyBag bag = parse_raw(text);
    apply_overrides(bag, overrides);

    RunConfig cfg;

    const bool has_a = bag.has("model.a");
    const bool has_nu = bag.has("model.nu") || bag.has("model.step");
    const bool has_phi = bag.has("model.phi");
    if (static_cast<int>(has_a) + static_cast<int>(has_nu) + static_cast<int>(has_phi) != 1)
        fail("exactly one of model.a, model.(nu, step), model.phi must be given");

    if (has_a) {
        cfg.a = as_double("model.a", *bag.take("model.a"));
        cfg.a_provenance = AProvenance::direct;
        check_range(cfg.a > 0.0 && cfg.a < 1.0, "model.a", "must lie strictly in (0,1)");
    } else if (has_nu) {
        auto nu_raw = bag.take("model.nu");
        if (!nu_raw) fail("model.step given without model.nu");
        cfg.nu = as_double("model.nu", *nu_raw);
        check_range(cfg.nu > 0.0 && std::isfinite(cfg.nu), "model.nu", "must be finite and > 0");
        if (auto step_raw = bag.take("model.step")) {
            cfg.step = as_double("model.step", *step_raw);
            check_range(cfg.step > 0.0 && std::isfinite(cfg.step), "model.step",
                        "must be finite and > 0");
        }
        cfg.a = std::exp(-cfg.nu * cfg.step);
        cfg.a_provenance = AProvenance::continuous;
        check_range(cfg.a > 0.0 && cfg.a < 1.0, "model.nu",
                    "exp(-nu*step) must lie strictly in (0,1)");
    } else {
        cfg.a = as_double("model.phi", *bag.take("model.phi"));
        cfg.a_provenance = AProvenance::discrete;
        check_range(cfg.a > 0.0 && cfg.a < 1.0, "model.phi", "must lie strictly in (0,1)");
    }

    if (auto v = bag.take("model.theta")) cfg.theta = as_double("model.theta", *v);
    else fail("missing required key \"model.theta\"");
    check_range(std::isfinite(cfg.theta), "model.theta", "must be finite");

    if (auto v = bag.take("model.axis")) cfg.axis = as_axis("model.axis", *v);
    else fail("missing required key \"model.axis\"");

    if (auto v = bag.take("model.kappa")) cfg.kappa = as_double("model.kappa", *v);
    else fail("missing required key \"model.kappa\"");
    check_range(cfg.kappa >= 0.0 && cfg.kappa <= kDefaultKappaMax, "model.kappa",
                "must lie in [0, 10]");

    if (auto v = bag.take("model.intensity_mode")) {
        std::string w = as_word("model.intensity_mode", *v);
        if (w == "exact") cfg.intensity_mode = IntensityMode::exact;
        else if (w == "unit") cfg.intensity_mode = IntensityMode::unit;
        else fail("key \"model.intensity_mode\": must be \"exact\" or \"unit\"");
    }

    if (auto v = bag.take("sim.seed")) cfg.seed = as_u64("sim.seed", *v);
    else fail("missing required key \"sim.seed\"");

    if (auto v = bag.take("sim.grid_n")) {
        long n = as_long("sim.grid_n", *v);
        check_range(n >= 1, "sim.grid_n", "must be >= 1");
        cfg.grid_n = static_cast<std::size_t>(n);
    }

    if (auto v = bag.take("sim.eval_mode")) {
        std::string w = as_word("sim.eval_mode", *v);
        if (w == "grid") cfg.eval_mode = EvalMode::grid;
        else if (w == "sphere") cfg.eval_mode = EvalMode::sphere;
        else fail("key \"sim.eval_mode\": must be \"grid\" or \"sphere\"");
    }

    if (auto v = bag.take("verify.gamma")) cfg.gamma = as_double("verify.gamma", *v);
    check_range(cfg.gamma > 0.0 && cfg.gamma < 1.0, "verify.gamma",
                "must lie strictly in (0,1)");

    if (auto v = bag.take("verify.R")) cfg.R = as_double("verify.R", *v);
    check_range(cfg.R > 0.0 && std::isfinite(cfg.R), "verify.R", "must be finite and > 0");

    if (auto v = bag.take("verify.replications")) {
        long n = as_long("verify.replications", *v);
        check_range(n >= 100, "verify.replications", "must be >= 100");
        cfg.replications = static_cast<std::size_t>(n);
    }

    if (auto v = bag.take("verify.epsilon")) cfg.epsilon = as_double("verify.epsilon", *v);
    check_range(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, "verify.epsilon",
                "must lie strictly in (0,1)");

    if (auto v = bag.take("verify.delta")) cfg.delta = as_double("verify.delta", *v);
    check_range(cfg.delta > 0.0 && cfg.delta < 1.0, "verify.delta",
                "must lie strictly in (0,1)");

    if (auto v = bag.take("verify.horizon")) {
        long h = as_long("verify.horizon", *v);
        check_range(h >= 1, "verify.horizon", "must be >= 1");
        cfg.horizon = static_cast<int>(h);
    }

    bag.expect_empty();
    cfg.chain().validate();
    return cfg;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream is(path);
    if (!is) fail("cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), overrides);
}

}  // namespace smax
