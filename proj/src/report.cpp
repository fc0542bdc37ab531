#include "smax/report.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace smax {

nlohmann::ordered_json to_json(const CheckRecord& r) {
    nlohmann::ordered_json j;
    j["check"] = r.check;
    j["pass"] = r.pass;
    j["params"] = r.params;
    j["estimate"] = r.estimate;
    j["stderr"] = r.stderr_;
    j["analytic"] = r.analytic;
    j["n"] = r.n;
    j["seed"] = r.seed;
    return j;
}

std::string to_json_line(const CheckRecord& r) { return to_json(r).dump(); }

void write_report(std::ostream& os, const std::vector<CheckRecord>& records) {
    for (const auto& r : records) os << to_json_line(r) << '\n';
}

void write_report_file(const std::string& path, const std::vector<CheckRecord>& records) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open report file: " + path);
    write_report(os, records);
}

bool all_pass(const std::vector<CheckRecord>& records) {
    for (const auto& r : records)
        if (!r.pass) return false;
    return true;
}

std::string failing_lines(const std::vector<CheckRecord>& records) {
    std::string out;
    for (const auto& r : records)
        if (!r.pass) {
            out += to_json_line(r);
            out += '\n';
        }
    return out;
}

}  // namespace smax
