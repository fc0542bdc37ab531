#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace smax {

/*
 * One verification record, serialized as a single JSON object per line:
 * {"check":..., "pass":..., "params":{...}, "estimate":..., "stderr":...,
 *  "analytic":..., "n":..., "seed":...}.
 */
struct CheckRecord {
    std::string check;
    bool pass = false;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    double estimate = 0.0;
    double stderr_ = 0.0;
    double analytic = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
};

nlohmann::ordered_json to_json(const CheckRecord& r);
std::string to_json_line(const CheckRecord& r);

void write_report(std::ostream& os, const std::vector<CheckRecord>& records);
void write_report_file(const std::string& path, const std::vector<CheckRecord>& records);

bool all_pass(const std::vector<CheckRecord>& records);

/* Failing records only, one JSON line each (the exit-1 stderr payload). */
std::string failing_lines(const std::vector<CheckRecord>& records);

}  // namespace smax
