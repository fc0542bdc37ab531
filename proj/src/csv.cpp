#include "smax/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace smax {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

template <typename Writer>
void to_file(const std::string& path, Writer w) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    w(os);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& s, const char* what) {
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("malformed ") + what + " field: " + s);
    }
    if (used != s.size())
        throw std::runtime_error(std::string("trailing junk in ") + what + " field: " + s);
    return v;
}

}  // namespace

void write_event_csv(std::ostream& os, const std::vector<SpectralEvent>& events) {
    os << "weight,mu_x,mu_y,mu_z\n";
    for (const auto& e : events)
        os << fmt17(e.weight) << ',' << fmt17(e.center.x()) << ',' << fmt17(e.center.y())
           << ',' << fmt17(e.center.z()) << '\n';
}

void write_event_csv_file(const std::string& path, const std::vector<SpectralEvent>& events) {
    to_file(path, [&](std::ostream& os) { write_event_csv(os, events); });
}

std::vector<SpectralEvent> read_event_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "weight,mu_x,mu_y,mu_z")
        throw std::runtime_error("event CSV: missing or wrong header");
    std::vector<SpectralEvent> events;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != 4) throw std::runtime_error("event CSV: expected 4 fields: " + line);
        SpectralEvent e;
        e.weight = parse_double(f[0], "weight");
        e.center = UnitVec3::trusted(parse_double(f[1], "mu_x"), parse_double(f[2], "mu_y"),
                                     parse_double(f[3], "mu_z"));
        events.push_back(e);
    }
    return events;
}

std::vector<SpectralEvent> read_event_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return read_event_csv(is);
}

void write_field_csv(std::ostream& os, const std::vector<FieldRow>& rows) {
    os << "t,node_index,x,y,z,value\n";
    for (const auto& r : rows)
        os << r.t << ',' << r.node_index << ',' << fmt17(r.node.x()) << ','
           << fmt17(r.node.y()) << ',' << fmt17(r.node.z()) << ',' << fmt17(r.value)
           << '\n';
}

void write_field_csv_file(const std::string& path, const std::vector<FieldRow>& rows) {
    to_file(path, [&](std::ostream& os) { write_field_csv(os, rows); });
}

void write_distance_csv(std::ostream& os, const std::vector<double>& distances,
                        const std::vector<double>& bounds) {
    if (distances.size() != bounds.size())
        throw std::invalid_argument("distance CSV: size mismatch");
    os << "t,distance,bound\n";
    for (std::size_t t = 0; t < distances.size(); ++t)
        os << t << ',' << fmt17(distances[t]) << ',' << fmt17(bounds[t]) << '\n';
}

void write_distance_csv_file(const std::string& path, const std::vector<double>& distances,
                             const std::vector<double>& bounds) {
    to_file(path, [&](std::ostream& os) { write_distance_csv(os, distances, bounds); });
}

void write_snapshot_sidecar(std::ostream& os, const SnapshotMeta& meta) {
    nlohmann::ordered_json j;
    j["t"] = meta.t;
    j["a"] = meta.a;
    j["theta"] = meta.theta;
    j["axis"] = {meta.axis.x(), meta.axis.y(), meta.axis.z()};
    j["kappa"] = meta.kappa;
    j["scale"] = meta.scale;
    j["J"] = meta.J;
    os << j.dump(2) << '\n';
}

void write_snapshot_sidecar_file(const std::string& path, const SnapshotMeta& meta) {
    to_file(path, [&](std::ostream& os) { write_snapshot_sidecar(os, meta); });
}

}  // namespace smax
