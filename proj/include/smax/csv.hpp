#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "smax/geometry.hpp"
#include "smax/spectral.hpp"

namespace smax {

/* 17 significant digits: every double round-trips through text exactly. */
std::string fmt17(double v);

/* Event files: header `weight,mu_x,mu_y,mu_z`, rows in descending weight. */
void write_event_csv(std::ostream& os, const std::vector<SpectralEvent>& events);
void write_event_csv_file(const std::string& path, const std::vector<SpectralEvent>& events);
std::vector<SpectralEvent> read_event_csv(std::istream& is);
std::vector<SpectralEvent> read_event_csv_file(const std::string& path);

/* Field dumps: header `t,node_index,x,y,z,value`. */
struct FieldRow {
    long t = 0;
    std::size_t node_index = 0;
    UnitVec3 node;
    double value = 0.0;
};

void write_field_csv(std::ostream& os, const std::vector<FieldRow>& rows);
void write_field_csv_file(const std::string& path, const std::vector<FieldRow>& rows);

/* Coupled-run distances: header `t,distance,bound`. */
void write_distance_csv(std::ostream& os, const std::vector<double>& distances,
                        const std::vector<double>& bounds);
void write_distance_csv_file(const std::string& path, const std::vector<double>& distances,
                             const std::vector<double>& bounds);

/* State snapshots pair an event CSV with a JSON sidecar carrying the
 * parameters needed to reconstruct the state. J records the truncation
 * depth of a stationary draw and is -1 for snapshots of a running chain. */
struct SnapshotMeta {
    long t = 0;
    double a = 0.0;
    double theta = 0.0;
    UnitVec3 axis;
    double kappa = 0.0;
    double scale = 0.0;
    long J = -1;
};

void write_snapshot_sidecar(std::ostream& os, const SnapshotMeta& meta);
void write_snapshot_sidecar_file(const std::string& path, const SnapshotMeta& meta);

}  // namespace smax
