#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "helmgp/dataset.hpp"
#include "helmgp/errors.hpp"

namespace helmgp {

/// One row of a drifter-trace file. Positions are stored as
/// (longitude-like, latitude-like), matching the Location convention.
struct DrifterRecord {
  std::string buoy_id;
  double timestamp;  // seconds since epoch (or any consistent unit)
  Vec2 position;
  Vec2 velocity;
};

/// Column names of the delimited input file. Real deployments name these
/// differently per campaign; remap here instead of editing files.
struct ColumnSchema {
  std::string id = "id";
  std::string time = "time";
  std::string lat = "lat";
  std::string lon = "lon";
  std::string u = "u";
  std::string v = "v";
  char delimiter = ',';
};

struct IngestResult {
  std::vector<DrifterRecord> records;              // sorted by (id, time)
  std::vector<std::pair<int, std::string>> rejects;  // 1-based line, reason
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line,
                                           char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string()
                                         : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses a delimited drifter file. The header must name all six schema
/// columns (extra columns are ignored). Malformed rows are collected into
/// the rejects report rather than silently dropped; more than 50% rejected
/// rows is treated as a corrupt input.
inline IngestResult read_drifters(std::istream& in,
                                  const ColumnSchema& schema = {}) {
  std::string header;
  if (!std::getline(in, header))
    throw SchemaError("read_drifters: empty input, no header line");
  const auto names = detail::split_line(header, schema.delimiter);

  auto column = [&](const std::string& want) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == want) return static_cast<int>(i);
    throw SchemaError("read_drifters: missing required column '" + want + "'");
  };
  const int c_id = column(schema.id);
  const int c_time = column(schema.time);
  const int c_lat = column(schema.lat);
  const int c_lon = column(schema.lon);
  const int c_u = column(schema.u);
  const int c_v = column(schema.v);
  const int needed =
      1 + std::max({c_id, c_time, c_lat, c_lon, c_u, c_v});

  IngestResult result;
  std::string line;
  int line_no = 1;
  int data_rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    ++data_rows;
    const auto fields = detail::split_line(line, schema.delimiter);
    if (static_cast<int>(fields.size()) < needed) {
      result.rejects.emplace_back(line_no, "too few fields");
      continue;
    }
    DrifterRecord rec;
    rec.buoy_id = fields[static_cast<std::size_t>(c_id)];
    double t, lat, lon, u, v;
    if (rec.buoy_id.empty() ||
        !detail::parse_double(fields[static_cast<std::size_t>(c_time)], t) ||
        !detail::parse_double(fields[static_cast<std::size_t>(c_lat)], lat) ||
        !detail::parse_double(fields[static_cast<std::size_t>(c_lon)], lon) ||
        !detail::parse_double(fields[static_cast<std::size_t>(c_u)], u) ||
        !detail::parse_double(fields[static_cast<std::size_t>(c_v)], v)) {
      result.rejects.emplace_back(line_no, "unparseable field");
      continue;
    }
    rec.timestamp = t;
    rec.position = Vec2(lon, lat);
    rec.velocity = Vec2(u, v);
    result.records.push_back(std::move(rec));
  }

  if (data_rows > 0 &&
      2 * result.rejects.size() > static_cast<std::size_t>(data_rows))
    throw CorruptInputError("read_drifters: " +
                            std::to_string(result.rejects.size()) + " of " +
                            std::to_string(data_rows) + " rows rejected");

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const DrifterRecord& a, const DrifterRecord& b) {
                     if (a.buoy_id != b.buoy_id) return a.buoy_id < b.buoy_id;
                     return a.timestamp < b.timestamp;
                   });
  return result;
}

inline IngestResult read_drifters_file(const std::string& path,
                                       const ColumnSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("read_drifters: cannot open '" + path + "'");
  return read_drifters(in, schema);
}

struct BoundingBox {
  Vec2 min;
  Vec2 max;

  void validate() const {
    if (!(min[0] < max[0]) || !(min[1] < max[1]))
      throw ConfigError("BoundingBox: min must be strictly below max per axis");
  }

  bool contains(const Vec2& p) const {
    return p[0] >= min[0] && p[0] <= max[0] && p[1] >= min[1] && p[1] <= max[1];
  }
};

/// Region/time/identity filters plus per-buoy stride downsampling.
struct IngestFilter {
  std::optional<BoundingBox> box;
  std::optional<std::pair<double, double>> time_window;  // inclusive
  int downsample = 1;
  std::optional<std::set<std::string>> allowlist;

  void validate() const {
    if (downsample < 1)
      throw ConfigError("IngestFilter: downsample factor must be >= 1");
    if (box) box->validate();
    if (time_window && !(time_window->first <= time_window->second))
      throw ConfigError("IngestFilter: time window start exceeds end");
  }
};

/// Selection part of the filter: box / time window / allowlist, then per
/// buoy every n-th survivor starting from the first. Records stay intact
/// (ids and timestamps included), ordered by (id, time).
///
/// The selection predicates are idempotent; the stride is anchored at each
/// buoy's first in-window record, so re-striding an already thinned stream
/// with n > 1 would thin it again.
inline std::vector<DrifterRecord> filter_records(
    std::span<const DrifterRecord> records, const IngestFilter& filter) {
  filter.validate();

  std::map<std::string, std::vector<const DrifterRecord*>> per_buoy;
  for (const DrifterRecord& r : records) {
    if (filter.allowlist && !filter.allowlist->count(r.buoy_id)) continue;
    if (filter.box && !filter.box->contains(r.position)) continue;
    if (filter.time_window && (r.timestamp < filter.time_window->first ||
                               r.timestamp > filter.time_window->second))
      continue;
    per_buoy[r.buoy_id].push_back(&r);
  }

  std::vector<DrifterRecord> out;
  for (auto& [id, recs] : per_buoy)
    for (std::size_t i = 0; i < recs.size();
         i += static_cast<std::size_t>(filter.downsample))
      out.push_back(*recs[i]);
  return out;
}

/// Collapses the time dimension: timestamps and ids are dropped and the
/// surviving records stacked into a dataset.
inline VelocityDataset collapse_to_dataset(
    std::span<const DrifterRecord> records) {
  VelocityDataset data;
  for (const DrifterRecord& r : records) {
    data.locations.push_back(r.position);
    data.velocities.push_back(r.velocity);
  }
  return data;
}

/// filter + collapse. Raises when nothing survives.
inline VelocityDataset apply_filter(std::span<const DrifterRecord> records,
                                    const IngestFilter& filter) {
  const std::vector<DrifterRecord> kept = filter_records(records, filter);
  if (kept.empty())
    throw EmptySelectionError("apply_filter: no records survive the filter");
  return collapse_to_dataset(kept);
}

}  // namespace helmgp
