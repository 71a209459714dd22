#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "helmgp/dataset.hpp"
#include "helmgp/errors.hpp"
#include "helmgp/gp.hpp"

namespace helmgp {

/// Ground-truth columns appended to a grid file when the data source is a
/// simulation.
struct TruthGrid {
  std::vector<double> u, v, divergence, vorticity;
};

namespace detail {

// 17 significant digits round-trips an IEEE double exactly through decimal
// text. snprintf keeps the formatting locale-independent.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline bool parse_csv_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline constexpr const char* kGridHeader =
    "x1,x2,mean_u,mean_v,var_u,var_v,mean_div,var_div,z_div,"
    "mean_vort,var_vort,z_vort,truth_u,truth_v,truth_div,truth_vort";

/// Writes the posterior grid CSV. The column set is fixed; fields that were
/// not computed are emitted as empty strings so the schema never shifts.
/// Row order follows the posterior's grid order.
inline void write_grid_csv(std::ostream& os, const FieldPosterior& post,
                           const std::optional<TruthGrid>& truth = {}) {
  const std::size_t n = post.grid.size();
  if (post.mean_u.size() != n || post.mean_v.size() != n)
    throw std::invalid_argument("write_grid_csv: inconsistent lengths");
  if (truth &&
      (truth->u.size() != n || truth->v.size() != n ||
       truth->divergence.size() != n || truth->vorticity.size() != n))
    throw std::invalid_argument("write_grid_csv: truth length mismatch");

  const std::vector<double> zd =
      post.has_divergence() ? z_values(post, DerivedField::Divergence)
                            : std::vector<double>();
  const std::vector<double> zv =
      post.has_vorticity() ? z_values(post, DerivedField::Vorticity)
                           : std::vector<double>();

  os << kGridHeader << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    using detail::fmt17;
    os << fmt17(post.grid[i][0]) << ',' << fmt17(post.grid[i][1]) << ','
       << fmt17(post.mean_u[i]) << ',' << fmt17(post.mean_v[i]) << ','
       << fmt17(post.var_u[i]) << ',' << fmt17(post.var_v[i]) << ',';
    if (post.has_divergence())
      os << fmt17(post.mean_div[i]) << ',' << fmt17(post.var_div[i]) << ','
         << fmt17(zd[i]) << ',';
    else
      os << ",,,";
    if (post.has_vorticity())
      os << fmt17(post.mean_vort[i]) << ',' << fmt17(post.var_vort[i]) << ','
         << fmt17(zv[i]) << ',';
    else
      os << ",,,";
    if (truth)
      os << fmt17(truth->u[i]) << ',' << fmt17(truth->v[i]) << ','
         << fmt17(truth->divergence[i]) << ',' << fmt17(truth->vorticity[i]);
    else
      os << ",,,";
    os << "\n";
  }
}

inline void write_grid_csv(const std::string& path, const FieldPosterior& post,
                           const std::optional<TruthGrid>& truth = {}) {
  std::ofstream os(path);
  if (!os) throw DataError("write_grid_csv: cannot open '" + path + "'");
  write_grid_csv(os, post, truth);
  if (!os) throw DataError("write_grid_csv: write failed for '" + path + "'");
}

struct GridFile {
  FieldPosterior posterior;
  std::optional<TruthGrid> truth;
};

inline GridFile read_grid_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw DataError("read_grid_csv: empty file");
  if (line != kGridHeader)
    throw SchemaError("read_grid_csv: unexpected header");

  GridFile out;
  bool any_truth = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 16)
      throw SchemaError("read_grid_csv: expected 16 columns, got " +
                        std::to_string(f.size()));
    auto need = [&](int i) {
      double v;
      if (!detail::parse_csv_double(f[static_cast<std::size_t>(i)], v))
        throw SchemaError("read_grid_csv: bad numeric field " +
                          std::to_string(i));
      return v;
    };
    FieldPosterior& p = out.posterior;
    p.grid.emplace_back(need(0), need(1));
    p.mean_u.push_back(need(2));
    p.mean_v.push_back(need(3));
    p.var_u.push_back(need(4));
    p.var_v.push_back(need(5));
    if (!f[6].empty()) {
      p.mean_div.push_back(need(6));
      p.var_div.push_back(need(7));
    }
    if (!f[9].empty()) {
      p.mean_vort.push_back(need(9));
      p.var_vort.push_back(need(10));
    }
    if (!f[12].empty()) {
      if (!out.truth) out.truth.emplace();
      out.truth->u.push_back(need(12));
      out.truth->v.push_back(need(13));
      out.truth->divergence.push_back(need(14));
      out.truth->vorticity.push_back(need(15));
      any_truth = true;
    }
  }
  if (!any_truth) out.truth.reset();
  return out;
}

inline GridFile read_grid_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("read_grid_csv: cannot open '" + path + "'");
  return read_grid_csv(is);
}

/// Dataset CSV, the shared exchange format between simulate/ingest and the
/// fitting stages: x1,x2,u,v at 17 significant digits.
inline void write_dataset_csv(std::ostream& os, const VelocityDataset& data) {
  os << "x1,x2,u,v\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    using detail::fmt17;
    os << fmt17(data.locations[i][0]) << ',' << fmt17(data.locations[i][1])
       << ',' << fmt17(data.velocities[i][0]) << ','
       << fmt17(data.velocities[i][1]) << "\n";
  }
}

inline void write_dataset_csv(const std::string& path,
                              const VelocityDataset& data) {
  std::ofstream os(path);
  if (!os) throw DataError("write_dataset_csv: cannot open '" + path + "'");
  write_dataset_csv(os, data);
  if (!os)
    throw DataError("write_dataset_csv: write failed for '" + path + "'");
}

inline VelocityDataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("read_dataset_csv: empty file");
  if (line != "x1,x2,u,v")
    throw SchemaError("read_dataset_csv: unexpected header");
  VelocityDataset data;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 4)
      throw SchemaError("read_dataset_csv: expected 4 columns");
    double x1, x2, u, v;
    if (!detail::parse_csv_double(f[0], x1) ||
        !detail::parse_csv_double(f[1], x2) ||
        !detail::parse_csv_double(f[2], u) ||
        !detail::parse_csv_double(f[3], v))
      throw SchemaError("read_dataset_csv: bad numeric field");
    data.locations.emplace_back(x1, x2);
    data.velocities.emplace_back(u, v);
  }
  return data;
}

inline VelocityDataset read_dataset_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("read_dataset_csv: cannot open '" + path + "'");
  return read_dataset_csv(is);
}

}  // namespace helmgp
