#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "helmgp/dataset.hpp"
#include "helmgp/errors.hpp"

namespace helmgp {

struct FieldSample {
  Vec2 velocity;
  double divergence;
  double vorticity;
};

/// Closed-form current fields used as simulation ground truth. Velocity,
/// divergence, and vorticity are all evaluated analytically.
class AnalyticField {
 public:
  enum class Kind { Vortex, VortexWithCurrent, DivergenceBump, DuffingWithBumps };

  /// Solid rotation (-x2, x1): zero divergence, vorticity -2 everywhere.
  static AnalyticField vortex() { return AnalyticField(Kind::Vortex); }

  /// Vortex above `boundary` in the second coordinate, a constant
  /// left-to-right current below it.
  static AnalyticField vortex_with_current(double boundary = 0.5,
                                           double current_speed = 0.7) {
    AnalyticField f(Kind::VortexWithCurrent);
    f.boundary_ = boundary;
    f.current_speed_ = current_speed;
    return f;
  }

  /// Radial outflow (x - c) / (b + |x - c|^2): curl-free with divergence
  /// 2b / (b + |x - c|^2)^2 peaking at the center. Larger b spreads the
  /// divergence over a wider, weaker area.
  static AnalyticField divergence_bump(double b, const Vec2& center = {0, 0}) {
    AnalyticField f(Kind::DivergenceBump);
    f.b_div_ = b;
    f.div_center_ = center;
    return f;
  }

  /// Duffing oscillator flow (x2, x1 - 0.1 x1^3) plus a divergence bump and
  /// a convergence bump. One shared width parameter b for both bumps.
  static AnalyticField duffing_with_bumps(double b,
                                          const Vec2& div_center = {-3, 0},
                                          const Vec2& conv_center = {3, 0}) {
    AnalyticField f(Kind::DuffingWithBumps);
    f.b_div_ = b;
    f.b_conv_ = b;
    f.div_center_ = div_center;
    f.conv_center_ = conv_center;
    return f;
  }

  Kind kind() const { return kind_; }

  FieldSample operator()(const Vec2& x) const {
    switch (kind_) {
      case Kind::Vortex:
        return {Vec2(-x[1], x[0]), 0.0, -2.0};
      case Kind::VortexWithCurrent:
        if (x[1] >= boundary_) return {Vec2(-x[1], x[0]), 0.0, -2.0};
        return {Vec2(current_speed_, 0.0), 0.0, 0.0};
      case Kind::DivergenceBump:
        return bump(x, div_center_, b_div_, +1.0);
      case Kind::DuffingWithBumps: {
        const double amp = 1.0 + 0.1 * std::cos(50.0 * std::numbers::pi / 4.0);
        FieldSample s;
        s.velocity = Vec2(x[1], (x[0] - 0.1 * x[0] * x[0] * x[0]) * amp);
        s.divergence = 0.0;
        s.vorticity = 1.0 - amp * (1.0 - 0.3 * x[0] * x[0]);
        const FieldSample d = bump(x, div_center_, b_div_, +1.0);
        const FieldSample c = bump(x, conv_center_, b_conv_, -1.0);
        s.velocity += d.velocity + c.velocity;
        s.divergence += d.divergence + c.divergence;
        return s;
      }
    }
    throw std::logic_error("AnalyticField: unknown kind");
  }

 private:
  explicit AnalyticField(Kind kind) : kind_(kind) {}

  static FieldSample bump(const Vec2& x, const Vec2& center, double b,
                          double sign) {
    const Vec2 r = x - center;
    const double denom = b + r.squaredNorm();
    return {sign * r / denom, sign * 2.0 * b / (denom * denom), 0.0};
  }

  Kind kind_;
  double b_div_ = 0.0;
  double b_conv_ = 0.0;
  Vec2 div_center_{0, 0};
  Vec2 conv_center_{0, 0};
  double boundary_ = 0.0;
  double current_speed_ = 0.0;
};

/// Equally spaced rectangular grid; points listed row-major with the first
/// coordinate varying fastest (index = iy * nx + ix).
struct SimGrid {
  Vec2 min{-1, -1};
  Vec2 max{1, 1};
  int nx = 2;
  int ny = 2;

  void validate() const {
    if (nx < 2 || ny < 2)
      throw ConfigError("SimGrid: resolution must be at least 2 per axis");
    if (!(min[0] < max[0]) || !(min[1] < max[1]))
      throw ConfigError("SimGrid: min must be strictly below max per axis");
  }

  int count() const { return nx * ny; }
  double dx() const { return (max[0] - min[0]) / (nx - 1); }
  double dy() const { return (max[1] - min[1]) / (ny - 1); }

  Vec2 point(int idx) const {
    const int iy = idx / nx;
    const int ix = idx % nx;
    return {min[0] + ix * dx(), min[1] + iy * dy()};
  }

  std::vector<Vec2> points() const {
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(count()));
    for (int i = 0; i < count(); ++i) out.push_back(point(i));
    return out;
  }

  bool contains(const Vec2& x, double tol = 0.0) const {
    return x[0] >= min[0] - tol && x[0] <= max[0] + tol && x[1] >= min[1] - tol &&
           x[1] <= max[1] + tol;
  }
};

/// A velocity field sampled on a SimGrid, queried through bilinear
/// interpolation. Matches how the simulated buoys observe the current: the
/// truth is the gridded field, not the underlying closed form.
class GriddedField {
 public:
  GriddedField(const AnalyticField& field, const SimGrid& grid) : grid_(grid) {
    grid_.validate();
    u_.resize(static_cast<std::size_t>(grid_.count()));
    v_.resize(static_cast<std::size_t>(grid_.count()));
    for (int i = 0; i < grid_.count(); ++i) {
      const Vec2 vel = field(grid_.point(i)).velocity;
      u_[static_cast<std::size_t>(i)] = vel[0];
      v_[static_cast<std::size_t>(i)] = vel[1];
    }
  }

  const SimGrid& grid() const { return grid_; }

  bool inside(const Vec2& x) const { return grid_.contains(x, tolerance()); }

  Vec2 velocity(const Vec2& x) const {
    if (!inside(x))
      throw DataError("GriddedField: query outside the grid extents");
    const double fx = clamp01((x[0] - grid_.min[0]) / (grid_.max[0] - grid_.min[0]));
    const double fy = clamp01((x[1] - grid_.min[1]) / (grid_.max[1] - grid_.min[1]));
    const double gx = fx * (grid_.nx - 1);
    const double gy = fy * (grid_.ny - 1);
    const int ix = std::min(static_cast<int>(gx), grid_.nx - 2);
    const int iy = std::min(static_cast<int>(gy), grid_.ny - 2);
    const double tx = gx - ix;
    const double ty = gy - iy;
    auto at = [&](int jx, int jy) {
      return static_cast<std::size_t>(jy * grid_.nx + jx);
    };
    auto lerp2 = [&](const std::vector<double>& f) {
      const double lo = f[at(ix, iy)] * (1 - tx) + f[at(ix + 1, iy)] * tx;
      const double hi = f[at(ix, iy + 1)] * (1 - tx) + f[at(ix + 1, iy + 1)] * tx;
      return lo * (1 - ty) + hi * ty;
    };
    return {lerp2(u_), lerp2(v_)};
  }

 private:
  double tolerance() const {
    return 1e-9 * std::max(grid_.max[0] - grid_.min[0],
                           grid_.max[1] - grid_.min[1]);
  }

  static double clamp01(double t) { return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t); }

  SimGrid grid_;
  std::vector<double> u_;
  std::vector<double> v_;
};

struct BuoyConfig {
  std::vector<Vec2> starts;
  double total_time = 1.0;
  int steps = 1;       // number of observation times; t_k = k * T / steps
  double dt = 0.0;     // integrator step; 0 picks total_time / 1000

  void validate(const SimGrid& grid) const {
    if (!(total_time > 0.0)) throw ConfigError("BuoyConfig: total_time must be > 0");
    if (steps < 1) throw ConfigError("BuoyConfig: steps must be >= 1");
    if (starts.empty()) throw ConfigError("BuoyConfig: no buoy start positions");
    for (const Vec2& s : starts)
      if (!grid.contains(s))
        throw ConfigError("BuoyConfig: buoy start outside the grid extents");
    if (dt < 0.0) throw ConfigError("BuoyConfig: dt must be >= 0");
  }
};

namespace detail {

inline Vec2 rk4_step(const GriddedField& f, const Vec2& x, double h) {
  const Vec2 k1 = f.velocity(x);
  const Vec2 k2 = f.velocity(x + 0.5 * h * k1);
  const Vec2 k3 = f.velocity(x + 0.5 * h * k2);
  const Vec2 k4 = f.velocity(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Advects each buoy through the bilinearly interpolated gridded field with
/// fixed-step RK4 and records (position, interpolated velocity) at the
/// observation times t_k = k * T / steps. Buoy trajectories are independent;
/// observations are appended buoy by buoy in time order. Deterministic.
inline VelocityDataset simulate_buoys(const AnalyticField& field,
                                      const SimGrid& grid,
                                      const BuoyConfig& cfg) {
  cfg.validate(grid);
  const GriddedField gridded(field, grid);
  const double h_target = cfg.dt > 0.0 ? cfg.dt : cfg.total_time / 1000.0;

  VelocityDataset data;
  for (std::size_t b = 0; b < cfg.starts.size(); ++b) {
    Vec2 pos = cfg.starts[b];
    double t = 0.0;
    try {
      for (int k = 1; k <= cfg.steps; ++k) {
        const double t_target = cfg.total_time * k / cfg.steps;
        const int n_sub =
            std::max(1, static_cast<int>(std::ceil((t_target - t) / h_target)));
        const double h = (t_target - t) / n_sub;
        for (int s = 0; s < n_sub; ++s) {
          pos = detail::rk4_step(gridded, pos, h);
          t += h;
        }
        t = t_target;
        data.locations.push_back(pos);
        data.velocities.push_back(gridded.velocity(pos));
      }
    } catch (const DataError&) {
      throw OutOfDomainError(
          static_cast<int>(b), t,
          "simulate_buoys: buoy " + std::to_string(b) +
              " left the grid extents near t = " + std::to_string(t));
    }
  }
  return data;
}

/// sqrt(mean ||truth - pred||^2) over matching point lists.
inline double rmse(const std::vector<Vec2>& truth,
                   const std::vector<Vec2>& pred) {
  if (truth.size() != pred.size())
    throw std::invalid_argument("rmse: shape mismatch");
  if (truth.empty()) throw std::invalid_argument("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    sum += (truth[i] - pred[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

inline double rmse(const std::vector<double>& truth,
                   const std::vector<double>& pred) {
  if (truth.size() != pred.size())
    throw std::invalid_argument("rmse: shape mismatch");
  if (truth.empty()) throw std::invalid_argument("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - pred[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

}  // namespace helmgp
