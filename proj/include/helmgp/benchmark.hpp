#pragma once

#include <chrono>
#include <cstdint>
#include <random>

#include "helmgp/gp.hpp"

namespace helmgp {

/// Wall-clock comparison of the two prior families on the same synthetic
/// problem: assemble + factorize the training system, then posterior mean
/// and marginal variances at n test points. The velocity arm goes through
/// the block-diagonal fast path; the ratio is the measured cost of the
/// coupled prior.
struct CostBenchmark {
  int m = 0;
  int n = 0;
  double helmholtz_seconds = 0.0;
  double velocity_seconds = 0.0;
  double ratio = 0.0;
};

inline CostBenchmark cost_benchmark(int m, int n, int reps = 3,
                                    std::uint64_t seed = 0) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("cost_benchmark: m and n must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::normal_distribution<double> vel(0.0, 1.0);

  VelocityDataset data;
  for (int i = 0; i < m; ++i) {
    data.locations.emplace_back(coord(rng), coord(rng));
    data.velocities.emplace_back(vel(rng), vel(rng));
  }
  std::vector<Vec2> grid;
  grid.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid.emplace_back(coord(rng), coord(rng));

  auto time_family = [&](PriorFamily family) {
    const PriorSpec spec{family, 1.0, 1.0, 1.0, 1.0, 0.1};
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const FieldPosterior post = posterior_velocity(spec, data, grid);
      const auto dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      if (post.mean_u.size() != grid.size())
        throw std::logic_error("cost_benchmark: bad posterior size");
      best = std::min(best, dt);
    }
    return best;
  };

  CostBenchmark out;
  out.m = m;
  out.n = n;
  out.velocity_seconds = time_family(PriorFamily::Velocity);
  out.helmholtz_seconds = time_family(PriorFamily::Helmholtz);
  out.ratio = out.helmholtz_seconds / out.velocity_seconds;
  return out;
}

}  // namespace helmgp
