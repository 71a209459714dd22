#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "helmgp/errors.hpp"
#include "helmgp/se_kernel.hpp"

namespace helmgp {

/// Paired buoy locations and 2D velocity observations.
struct VelocityDataset {
  std::vector<Vec2> locations;
  std::vector<Vec2> velocities;

  std::size_t size() const { return locations.size(); }

  void validate() const {
    if (locations.size() != velocities.size())
      throw DataError("VelocityDataset: locations/velocities length mismatch");
    if (locations.empty()) throw DataError("VelocityDataset: empty dataset");
    for (std::size_t m = 0; m < locations.size(); ++m) {
      if (!locations[m].allFinite() || !velocities[m].allFinite())
        throw DataError("VelocityDataset: non-finite entry at row " +
                        std::to_string(m));
    }
  }

  /// Observations stacked in blocked order [u_1..u_M, v_1..v_M].
  Eigen::VectorXd stacked() const {
    const auto m = static_cast<Eigen::Index>(size());
    Eigen::VectorXd y(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
      y[i] = velocities[static_cast<std::size_t>(i)][0];
      y[m + i] = velocities[static_cast<std::size_t>(i)][1];
    }
    return y;
  }
};

}  // namespace helmgp
