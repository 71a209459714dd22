#pragma once

#include "helmgp/matrix_kernel.hpp"

namespace helmgp {

enum class DerivedField { Divergence, Vorticity };

inline const char* derived_field_name(DerivedField f) {
  return f == DerivedField::Divergence ? "divergence" : "vorticity";
}

/// Cov[div F(x), F(y)] as a 1x2 row: entry j sums d k_{i,j}/dx_i over i.
/// Works for any matrix kernel with first-derivative access, so the same
/// code path serves both prior families.
template <MatrixKernel K>
struct DivCross {
  K kernel;

  Eigen::RowVector2d operator()(const Vec2& x, const Vec2& y) const {
    Eigen::RowVector2d out;
    for (int j = 0; j < 2; ++j)
      out[j] = kernel.partial(0, j, DerivIndex{.a1 = 1}, x, y) +
               kernel.partial(1, j, DerivIndex{.a2 = 1}, x, y);
    return out;
  }
};

/// Cov[curl F(x), F(y)]: entry j is d k_{1,j}/dx_2 - d k_{2,j}/dx_1.
template <MatrixKernel K>
struct VortCross {
  K kernel;

  Eigen::RowVector2d operator()(const Vec2& x, const Vec2& y) const {
    Eigen::RowVector2d out;
    for (int j = 0; j < 2; ++j)
      out[j] = kernel.partial(0, j, DerivIndex{.a2 = 1}, x, y) -
               kernel.partial(1, j, DerivIndex{.a1 = 1}, x, y);
    return out;
  }
};

/// Auto-covariance of the divergence field:
///   k_div(x, y) = sum_{i,j} d^2 k_{i,j} / dx_i dy_j.
template <MatrixKernel K>
struct DivAuto {
  K kernel;

  double operator()(const Vec2& x, const Vec2& y) const {
    double sum = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        DerivIndex d;
        (i == 0 ? d.a1 : d.a2) = 1;
        (j == 0 ? d.b1 : d.b2) = 1;
        sum += kernel.partial(i, j, d, x, y);
      }
    return sum;
  }
};

/// Auto-covariance of the vorticity field:
///   k_vort(x, y) = sum_{i,j} (-1)^(i+j) d^2 k_{i,j} / dx_(1-i) dy_(1-j)
/// (0-based indices; the derivative acts on the opposite coordinate).
template <MatrixKernel K>
struct VortAuto {
  K kernel;

  double operator()(const Vec2& x, const Vec2& y) const {
    double sum = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        DerivIndex d;
        (i == 0 ? d.a2 : d.a1) = 1;
        (j == 0 ? d.b2 : d.b1) = 1;
        const double sign = (i == j) ? 1.0 : -1.0;
        sum += sign * kernel.partial(i, j, d, x, y);
      }
    return sum;
  }
};

template <MatrixKernel K>
DivCross<K> div_cross_kernel(K k) {
  return {std::move(k)};
}

template <MatrixKernel K>
VortCross<K> vort_cross_kernel(K k) {
  return {std::move(k)};
}

template <MatrixKernel K>
DivAuto<K> div_auto_kernel(K k) {
  return {std::move(k)};
}

template <MatrixKernel K>
VortAuto<K> vort_auto_kernel(K k) {
  return {std::move(k)};
}

}  // namespace helmgp
