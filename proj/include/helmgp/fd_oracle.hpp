#pragma once

#include "helmgp/se_kernel.hpp"

namespace helmgp {

namespace detail {

inline long double se_eval_ext(const SeParams& p, long double x1,
                               long double x2, long double y1,
                               long double y2) {
  const long double d1 = x1 - y1;
  const long double d2 = x2 - y2;
  const long double l = static_cast<long double>(p.ell);
  return static_cast<long double>(p.sigma2) *
         std::exp(-0.5L * (d1 * d1 + d2 * d2) / (l * l));
}

// Composes second-order central stencils one coordinate at a time.
// coord: 0,1 -> first argument, 2,3 -> second argument.
inline long double fd_recurse(const SeParams& p, const int orders[4],
                              long double c[4], int coord, long double h) {
  if (coord == 4) return se_eval_ext(p, c[0], c[1], c[2], c[3]);
  const int o = orders[coord];
  if (o == 0) return fd_recurse(p, orders, c, coord + 1, h);
  const long double c0 = c[coord];
  long double plus, minus, center;
  c[coord] = c0 + h;
  plus = fd_recurse(p, orders, c, coord + 1, h);
  c[coord] = c0 - h;
  minus = fd_recurse(p, orders, c, coord + 1, h);
  c[coord] = c0;
  if (o == 1) return (plus - minus) / (2.0L * h);
  center = fd_recurse(p, orders, c, coord + 1, h);
  return (plus - 2.0L * center + minus) / (h * h);
}

}  // namespace detail

/// Central finite-difference approximation of the mixed partial computed by
/// se_partial. Test oracle only: it is the independent check every analytic
/// derivative in this library is validated against.
///
/// Stencil arithmetic runs in extended precision. Composed fourth-order
/// central differences cancel ~12 decimal digits at h = 1e-3, so plain
/// doubles would leave ~1e-3 of noise, far above what the derivative tests
/// assert.
inline double fd_partial_oracle(const SeParams& p, const DerivIndex& d,
                                const Vec2& x, const Vec2& x2,
                                double h = 1e-3) {
  d.validate();
  if (!(h > 0.0)) throw std::invalid_argument("fd_partial_oracle: h must be > 0");
  const int orders[4] = {d.a1, d.a2, d.b1, d.b2};
  long double c[4] = {x[0], x[1], x2[0], x2[1]};
  return static_cast<double>(
      detail::fd_recurse(p, orders, c, 0, static_cast<long double>(h)));
}

}  // namespace helmgp
