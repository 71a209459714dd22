#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace helmgp {

using Vec2 = Eigen::Vector2d;

/// Hyperparameters of a scalar squared-exponential kernel,
///   k(x, x') = sigma2 * exp(-||x - x'||^2 / (2 ell^2)).
///
/// sigma2 = 0 is allowed and yields the zero kernel; it is how a prior
/// switches off its divergent or rotational component entirely.
struct SeParams {
  double sigma2;
  double ell;

  SeParams(double sigma2_, double ell_) : sigma2(sigma2_), ell(ell_) {
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
      throw std::invalid_argument("SeParams: sigma2 must be finite and >= 0");
    if (!(ell > 0.0) || !std::isfinite(ell))
      throw std::invalid_argument("SeParams: ell must be finite and > 0");
  }

  static SeParams from_log(double log_sigma2, double log_ell) {
    return SeParams(std::exp(log_sigma2), std::exp(log_ell));
  }
};

/// Mixed-derivative multi-index. a1/a2 are derivative orders in the first
/// argument's coordinates, b1/b2 in the second argument's. Orders are capped
/// at total 2 per argument (total 4 overall), which is exactly what the
/// second-derivative matrix kernels plus one more div/curl application need.
struct DerivIndex {
  int a1 = 0;
  int a2 = 0;
  int b1 = 0;
  int b2 = 0;

  void validate() const {
    if (a1 < 0 || a2 < 0 || b1 < 0 || b2 < 0)
      throw std::invalid_argument("DerivIndex: orders must be non-negative");
    if (a1 + a2 > 2 || b1 + b2 > 2)
      throw std::invalid_argument(
          "DerivIndex: total order per argument exceeds 2");
  }

  int total() const { return a1 + a2 + b1 + b2; }
};

namespace detail {

/// Probabilists' Hermite polynomials He_0..He_4. The m-th derivative of
/// exp(-z^2/2) is (-1)^m He_m(z) exp(-z^2/2), which is all the SE kernel
/// needs for exact mixed partials up to total order four.
inline double hermite(int m, double z) {
  switch (m) {
    case 0: return 1.0;
    case 1: return z;
    case 2: return z * z - 1.0;
    case 3: return z * (z * z - 3.0);
    case 4: return (z * z) * (z * z - 6.0) + 3.0;
    default:
      throw std::invalid_argument("hermite: order > 4 not supported");
  }
}

}  // namespace detail

/// k(x, x2) for the squared-exponential kernel. Total for finite inputs.
inline double se_eval(const SeParams& p, const Vec2& x, const Vec2& x2) {
  const double dx = x[0] - x2[0];
  const double dy = x[1] - x2[1];
  return p.sigma2 * std::exp(-0.5 * (dx * dx + dy * dy) / (p.ell * p.ell));
}

/// Exact mixed partial of se_eval for the given multi-index.
///
/// With z = (x - x2)/ell the kernel factorizes over coordinates, so the
/// partial of order (a1,a2;b1,b2) is a product of two Hermite terms:
///   (-1)^(a1+a2) sigma2 ell^-(m+n) He_m(z1) He_n(z2) exp(-|z|^2/2),
/// where m = a1+b1 and n = a2+b2.
inline double se_partial(const SeParams& p, const DerivIndex& d, const Vec2& x,
                         const Vec2& x2) {
  d.validate();
  const int m = d.a1 + d.b1;
  const int n = d.a2 + d.b2;
  const double z1 = (x[0] - x2[0]) / p.ell;
  const double z2 = (x[1] - x2[1]) / p.ell;
  const double e = std::exp(-0.5 * (z1 * z1 + z2 * z2));
  const double sign = ((d.a1 + d.a2) % 2 == 0) ? 1.0 : -1.0;
  double inv_ell_pow = 1.0;
  for (int k = 0; k < m + n; ++k) inv_ell_pow /= p.ell;
  return sign * p.sigma2 * inv_ell_pow * detail::hermite(m, z1) *
         detail::hermite(n, z2) * e;
}

}  // namespace helmgp
