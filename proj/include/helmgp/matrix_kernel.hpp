#pragma once

#include <array>
#include <cmath>
#include <variant>

#include "helmgp/se_kernel.hpp"

namespace helmgp {

enum class PriorFamily { Velocity, Helmholtz };

inline const char* family_name(PriorFamily f) {
  return f == PriorFamily::Velocity ? "velocity" : "helmholtz";
}

/// The five positive scalars of either prior family.
///
/// For the velocity family (ell1, sigma2_1) and (ell2, sigma2_2) are the SE
/// hyperparameters of the two independent velocity components. For the
/// Helmholtz family they belong to the potential-function and stream-function
/// kernels respectively. sigma2_obs is the observation-noise variance.
struct PriorSpec {
  PriorFamily family;
  double ell1;
  double sigma2_1;
  double ell2;
  double sigma2_2;
  double sigma2_obs;

  void validate() const {
    SeParams a(sigma2_1, ell1);
    SeParams b(sigma2_2, ell2);
    (void)a;
    (void)b;
    if (!(sigma2_obs >= 0.0) || !std::isfinite(sigma2_obs))
      throw std::invalid_argument("PriorSpec: sigma2_obs must be finite and >= 0");
  }

  SeParams first() const { return SeParams(sigma2_1, ell1); }
  SeParams second() const { return SeParams(sigma2_2, ell2); }

  /// Log-space coordinates in the order (ell1, sigma2_1, ell2, sigma2_2,
  /// sigma2_obs); exponentiation always yields a valid spec.
  std::array<double, 5> to_log() const {
    return {std::log(ell1), std::log(sigma2_1), std::log(ell2),
            std::log(sigma2_2), std::log(sigma2_obs)};
  }

  static PriorSpec from_log(PriorFamily f, const std::array<double, 5>& lp) {
    PriorSpec s{f, std::exp(lp[0]), std::exp(lp[1]), std::exp(lp[2]),
                std::exp(lp[3]), std::exp(lp[4])};
    s.validate();
    return s;
  }
};

/// A matrix-valued kernel maps a point pair to a 2x2 covariance block and
/// exposes entrywise mixed partials: partial(i, j, d, x, y) is the derivative
/// of entry (i, j) of k(x, y) with multi-index d applied on top of whatever
/// derivatives the entry already carries internally.
template <class K>
concept MatrixKernel = requires(const K k, Vec2 x, Vec2 y, int i, int j,
                                DerivIndex d) {
  { k(x, y) } -> std::convertible_to<Eigen::Matrix2d>;
  { k.partial(i, j, d, x, y) } -> std::convertible_to<double>;
  { K::uncorrelated_outputs } -> std::convertible_to<bool>;
};

/// Independent SE priors on each velocity component: a diagonal block kernel.
class VelocityKernel {
 public:
  static constexpr bool uncorrelated_outputs = true;

  explicit VelocityKernel(const PriorSpec& spec)
      : k1_(spec.first()), k2_(spec.second()) {
    if (spec.family != PriorFamily::Velocity)
      throw std::invalid_argument("VelocityKernel: spec family is not Velocity");
  }

  VelocityKernel(const SeParams& k1, const SeParams& k2) : k1_(k1), k2_(k2) {}

  Eigen::Matrix2d operator()(const Vec2& x, const Vec2& y) const {
    Eigen::Matrix2d out;
    out << se_eval(k1_, x, y), 0.0, 0.0, se_eval(k2_, x, y);
    return out;
  }

  double partial(int i, int j, const DerivIndex& d, const Vec2& x,
                 const Vec2& y) const {
    if (i != j) return 0.0;
    return se_partial(i == 0 ? k1_ : k2_, d, x, y);
  }

  const SeParams& component(int i) const { return i == 0 ? k1_ : k2_; }

 private:
  SeParams k1_;
  SeParams k2_;
};

/// Covariance of F = grad(Phi) + rot(Psi) with independent SE priors on the
/// two scalar potentials. Every entry is a signed sum of second partials of
/// the potential kernels, so entrywise derivative access just increments the
/// multi-index before delegating to se_partial.
class HelmholtzKernel {
 public:
  static constexpr bool uncorrelated_outputs = false;

  explicit HelmholtzKernel(const PriorSpec& spec)
      : kphi_(spec.first()), kpsi_(spec.second()) {
    if (spec.family != PriorFamily::Helmholtz)
      throw std::invalid_argument(
          "HelmholtzKernel: spec family is not Helmholtz");
  }

  HelmholtzKernel(const SeParams& kphi, const SeParams& kpsi)
      : kphi_(kphi), kpsi_(kpsi) {}

  Eigen::Matrix2d operator()(const Vec2& x, const Vec2& y) const {
    Eigen::Matrix2d out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out(i, j) = partial(i, j, {}, x, y);
    return out;
  }

  // Entry (i, j) = d^2 kPhi / dx_i dy_j  +-  d^2 kPsi / dx_(1-i) dy_(1-j),
  // minus sign on the off-diagonal (the rot operator swaps coordinates and
  // flips one sign).
  double partial(int i, int j, const DerivIndex& d, const Vec2& x,
                 const Vec2& y) const {
    DerivIndex dphi = d;
    bump_x(dphi, i);
    bump_y(dphi, j);
    DerivIndex dpsi = d;
    bump_x(dpsi, 1 - i);
    bump_y(dpsi, 1 - j);
    const double sign = (i == j) ? 1.0 : -1.0;
    return se_partial(kphi_, dphi, x, y) + sign * se_partial(kpsi_, dpsi, x, y);
  }

  const SeParams& potential() const { return kphi_; }
  const SeParams& stream() const { return kpsi_; }

 private:
  static void bump_x(DerivIndex& d, int coord) { (coord == 0 ? d.a1 : d.a2)++; }
  static void bump_y(DerivIndex& d, int coord) { (coord == 0 ? d.b1 : d.b2)++; }

  SeParams kphi_;
  SeParams kpsi_;
};

inline VelocityKernel velocity_kernel(const PriorSpec& spec) {
  return VelocityKernel(spec);
}

inline HelmholtzKernel helmholtz_kernel(const PriorSpec& spec) {
  return HelmholtzKernel(spec);
}

using AnyKernel = std::variant<VelocityKernel, HelmholtzKernel>;

inline AnyKernel make_kernel(const PriorSpec& spec) {
  spec.validate();
  if (spec.family == PriorFamily::Velocity) return VelocityKernel(spec);
  return HelmholtzKernel(spec);
}

}  // namespace helmgp
