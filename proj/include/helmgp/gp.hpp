#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "helmgp/dataset.hpp"
#include "helmgp/derived_kernels.hpp"
#include "helmgp/gram.hpp"

namespace helmgp {

/// Per-grid-point posterior moments. Velocity moments are always filled by
/// predict; divergence/vorticity vectors stay empty unless requested.
struct FieldPosterior {
  std::vector<Vec2> grid;
  std::vector<double> mean_u, mean_v, var_u, var_v;
  std::vector<double> mean_div, var_div;
  std::vector<double> mean_vort, var_vort;

  bool has_divergence() const { return !mean_div.empty(); }
  bool has_vorticity() const { return !mean_vort.empty(); }
};

namespace detail {

// Marginal variances may dip a hair below zero through the factorized
// algebra; anything within tolerance clamps to zero, anything worse is a
// numerical failure rather than a value to report.
inline double clamp_variance(double v) {
  if (v >= 0.0) return v;
  if (v >= -1e-9) return 0.0;
  throw NumericalError("posterior variance " + std::to_string(v) +
                       " below -1e-9");
}

}  // namespace detail

/// Exact GP inference state for one prior on one dataset: the factorized
/// noise-augmented Gram plus the solved weights. Immutable once built; safe
/// to share across threads.
///
/// An empty dataset is allowed and yields the prior (zero mean, prior
/// marginal variance).
template <MatrixKernel K>
class GpModel {
 public:
  GpModel(K kernel, VelocityDataset data, double sigma2_obs)
      : kernel_(std::move(kernel)),
        data_(std::move(data)),
        sigma2_obs_(sigma2_obs) {
    if (data_.size() > 0) {
      data_.validate();
      gram_ = StackedGram::assemble(
          kernel_, std::span<const Vec2>(data_.locations), sigma2_obs_);
      alpha_ = gram_->solve(data_.stacked());
    }
  }

  const VelocityDataset& data() const { return data_; }
  const K& kernel() const { return kernel_; }
  const StackedGram& gram() const { return *gram_; }

  /// -M log(2pi) - 1/2 log|K + sigma2 I| - 1/2 y^T (K + sigma2 I)^{-1} y
  /// for the 2M-dimensional stacked observation vector.
  double log_marginal_likelihood() const {
    data_.validate();
    const double m = static_cast<double>(data_.size());
    return -m * std::log(2.0 * std::numbers::pi) - 0.5 * gram_->log_det() -
           0.5 * gram_->quad_form(data_.stacked());
  }

  /// Posterior mean of the latent velocity field at a single point.
  Vec2 velocity_mean(const Vec2& x) const {
    if (!gram_) return Vec2::Zero();
    const auto m = static_cast<Eigen::Index>(data_.size());
    Vec2 out = Vec2::Zero();
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Matrix2d block =
          kernel_(x, data_.locations[static_cast<std::size_t>(j)]);
      out[0] += block(0, 0) * (*alpha_)[j] + block(0, 1) * (*alpha_)[m + j];
      out[1] += block(1, 0) * (*alpha_)[j] + block(1, 1) * (*alpha_)[m + j];
    }
    return out;
  }

  /// Fills the velocity part of the posterior over the given grid.
  /// Predictive moments are for the latent field F: no observation noise is
  /// added at test points.
  void add_velocity(FieldPosterior& post, std::span<const Vec2> grid) const {
    const auto n = static_cast<Eigen::Index>(grid.size());
    post.grid.assign(grid.begin(), grid.end());
    post.mean_u.resize(grid.size());
    post.mean_v.resize(grid.size());
    post.var_u.resize(grid.size());
    post.var_v.resize(grid.size());

    if (!gram_) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Matrix2d prior = kernel_(grid[i], grid[i]);
        post.mean_u[i] = 0.0;
        post.mean_v[i] = 0.0;
        post.var_u[i] = prior(0, 0);
        post.var_v[i] = prior(1, 1);
      }
      return;
    }

    const auto m = static_cast<Eigen::Index>(data_.size());
    // K_tr,te with train rows stacked [u-block; v-block], one test column
    // per (point, component) pair: columns [0, n) are u, [n, 2n) are v.
    Eigen::MatrixXd cross(2 * m, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Matrix2d block =
            kernel_(data_.locations[static_cast<std::size_t>(j)], grid[i]);
        cross(j, i) = block(0, 0);
        cross(m + j, i) = block(1, 0);
        cross(j, n + i) = block(0, 1);
        cross(m + j, n + i) = block(1, 1);
      }

    const Eigen::VectorXd mean = cross.transpose() * (*alpha_);
    const Eigen::MatrixXd half = gram_->solve_lower(cross);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Matrix2d prior = kernel_(grid[i], grid[i]);
      post.mean_u[i] = mean[i];
      post.mean_v[i] = mean[n + i];
      post.var_u[i] =
          detail::clamp_variance(prior(0, 0) - half.col(i).squaredNorm());
      post.var_v[i] =
          detail::clamp_variance(prior(1, 1) - half.col(n + i).squaredNorm());
    }
  }

  /// Fills the divergence or vorticity part of the posterior. Shares the
  /// training factorization (and weights) with the velocity prediction.
  void add_derived(FieldPosterior& post, std::span<const Vec2> grid,
                   DerivedField field) const {
    if (field == DerivedField::Divergence)
      add_derived_impl(post.mean_div, post.var_div, grid,
                       DivCross<K>{kernel_}, DivAuto<K>{kernel_});
    else
      add_derived_impl(post.mean_vort, post.var_vort, grid,
                       VortCross<K>{kernel_}, VortAuto<K>{kernel_});
  }

 private:
  template <class Cross, class Auto>
  void add_derived_impl(std::vector<double>& mean_out,
                        std::vector<double>& var_out,
                        std::span<const Vec2> grid, const Cross& cross_k,
                        const Auto& auto_k) const {
    const auto n = static_cast<Eigen::Index>(grid.size());
    mean_out.resize(grid.size());
    var_out.resize(grid.size());

    if (!gram_) {
      for (Eigen::Index i = 0; i < n; ++i) {
        mean_out[i] = 0.0;
        var_out[i] = auto_k(grid[i], grid[i]);
      }
      return;
    }

    const auto m = static_cast<Eigen::Index>(data_.size());
    Eigen::MatrixXd cross(2 * m, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::RowVector2d row =
            cross_k(grid[i], data_.locations[static_cast<std::size_t>(j)]);
        cross(j, i) = row[0];
        cross(m + j, i) = row[1];
      }

    const Eigen::VectorXd mean = cross.transpose() * (*alpha_);
    const Eigen::MatrixXd half = gram_->solve_lower(cross);
    for (Eigen::Index i = 0; i < n; ++i) {
      mean_out[i] = mean[i];
      var_out[i] = detail::clamp_variance(auto_k(grid[i], grid[i]) -
                                          half.col(i).squaredNorm());
    }
  }

  K kernel_;
  VelocityDataset data_;
  double sigma2_obs_;
  std::optional<StackedGram> gram_;
  std::optional<Eigen::VectorXd> alpha_;
};

namespace detail {

template <class F>
auto with_kernel(const PriorSpec& spec, F&& f) {
  spec.validate();
  if (spec.family == PriorFamily::Velocity)
    return f(VelocityKernel(spec));
  return f(HelmholtzKernel(spec));
}

}  // namespace detail

inline double log_marginal_likelihood(const PriorSpec& spec,
                                      const VelocityDataset& data) {
  return detail::with_kernel(spec, [&](auto k) {
    return GpModel(std::move(k), data, spec.sigma2_obs)
        .log_marginal_likelihood();
  });
}

inline FieldPosterior posterior_velocity(const PriorSpec& spec,
                                         const VelocityDataset& data,
                                         std::span<const Vec2> grid) {
  return detail::with_kernel(spec, [&](auto k) {
    FieldPosterior post;
    GpModel(std::move(k), data, spec.sigma2_obs).add_velocity(post, grid);
    return post;
  });
}

inline FieldPosterior posterior_derived(const PriorSpec& spec,
                                        const VelocityDataset& data,
                                        std::span<const Vec2> grid,
                                        DerivedField field) {
  return detail::with_kernel(spec, [&](auto k) {
    FieldPosterior post;
    post.grid.assign(grid.begin(), grid.end());
    GpModel(std::move(k), data, spec.sigma2_obs).add_derived(post, grid, field);
    return post;
  });
}

/// Full prediction (velocity plus requested derived fields) sharing one
/// factorization across all of them.
inline FieldPosterior predict(const PriorSpec& spec,
                              const VelocityDataset& data,
                              std::span<const Vec2> grid, bool divergence,
                              bool vorticity) {
  return detail::with_kernel(spec, [&](auto k) {
    FieldPosterior post;
    GpModel model(std::move(k), data, spec.sigma2_obs);
    model.add_velocity(post, grid);
    if (divergence) model.add_derived(post, grid, DerivedField::Divergence);
    if (vorticity) model.add_derived(post, grid, DerivedField::Vorticity);
    return post;
  });
}

/// mean / sqrt(var) per point. Where the variance is numerically zero the
/// ratio degenerates: a zero mean reports z = 0, anything else reports a
/// signed infinity sentinel.
inline std::vector<double> z_values(const std::vector<double>& mean,
                                    const std::vector<double>& var) {
  if (mean.size() != var.size())
    throw std::invalid_argument("z_values: mean/var size mismatch");
  std::vector<double> z(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (var[i] <= 1e-14) {
      if (std::abs(mean[i]) <= 1e-10)
        z[i] = 0.0;
      else
        z[i] = std::copysign(std::numeric_limits<double>::infinity(), mean[i]);
    } else {
      z[i] = mean[i] / std::sqrt(var[i]);
    }
  }
  return z;
}

inline std::vector<double> z_values(const FieldPosterior& post,
                                    DerivedField field) {
  if (field == DerivedField::Divergence)
    return z_values(post.mean_div, post.var_div);
  return z_values(post.mean_vort, post.var_vort);
}

}  // namespace helmgp
