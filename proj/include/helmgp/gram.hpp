#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "helmgp/errors.hpp"
#include "helmgp/matrix_kernel.hpp"

namespace helmgp {

/// Noise-augmented training Gram matrix in blocked ordering
/// [u_1..u_M, v_1..v_M] together with its Cholesky factor.
///
/// For kernels with uncorrelated outputs the cross blocks are identically
/// zero, so only the two M x M diagonal blocks are assembled and factorized.
/// That block fast path is what keeps the velocity-GP arm at the cheap end of
/// the cost comparison; everything downstream (solves, log-determinants)
/// dispatches on it transparently.
class StackedGram {
 public:
  template <MatrixKernel K>
  static StackedGram assemble(const K& kernel, std::span<const Vec2> xs,
                              std::optional<double> noise) {
    const auto m = static_cast<Eigen::Index>(xs.size());
    if (m == 0) throw DataError("StackedGram: empty location set");
    const double sigma2 = noise.value_or(0.0);

    StackedGram g;
    g.m_ = m;
    if constexpr (K::uncorrelated_outputs) {
      g.blocks_.resize(2);
      for (int c = 0; c < 2; ++c) {
        Eigen::MatrixXd& b = g.blocks_[static_cast<std::size_t>(c)];
        b.resize(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
          for (Eigen::Index j = i; j < m; ++j) {
            const double v =
                kernel.partial(c, c, {}, xs[static_cast<std::size_t>(i)],
                               xs[static_cast<std::size_t>(j)]);
            b(i, j) = v;
            b(j, i) = v;
          }
        b.diagonal().array() += sigma2;
      }
    } else {
      Eigen::MatrixXd& k = g.dense_;
      k.resize(2 * m, 2 * m);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j) {
          const Eigen::Matrix2d block = kernel(xs[static_cast<std::size_t>(i)],
                                               xs[static_cast<std::size_t>(j)]);
          k(i, j) = block(0, 0);
          k(i, m + j) = block(0, 1);
          k(m + i, j) = block(1, 0);
          k(m + i, m + j) = block(1, 1);
          if (i != j) {
            // k(x_j, x_i) = k(x_i, x_j)^T
            k(j, i) = block(0, 0);
            k(j, m + i) = block(1, 0);
            k(m + j, i) = block(0, 1);
            k(m + j, m + i) = block(1, 1);
          }
        }
      k.diagonal().array() += sigma2;
    }
    g.factorize();
    return g;
  }

  Eigen::Index dim() const { return 2 * m_; }
  double jitter() const { return jitter_; }
  bool block_diagonal() const { return !blocks_.empty(); }

  /// The noise-augmented matrix (without the jitter), materialized densely.
  Eigen::MatrixXd matrix() const {
    if (!block_diagonal()) return dense_;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2 * m_, 2 * m_);
    k.topLeftCorner(m_, m_) = blocks_[0];
    k.bottomRightCorner(m_, m_) = blocks_[1];
    return k;
  }

  /// (K + sigma2 I + jitter I)^{-1} rhs via the factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    if (!block_diagonal()) return llt_[0].solve(rhs);
    Eigen::VectorXd out(2 * m_);
    out.head(m_) = llt_[0].solve(rhs.head(m_).eval());
    out.tail(m_) = llt_[1].solve(rhs.tail(m_).eval());
    return out;
  }

  /// L^{-1} rhs, rows in blocked ordering.
  Eigen::MatrixXd solve_lower(const Eigen::MatrixXd& rhs) const {
    if (!block_diagonal())
      return llt_[0].matrixL().solve(rhs);
    Eigen::MatrixXd out(2 * m_, rhs.cols());
    out.topRows(m_) = llt_[0].matrixL().solve(rhs.topRows(m_).eval());
    out.bottomRows(m_) = llt_[1].matrixL().solve(rhs.bottomRows(m_).eval());
    return out;
  }

  double log_det() const {
    double s = 0.0;
    for (const auto& llt : llt_)
      s += llt.matrixLLT().diagonal().array().log().sum();
    return 2.0 * s;
  }

  double quad_form(const Eigen::VectorXd& y) const {
    return solve_lower(y).squaredNorm();
  }

 private:
  void factorize() {
    const double mean_diag = trace() / static_cast<double>(2 * m_);
    double jitter = 0.0;
    for (double scale = 0.0; scale <= 1.01e-4;
         scale = (scale == 0.0 ? 1e-10 : scale * 10.0)) {
      jitter = scale * mean_diag;
      if (try_factorize(jitter)) {
        jitter_ = jitter;
        return;
      }
      if (scale == 0.0 && mean_diag <= 0.0) break;
    }
    std::ostringstream msg;
    msg << "StackedGram: Cholesky failed after max jitter " << jitter;
    throw SingularKernelError(jitter, msg.str());
  }

  double trace() const {
    if (!blocks_.empty()) return blocks_[0].trace() + blocks_[1].trace();
    return dense_.trace();
  }

  bool try_factorize(double jitter) {
    llt_.clear();
    auto attempt = [&](const Eigen::MatrixXd& k) {
      Eigen::MatrixXd kj = k;
      kj.diagonal().array() += jitter;
      llt_.emplace_back(kj);
      return llt_.back().info() == Eigen::Success;
    };
    if (!blocks_.empty()) return attempt(blocks_[0]) && attempt(blocks_[1]);
    return attempt(dense_);
  }

  Eigen::Index m_ = 0;
  double jitter_ = 0.0;
  Eigen::MatrixXd dense_;                 // 2M x 2M, general kernels
  std::vector<Eigen::MatrixXd> blocks_;   // two M x M diagonal blocks
  std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_;
};

}  // namespace helmgp
