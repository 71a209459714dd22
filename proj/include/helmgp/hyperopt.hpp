#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "helmgp/gp.hpp"

namespace helmgp {

/// Log-space hyperparameter vector, same ordering as PriorSpec::to_log():
/// (log ell1, log sigma2_1, log ell2, log sigma2_2, log sigma2_obs).
using LogParams = std::array<double, 5>;

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  int step = 0;
  std::array<double, 5> m{};  // first-moment accumulator
  std::array<double, 5> v{};  // second-moment accumulator
};

inline LogParams adam_step(AdamState& state, const AdamConfig& cfg,
                           const LogParams& params,
                           const std::array<double, 5>& grad_ascent) {
  ++state.step;
  LogParams out = params;
  const double bc1 = 1.0 - std::pow(cfg.beta1, state.step);
  const double bc2 = 1.0 - std::pow(cfg.beta2, state.step);
  for (int i = 0; i < 5; ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad_ascent[i];
    state.v[i] = cfg.beta2 * state.v[i] +
                 (1.0 - cfg.beta2) * grad_ascent[i] * grad_ascent[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    out[i] += cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  return out;
}

struct ObjectiveEval {
  double value;
  std::string note;  // non-empty when the evaluation degenerated
};

/// Log marginal likelihood at exp(logp). A singular kernel (or log
/// parameters whose exponentials overflow) surfaces as a -inf sentinel with
/// diagnostics attached.
inline ObjectiveEval objective(const LogParams& logp, PriorFamily family,
                               const VelocityDataset& data) {
  try {
    const PriorSpec spec = PriorSpec::from_log(family, logp);
    return {log_marginal_likelihood(spec, data), {}};
  } catch (const SingularKernelError& e) {
    return {-std::numeric_limits<double>::infinity(), e.what()};
  } catch (const std::invalid_argument& e) {
    return {-std::numeric_limits<double>::infinity(), e.what()};
  }
}

/// Central finite differences of a scalar function of log parameters, one
/// coordinate at a time (10 evaluations).
template <class F>
std::array<double, 5> fd_gradient_of(const F& f, const LogParams& logp,
                                     double step = 1e-5) {
  std::array<double, 5> grad{};
  for (int i = 0; i < 5; ++i) {
    LogParams plus = logp;
    LogParams minus = logp;
    plus[i] += step;
    minus[i] -= step;
    const double fp = f(plus);
    const double fm = f(minus);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw GradientFailure(
          i, "fd_gradient: non-finite objective at coordinate " +
                 std::to_string(i));
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

inline std::array<double, 5> fd_gradient(const LogParams& logp,
                                         PriorFamily family,
                                         const VelocityDataset& data,
                                         double step = 1e-5) {
  return fd_gradient_of(
      [&](const LogParams& p) { return objective(p, family, data).value; },
      logp, step);
}

struct FitConfig {
  AdamConfig adam;
  int max_iters = 2000;
  double tol = 1e-4;
  double fd_step = 1e-5;
};

struct FitResult {
  PriorSpec spec;                 // exponentiated best-so-far parameters
  std::vector<double> lml_trace;  // trace[0] is the initial point
  int iterations = 0;
  bool converged = false;
};

/// Adam ascent on the log marginal likelihood until the trace changes by
/// less than tol between consecutive iterations (or max_iters). Deterministic
/// given inputs. Returns the best parameters seen, which is never worse than
/// the initial point.
inline FitResult fit(const LogParams& init, PriorFamily family,
                     const VelocityDataset& data, const FitConfig& cfg = {}) {
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("fit: tol must be > 0");
  data.validate();

  FitResult result;
  const ObjectiveEval first = objective(init, family, data);
  if (!std::isfinite(first.value))
    throw OptimizerDiverged({first.value},
                            "fit: objective non-finite at the initial point: " +
                                first.note);
  result.lml_trace.push_back(first.value);

  LogParams current = init;
  LogParams best = init;
  double best_lml = first.value;
  AdamState adam;
  int decline_run = 0;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const auto grad = fd_gradient(current, family, data, cfg.fd_step);
    current = adam_step(adam, cfg.adam, current, grad);
    const ObjectiveEval eval = objective(current, family, data);
    if (!std::isfinite(eval.value))
      throw OptimizerDiverged(result.lml_trace,
                              "fit: objective became non-finite at iteration " +
                                  std::to_string(iter) + ": " + eval.note);
    const double prev = result.lml_trace.back();
    result.lml_trace.push_back(eval.value);
    result.iterations = iter;

    if (eval.value > best_lml) {
      best_lml = eval.value;
      best = current;
    }
    decline_run = (eval.value < prev) ? decline_run + 1 : 0;
    if (decline_run >= 50)
      throw OptimizerDiverged(
          result.lml_trace,
          "fit: log marginal likelihood decreased for 50 consecutive steps");

    if (std::abs(eval.value - prev) < cfg.tol) {
      result.converged = true;
      break;
    }
  }

  result.spec = PriorSpec::from_log(family, best);
  return result;
}

}  // namespace helmgp
