/*
 Copyright 2026 The conic-newton Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef CONIC_NEWTON_NEWTON_HPP
#define CONIC_NEWTON_NEWTON_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "conic_newton/common.hpp"
#include "conic_newton/cone.hpp"
#include "conic_newton/linear_operator.hpp"

namespace conic {

struct NewtonConfig {
  double tol = 1e-5;
  long max_iter = 200;
  std::optional<Vector> x0;  // zero when absent
  bool use_pattern_stop = true;
  bool record_history = false;
  // Root used for ratio_estimates; the final iterate when absent.
  std::optional<Vector> reference;

  void validate(Index dim) const {
    if (!(tol > 0.0)) throw InvalidInput("tol must be positive");
    if (max_iter < 1) throw InvalidInput("max_iter must be at least 1");
    if (x0) require_dim(x0->size(), dim, "initial point");
    if (reference) require_dim(reference->size(), dim, "reference point");
  }
};

struct SolveReport {
  Vector solution;            // raw root x
  Vector projected_solution;  // P_K(x)
  long iterations = 0;
  std::vector<double> residuals;  // |F(x^k)|, k = 0..iterations
  std::vector<double> ratio_estimates;
  std::vector<Vector> iterates;       // only with record_history
  std::vector<long> least_squares_steps;  // iterations solved by pseudoinverse
  Termination termination = Termination::MaxIter;
  double wall_time_seconds = 0.0;
};

/// |M P_K(x) + T x - b|.
inline double residual(const ProjectionEquationProblem& p, const Eigen::Ref<const Vector>& x) {
  require_dim(x.size(), p.dim(), "residual");
  Vector px = project(p.cone, x);
  return (p.apply_coefficient(px) + p.T.apply(x) - p.b).norm();
}

namespace detail {

// Error ratios |x^{k+1}-ref| / |x^k-ref|; steps whose denominator is at
// round-off level carry no rate information and are dropped.
inline std::vector<double> error_ratios(const std::vector<Vector>& iterates, const Vector& ref) {
  std::vector<double> out;
  const double floor = 1e-9 * (1.0 + ref.norm());
  for (std::size_t k = 0; k + 1 < iterates.size(); ++k) {
    const double e0 = (iterates[k] - ref).norm();
    if (e0 <= floor) break;
    out.push_back((iterates[k + 1] - ref).norm() / e0);
  }
  return out;
}

}  // namespace detail

/// Semi-smooth Newton iteration (M V(x^k) + T) x^{k+1} = b.
///
/// Stops when the Jacobian pattern repeats and the residual confirms it, when
/// the residual drops below tol, or at max_iter. Near-singular systems are
/// solved in the least-squares sense; three consecutive such steps without
/// residual decrease end the run with SingularSystem.
inline SolveReport solve(const ProjectionEquationProblem& p, const NewtonConfig& cfg) {
  const Index n = p.dim();
  cfg.validate(n);
  const auto start = std::chrono::steady_clock::now();

  const Matrix t_dense = p.T.materialize();
  const std::optional<Matrix> m_dense =
      p.projection_coefficient ? std::optional<Matrix>(p.projection_coefficient->materialize()) : std::nullopt;
  const double b_norm = p.b.norm();
  const double confirm_tol = std::max(cfg.tol, 1e-9 * (1.0 + b_norm));
  const double blowup = 1e12 * (1.0 + b_norm);

  SolveReport rep;
  Vector x = cfg.x0 ? *cfg.x0 : Vector::Zero(n);
  if (!x.allFinite()) throw InvalidInput("initial point has non-finite entries");
  JacobianElement jac = jacobian_element(p.cone, x);
  double r = residual(p, x);
  rep.residuals.push_back(r);
  if (cfg.record_history) rep.iterates.push_back(x);

  auto finish = [&](Termination t) {
    rep.termination = t;
    rep.solution = x;
    rep.projected_solution = project(p.cone, x);
    if (cfg.record_history) rep.ratio_estimates = detail::error_ratios(rep.iterates, cfg.reference ? *cfg.reference : x);
    rep.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
  };

  if (r <= cfg.tol) return finish(Termination::ResidualTol);

  int stalled_ls = 0;
  for (long k = 1; k <= cfg.max_iter; ++k) {
    const Matrix v = jac.materialize();
    const Matrix sys = (m_dense ? Matrix(*m_dense * v) : v) + t_dense;

    Vector x_new;
    bool least_squares = false;
    Eigen::PartialPivLU<Matrix> lu(sys);
    // The rcond estimate is unreliable at exact singularity; the pivots are not.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (lu.rcond() > 1e-14 && pivots.minCoeff() > 1e-14 * pivots.maxCoeff()) x_new = lu.solve(p.b);
    if (x_new.size() == 0 || !x_new.allFinite()) {
      least_squares = true;
      x_new = Eigen::CompleteOrthogonalDecomposition<Matrix>(sys).solve(p.b);
      rep.least_squares_steps.push_back(k);
    }
    if (!x_new.allFinite()) throw NumericalFailure("non-finite Newton iterate", k);
    if (x_new.norm() > blowup) throw NumericalFailure("Newton iterates diverged", k);

    JacobianElement jac_new = jacobian_element(p.cone, x_new);
    const double r_new = residual(p, x_new);
    rep.iterations = k;
    rep.residuals.push_back(r_new);
    if (cfg.record_history) rep.iterates.push_back(x_new);

    const bool repeated = cfg.use_pattern_stop && jac_new.pattern_key() == jac.pattern_key();
    const bool improved = r_new < r;
    x = std::move(x_new);
    jac = std::move(jac_new);
    r = r_new;

    if (repeated && r <= confirm_tol) return finish(Termination::PatternRepeat);
    if (r <= cfg.tol) return finish(Termination::ResidualTol);
    if (least_squares) {
      stalled_ls = improved ? 0 : stalled_ls + 1;
      if (stalled_ls >= 3) return finish(Termination::SingularSystem);
    } else {
      stalled_ls = 0;
    }
  }
  return finish(Termination::MaxIter);
}

/// Per-step error ratios of a Newton run against a verified root.
inline std::vector<double> measure_ratios(const ProjectionEquationProblem& p, NewtonConfig cfg,
                                          const Vector& reference) {
  require_dim(reference.size(), p.dim(), "measure_ratios reference");
  const double r = residual(p, reference);
  if (!(r <= 1e-10 * (1.0 + p.b.norm()))) {
    throw InvalidInput("reference point is not a root (residual " + std::to_string(r) + ")");
  }
  cfg.record_history = true;
  cfg.reference = reference;
  return solve(p, cfg).ratio_estimates;
}

}  // namespace conic

#endif  // CONIC_NEWTON_NEWTON_HPP
