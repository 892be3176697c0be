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

#ifndef CONIC_NEWTON_QCP_HPP
#define CONIC_NEWTON_QCP_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "conic_newton/cone.hpp"
#include "conic_newton/linear_operator.hpp"
#include "conic_newton/newton.hpp"

namespace conic {

struct EqualityConstraints {
  Matrix A;
  Vector b;
};

/// min 1/2 <x, Qx> + <q, x>  s.t.  x in K  (and A x = b when equality is set).
struct QcpProblem {
  LinearOperator Q;
  Vector q;
  ConeSpec cone;
  std::optional<EqualityConstraints> equality;

  QcpProblem(LinearOperator q_op, Vector lin, ConeSpec k, std::optional<EqualityConstraints> eq = std::nullopt)
      : Q(std::move(q_op)), q(std::move(lin)), cone(std::move(k)), equality(std::move(eq)) {
    const Index n = cone.ambient_dim();
    require_dim(Q.dim(), n, "QcpProblem Q");
    require_dim(q.size(), n, "QcpProblem q");
    if (equality) {
      require_dim(equality->A.cols(), n, "QcpProblem A columns");
      require_dim(equality->b.size(), equality->A.rows(), "QcpProblem b_eq");
    }
  }

  Index dim() const { return cone.ambient_dim(); }
  Index num_equalities() const { return equality ? equality->A.rows() : 0; }
};

struct KktPoint {
  Vector x;
  std::optional<Vector> lambda;
  Vector mu;  // Q x + q + A^T lambda
  bool verified = true;
  long multiplier_rounds = 0;  // outer rounds of the equality fallback, 0 if unused
};

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  double equality = 0.0;

  double max() const { return std::max({primal, dual, complementarity, equality}); }
};

/// Reduces the program to (Mq - Id) P(z) + z = (-q, b) with z = x or (x, lambda):
/// M = Q - Id without equalities, M = [[Q, A^T], [A, 0]] - Id on K x R^m with them.
inline ProjectionEquationProblem to_projection_equation(const QcpProblem& p) {
  if (!p.equality) {
    return ProjectionEquationProblem(p.cone, LinearOperator::identity(p.dim()), -p.q,
                                     LinearOperator::shifted(p.Q.materialize()));
  }
  const Index n = p.dim(), m = p.num_equalities();
  Vector rhs(n + m);
  rhs << -p.q, p.equality->b;
  return ProjectionEquationProblem(ConeSpec::product({p.cone, ConeSpec::free(m)}),
                                   LinearOperator::identity(n + m), std::move(rhs),
                                   LinearOperator::augmented_kkt(p.Q.materialize(), p.equality->A));
}

inline Vector kkt_multiplier(const QcpProblem& p, const Vector& x, const std::optional<Vector>& lambda) {
  Vector mu = p.Q.apply(x) + p.q;
  if (p.equality) {
    if (!lambda) throw InvalidInput("equality-constrained KKT point needs lambda");
    mu += p.equality->A.transpose() * *lambda;
  }
  return mu;
}

inline KktResiduals kkt_residuals(const QcpProblem& p, const KktPoint& k) {
  require_dim(k.x.size(), p.dim(), "KktPoint x");
  require_dim(k.mu.size(), p.dim(), "KktPoint mu");
  KktResiduals r;
  r.primal = (k.x - project(p.cone, k.x)).norm();
  r.dual = (k.mu - project_dual(p.cone, k.mu)).norm();
  r.complementarity = std::abs(k.mu.dot(k.x));
  if (p.equality) {
    if (!k.lambda) throw InvalidInput("equality-constrained KKT point needs lambda");
    require_dim(k.lambda->size(), p.num_equalities(), "KktPoint lambda");
    r.equality = (p.equality->A * k.x - p.equality->b).norm();
  }
  return r;
}

/// Largest of the primal-cone, dual-cone, complementarity and equality residuals.
inline double kkt_residual(const QcpProblem& p, const KktPoint& k) { return kkt_residuals(p, k).max(); }

namespace detail {

inline KktPoint kkt_point_from_root(const QcpProblem& p, const SolveReport& rep) {
  KktPoint k;
  k.x = rep.projected_solution.head(p.dim());
  if (p.equality) k.lambda = rep.solution.tail(p.num_equalities());
  k.mu = kkt_multiplier(p, k.x, k.lambda);
  k.verified = converged(rep.termination);
  return k;
}

/// Method of multipliers on K: each round solves the equality-free program with
/// Q + rho A^T A and linear term q + A^T lambda - rho A^T b, then updates lambda.
/// Returns the start (x - mu, lambda) for the augmented equation, or nothing.
inline std::optional<Vector> multiplier_start(const QcpProblem& p, const NewtonConfig& cfg, long& rounds) {
  constexpr double rho = 10.0;
  constexpr long max_rounds = 200;
  const Matrix& a = p.equality->A;
  const Vector& b = p.equality->b;
  const Matrix q_aug = p.Q.materialize() + rho * a.transpose() * a;
  Vector lambda = Vector::Zero(a.rows());
  Vector z = unit_point(p.cone);
  Vector x;
  NewtonConfig inner = cfg;
  inner.record_history = false;
  for (rounds = 1; rounds <= max_rounds; ++rounds) {
    const QcpProblem sub(LinearOperator::dense(q_aug), p.q + a.transpose() * (lambda - rho * b), p.cone);
    inner.x0 = z;
    const SolveReport r = solve(to_projection_equation(sub), inner);
    if (!converged(r.termination)) return std::nullopt;
    z = r.solution;
    x = r.projected_solution;
    lambda += rho * (a * x - b);
    if ((a * x - b).norm() <= cfg.tol * (1.0 + b.norm())) break;
  }
  Vector start(p.dim() + p.num_equalities());
  start << x - kkt_multiplier(p, x, lambda), lambda;
  return start;
}

}  // namespace detail

/// Solves the reduced projection equation and maps its root z to the KKT
/// point x = P_K(z_x), lambda = z_lambda. The default start is the interior
/// unit point of the cone, where the augmented Newton matrix is the classical
/// KKT matrix. With equalities the augmented matrix can turn singular when the
/// active face cannot meet Ax = b; a run that stops unconverged is restarted
/// from a method-of-multipliers point.
inline std::pair<KktPoint, SolveReport> solve_qcp(const QcpProblem& p, NewtonConfig cfg) {
  const ProjectionEquationProblem pe = to_projection_equation(p);
  if (!cfg.x0) cfg.x0 = unit_point(pe.cone);
  SolveReport rep = solve(pe, cfg);
  if (!p.equality || converged(rep.termination)) return {detail::kkt_point_from_root(p, rep), std::move(rep)};

  long rounds = 0;
  const auto start = detail::multiplier_start(p, cfg, rounds);
  if (!start) return {detail::kkt_point_from_root(p, rep), std::move(rep)};
  NewtonConfig polish = cfg;
  polish.x0 = *start;
  SolveReport second = solve(pe, polish);
  second.wall_time_seconds += rep.wall_time_seconds;
  KktPoint k = detail::kkt_point_from_root(p, second);
  k.multiplier_rounds = rounds;
  return {std::move(k), std::move(second)};
}

/// Root of the reduced equation for a KKT point: (x - mu, lambda).
inline Vector embed_kkt(const QcpProblem& p, const KktPoint& k, double tol = 1e-9) {
  const KktResiduals r = kkt_residuals(p, k);
  const double scale = 1.0 + k.x.norm() + k.mu.norm();
  if (!(r.max() <= tol * scale)) {
    throw InvalidInput("point violates the KKT conditions (residual " + std::to_string(r.max()) + ")");
  }
  if (!((k.mu - kkt_multiplier(p, k.x, k.lambda)).norm() <= tol * scale)) {
    throw InvalidInput("mu is not Q x + q + A^T lambda");
  }
  const Index n = p.dim(), m = p.num_equalities();
  Vector z(n + m);
  z.head(n) = k.x - k.mu;
  if (m > 0) z.tail(m) = *k.lambda;
  return z;
}

}  // namespace conic

#endif  // CONIC_NEWTON_QCP_HPP
