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

// Random inputs and independent oracles shared by the unit tests and the
// acceptance runner.

#ifndef CONIC_NEWTON_TESTS_SUPPORT_HPP
#define CONIC_NEWTON_TESTS_SUPPORT_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "conic_newton/bench.hpp"
#include "conic_newton/cone.hpp"
#include "conic_newton/qcp.hpp"

namespace conic::testing {

using bench::Rng;

inline Vector gaussian(Rng& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

/// Cones exercised by the property suites, labelled for reporting.
struct NamedCone {
  std::string name;
  ConeSpec cone;
};

inline std::vector<NamedCone> sample_cones() {
  return {{"orthant", ConeSpec::orthant(6)},
          {"soc", ConeSpec::second_order(5)},
          {"psd", ConeSpec::psd(4)},
          {"product", ConeSpec::product({ConeSpec::orthant(2), ConeSpec::second_order(3), ConeSpec::psd(2)})}};
}

/// Random point whose leaves sit on different sides of their cones: some
/// SOC leaves interior, some polar, most mixed.
inline Vector random_point(Rng& rng, const ConeSpec& cone) {
  Vector x = gaussian(rng, cone.ambient_dim(), 2.0);
  for_each_leaf(cone, [&](Index off, const ConeSpec& leaf) {
    if (leaf.kind() == ConeKind::SecondOrder) {
      const double u = rng.uniform(0.0, 1.0);
      const double r = x.segment(off + 1, leaf.ambient_dim() - 1).norm();
      if (u < 0.25) x[off] = r + rng.uniform(0.0, 2.0);
      else if (u < 0.5) x[off] = -r - rng.uniform(0.0, 2.0);
    }
  });
  return x;
}

/// Random point at which the projection is smooth with margin 0.1.
inline Vector separated_point(Rng& rng, const ConeSpec& cone) {
  Vector x(cone.ambient_dim());
  for_each_leaf(cone, [&](Index off, const ConeSpec& leaf) {
    const Index d = leaf.ambient_dim();
    switch (leaf.kind()) {
      case ConeKind::Orthant:
        for (Index i = 0; i < d; ++i) {
          const double m = rng.uniform(0.2, 2.0);
          x[off + i] = rng.uniform(0.0, 1.0) < 0.5 ? m : -m;
        }
        break;
      case ConeKind::SecondOrder: {
        Vector bar = gaussian(rng, d - 1);
        const double r = bar.norm();
        const double u = rng.uniform(0.0, 1.0);
        double x0;
        if (u < 0.2) x0 = r + rng.uniform(0.2, 1.0);
        else if (u < 0.4) x0 = -r - rng.uniform(0.2, 1.0);
        else x0 = rng.uniform(-1.0, 1.0) * std::max(0.0, r - 0.2);
        if (std::abs(std::abs(x0) - r) <= 0.1) x0 = 0.0;
        x[off] = x0;
        x.segment(off + 1, d - 1) = bar;
        break;
      }
      case ConeKind::Psd: {
        const Index n = leaf.size();
        Matrix g(n, n);
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j) g(i, j) = rng.normal();
        Eigen::HouseholderQR<Matrix> qr(g);
        const Matrix u = qr.householderQ();
        Vector lam(n);
        for (Index i = 0; i < n; ++i) {
          const double m = 0.3 + 0.4 * static_cast<double>(i) + rng.uniform(0.0, 0.1);
          lam[i] = rng.uniform(0.0, 1.0) < 0.5 ? m : -m;
        }
        x.segment(off, d) = svec(u * lam.asDiagonal() * u.transpose());
        break;
      }
      default:
        x.segment(off, d) = gaussian(rng, d);
    }
  });
  return x;
}

/// Central differences of the projection.
inline Matrix finite_difference_jacobian(const ConeSpec& cone, const Vector& x, double h = 1e-6) {
  const Index n = x.size();
  Matrix j(n, n);
  for (Index c = 0; c < n; ++c) {
    Vector xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    j.col(c) = (project(cone, xp) - project(cone, xm)) / (2.0 * h);
  }
  return j;
}

/// Projection onto the 3-dimensional second-order cone by direct search over
/// boundary rays; independent of the closed form.
inline Vector soc3_projection_by_search(const Vector& x, int rays = 200000) {
  const double r = std::hypot(x[1], x[2]);
  if (r <= x[0]) return x;
  Vector best = Vector::Zero(3);
  double best_dist = x.norm();
  for (int k = 0; k < rays; ++k) {
    const double th = 2.0 * std::numbers::pi * k / rays;
    Vector w(3);
    w << 1.0, std::cos(th), std::sin(th);
    w /= std::sqrt(2.0);
    const Vector y = std::max(0.0, x.dot(w)) * w;
    const double dist = (x - y).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = y;
    }
  }
  return best;
}

/// Problem with a known root: b = P(xhat) + c xhat.
inline ProjectionEquationProblem constructed_problem(const ConeSpec& cone, double c, const Vector& xhat) {
  return ProjectionEquationProblem(cone, LinearOperator::scaled_identity(c, xhat.size()),
                                   project(cone, xhat) + c * xhat);
}

/// Random symmetric positive definite Q with spectrum in [lo, hi].
inline Matrix random_spd(Rng& rng, Index n, double lo, double hi) {
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix u = qr.householderQ();
  Vector lam(n);
  for (Index i = 0; i < n; ++i) lam[i] = rng.uniform(lo, hi);
  return u * lam.asDiagonal() * u.transpose();
}

/// Random conic QP; with equalities, b_eq = A x_feas for an interior x_feas
/// so the feasible set has nonempty interior.
inline QcpProblem random_qcp(Rng& rng, const ConeSpec& cone, bool with_equality) {
  const Index n = cone.ambient_dim();
  const Matrix q = random_spd(rng, n, 0.6, 1.4);
  const Vector lin = gaussian(rng, n);
  if (!with_equality) return QcpProblem(LinearOperator::dense(q), lin, cone);
  const Index m = std::max<Index>(1, n / 3);
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  const Vector feas = unit_point(cone);
  return QcpProblem(LinearOperator::dense(q), lin, cone, EqualityConstraints{a, a * feas});
}

}  // namespace conic::testing

#endif  // CONIC_NEWTON_TESTS_SUPPORT_HPP
