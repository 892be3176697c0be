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

#ifndef CONIC_NEWTON_LINEAR_OPERATOR_HPP
#define CONIC_NEWTON_LINEAR_OPERATOR_HPP

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "conic_newton/common.hpp"
#include "conic_newton/cone.hpp"

namespace conic {

/// Linear map on the ambient coordinate space.
class LinearOperator {
 public:
  struct Dense {
    Matrix m;
  };
  struct ScaledIdentity {
    double c;
    Index dim;
  };
  // Q - Id
  struct ShiftedDense {
    Matrix q;
  };
  // [[Q, A^T], [A, 0]] - Id on (x, lambda)
  struct AugmentedKkt {
    Matrix q;
    Matrix a;
  };
  using Form = std::variant<Dense, ScaledIdentity, ShiftedDense, AugmentedKkt>;

  static LinearOperator dense(Matrix m) {
    if (m.rows() != m.cols()) throw InvalidInput("linear operator must be square");
    return LinearOperator(Dense{std::move(m)});
  }
  static LinearOperator scaled_identity(double c, Index dim) {
    if (dim < 1) throw InvalidInput("operator dimension must be positive");
    return LinearOperator(ScaledIdentity{c, dim});
  }
  static LinearOperator identity(Index dim) { return scaled_identity(1.0, dim); }
  static LinearOperator shifted(Matrix q) {
    if (q.rows() != q.cols()) throw InvalidInput("Q must be square");
    return LinearOperator(ShiftedDense{std::move(q)});
  }
  static LinearOperator augmented_kkt(Matrix q, Matrix a) {
    if (q.rows() != q.cols()) throw InvalidInput("Q must be square");
    if (a.cols() != q.rows()) throw InvalidInput("A must have as many columns as Q");
    return LinearOperator(AugmentedKkt{std::move(q), std::move(a)});
  }

  const Form& form() const { return form_; }

  Index dim() const {
    return std::visit(
        [](const auto& f) -> Index {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Dense>) return f.m.rows();
          if constexpr (std::is_same_v<F, ScaledIdentity>) return f.dim;
          if constexpr (std::is_same_v<F, ShiftedDense>) return f.q.rows();
          if constexpr (std::is_same_v<F, AugmentedKkt>) return f.q.rows() + f.a.rows();
        },
        form_);
  }

  Vector apply(const Eigen::Ref<const Vector>& x) const {
    require_dim(x.size(), dim(), "LinearOperator::apply");
    return std::visit(
        [&](const auto& f) -> Vector {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Dense>) return f.m * x;
          if constexpr (std::is_same_v<F, ScaledIdentity>) return f.c * x;
          if constexpr (std::is_same_v<F, ShiftedDense>) return f.q * x - x;
          if constexpr (std::is_same_v<F, AugmentedKkt>) {
            const Index n = f.q.rows(), m = f.a.rows();
            Vector y(n + m);
            y.head(n) = f.q * x.head(n) + f.a.transpose() * x.tail(m) - x.head(n);
            y.tail(m) = f.a * x.head(n) - x.tail(m);
            return y;
          }
        },
        form_);
  }

  Vector apply_adjoint(const Eigen::Ref<const Vector>& x) const {
    require_dim(x.size(), dim(), "LinearOperator::apply_adjoint");
    return std::visit(
        [&](const auto& f) -> Vector {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Dense>) return f.m.transpose() * x;
          if constexpr (std::is_same_v<F, ScaledIdentity>) return f.c * x;
          if constexpr (std::is_same_v<F, ShiftedDense>) return f.q.transpose() * x - x;
          if constexpr (std::is_same_v<F, AugmentedKkt>) {
            const Index n = f.q.rows(), m = f.a.rows();
            Vector y(n + m);
            y.head(n) = f.q.transpose() * x.head(n) + f.a.transpose() * x.tail(m) - x.head(n);
            y.tail(m) = f.a * x.head(n) - x.tail(m);
            return y;
          }
        },
        form_);
  }

  Matrix materialize() const {
    return std::visit(
        [](const auto& f) -> Matrix {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Dense>) return f.m;
          if constexpr (std::is_same_v<F, ScaledIdentity>) return f.c * Matrix::Identity(f.dim, f.dim);
          if constexpr (std::is_same_v<F, ShiftedDense>) return f.q - Matrix::Identity(f.q.rows(), f.q.cols());
          if constexpr (std::is_same_v<F, AugmentedKkt>) {
            const Index n = f.q.rows(), m = f.a.rows();
            Matrix out = Matrix::Zero(n + m, n + m);
            out.topLeftCorner(n, n) = f.q;
            out.topRightCorner(n, m) = f.a.transpose();
            out.bottomLeftCorner(m, n) = f.a;
            out -= Matrix::Identity(n + m, n + m);
            return out;
          }
        },
        form_);
  }

 private:
  explicit LinearOperator(Form f) : form_(std::move(f)) {}
  Form form_;
};

/// F(x) = M P_K(x) + T x - b.
///
/// The coefficient M on the projection is absent (identity) for the plain
/// projection equation; quadratic conic programs set M = Q - Id (or the
/// augmented KKT block minus Id) and T = Id.
struct ProjectionEquationProblem {
  ConeSpec cone;
  LinearOperator T;
  Vector b;
  std::optional<LinearOperator> projection_coefficient;

  ProjectionEquationProblem(ConeSpec k, LinearOperator t, Vector rhs,
                            std::optional<LinearOperator> m = std::nullopt)
      : cone(std::move(k)), T(std::move(t)), b(std::move(rhs)), projection_coefficient(std::move(m)) {
    const Index n = cone.ambient_dim();
    require_dim(T.dim(), n, "ProjectionEquationProblem operator");
    require_dim(b.size(), n, "ProjectionEquationProblem right-hand side");
    if (projection_coefficient) require_dim(projection_coefficient->dim(), n, "projection coefficient");
    if (!b.allFinite()) throw InvalidInput("right-hand side has non-finite entries");
  }

  Index dim() const { return cone.ambient_dim(); }

  Vector apply_coefficient(const Vector& v) const {
    return projection_coefficient ? projection_coefficient->apply(v) : v;
  }
};

// ---------------------------------------------------------------------------
// Guarantee analysis

enum class Guarantee { None, ExistenceUniqueness, QLinear };

inline const char* to_string(Guarantee g) {
  switch (g) {
    case Guarantee::None:
      return "None";
    case Guarantee::ExistenceUniqueness:
      return "ExistenceUniqueness";
    case Guarantee::QLinear:
      return "QLinear";
  }
  return "?";
}

inline Guarantee guarantee_from_string(const std::string& s) {
  if (s == "None") return Guarantee::None;
  if (s == "ExistenceUniqueness") return Guarantee::ExistenceUniqueness;
  if (s == "QLinear") return Guarantee::QLinear;
  throw InvalidInput("unknown guarantee '" + s + "'");
}

struct GuaranteeReport {
  bool invertible = false;
  std::optional<double> norm_T_inv;
  std::optional<double> norm_q_minus_id;  // set by analyze_qcp_operator only
  bool is_positive_definite = false;
  Guarantee guarantee = Guarantee::None;
  std::optional<double> predicted_ratio;  // present iff guarantee == QLinear

  friend bool operator==(const GuaranteeReport&, const GuaranteeReport&) = default;

  std::string summary() const {
    std::string s = std::string("guarantee=") + to_string(guarantee);
    if (predicted_ratio) s += " ratio=" + std::to_string(*predicted_ratio);
    s += invertible ? " invertible" : " singular";
    if (norm_T_inv) s += " |T^-1|=" + std::to_string(*norm_T_inv);
    if (norm_q_minus_id) s += " |Q-Id|=" + std::to_string(*norm_q_minus_id);
    s += is_positive_definite ? " pd" : " not-pd";
    return s;
  }
};

namespace detail {

inline void require_finite_square(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("operator must be square");
  if (!m.allFinite()) throw InvalidInput("operator has non-finite entries");
}

inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

// <Tx, x> > 0 depends only on the symmetric part.
inline bool positive_definite(const Matrix& m) {
  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) > 1e-10 * (1.0 + spectral_norm(m));
}

// Returns |M^{-1}| or nullopt when M is numerically singular.
inline std::optional<double> inverse_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 1e-14 * s(0))) return std::nullopt;
  return 1.0 / smin;
}

}  // namespace detail

/// Checks the sufficient conditions for P_K(x) + T x = b: positive definite T
/// with |T^-1| < 1 gives Q-linear rate |T^-1|; otherwise |T^-1| < 1/2 gives
/// rate |T^-1|/(1-|T^-1|); |T^-1| < 1 alone gives existence and uniqueness.
inline GuaranteeReport analyze(const LinearOperator& t) {
  GuaranteeReport r;
  if (const auto* si = std::get_if<LinearOperator::ScaledIdentity>(&t.form())) {
    if (!std::isfinite(si->c)) throw InvalidInput("operator has non-finite entries");
    r.invertible = si->c != 0.0;
    if (r.invertible) r.norm_T_inv = 1.0 / std::abs(si->c);
    r.is_positive_definite = si->c > 1e-10 * (1.0 + std::abs(si->c));
  } else {
    const Matrix m = t.materialize();
    detail::require_finite_square(m);
    r.norm_T_inv = detail::inverse_norm(m);
    r.invertible = r.norm_T_inv.has_value();
    r.is_positive_definite = detail::positive_definite(m);
  }
  if (r.norm_T_inv) {
    const double ni = *r.norm_T_inv;
    if (r.is_positive_definite && ni < 1.0) {
      r.guarantee = Guarantee::QLinear;
      r.predicted_ratio = ni;
    } else if (ni < 0.5) {
      r.guarantee = Guarantee::QLinear;
      r.predicted_ratio = ni / (1.0 - ni);
    } else if (ni < 1.0) {
      r.guarantee = Guarantee::ExistenceUniqueness;
    }
  }
  return r;
}

/// Same report for the quadratic-program form (Q - Id) P_K(x) + x = -q,
/// judged on |Q - Id| and, for existence only, |Q^-1 - Id|.
inline GuaranteeReport analyze_qcp_operator(const LinearOperator& q_op) {
  const Matrix q = q_op.materialize();
  detail::require_finite_square(q);
  const Index n = q.rows();
  const Matrix id = Matrix::Identity(n, n);

  GuaranteeReport r;
  r.is_positive_definite = detail::positive_definite(q);
  const auto q_inv_norm = detail::inverse_norm(q);
  r.invertible = q_inv_norm.has_value();
  r.norm_T_inv = q_inv_norm;
  const double shift = detail::spectral_norm(q - id);
  r.norm_q_minus_id = shift;

  if (r.is_positive_definite && shift < 1.0) {
    r.guarantee = Guarantee::QLinear;
    r.predicted_ratio = shift;
  } else if (shift < 0.5) {
    r.guarantee = Guarantee::QLinear;
    r.predicted_ratio = shift / (1.0 - shift);
  } else if (shift < 1.0) {
    r.guarantee = Guarantee::ExistenceUniqueness;
  } else if (r.invertible && detail::spectral_norm(q.inverse() - id) < 1.0) {
    r.guarantee = Guarantee::ExistenceUniqueness;
  }
  return r;
}

}  // namespace conic

#endif  // CONIC_NEWTON_LINEAR_OPERATOR_HPP
