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

#ifndef CONIC_NEWTON_CONE_HPP
#define CONIC_NEWTON_CONE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "conic_newton/common.hpp"

namespace conic {

enum class ConeKind { Orthant, SecondOrder, Psd, Product, Free };

/// A closed convex cone in a Euclidean coordinate space.
///
/// PSD cones of order n live in n(n+1)/2 coordinates (scaled symmetric
/// vectorization, see svec()). Free(m) is the whole space R^m; it is used as
/// the multiplier factor of an equality-constrained problem.
class ConeSpec {
 public:
  static ConeSpec orthant(Index n) { return ConeSpec(ConeKind::Orthant, n, n); }
  static ConeSpec second_order(Index n) { return ConeSpec(ConeKind::SecondOrder, n, n); }
  static ConeSpec psd(Index order) { return ConeSpec(ConeKind::Psd, order, order * (order + 1) / 2); }
  static ConeSpec free(Index m) {
    if (m < 0) throw InvalidInput("free space dimension must be nonnegative");
    ConeSpec c(ConeKind::Free, 1, m);
    c.size_ = m;
    return c;
  }
  static ConeSpec product(std::vector<ConeSpec> parts) {
    if (parts.empty()) throw InvalidInput("product cone needs at least one component");
    ConeSpec c;
    c.kind_ = ConeKind::Product;
    c.dim_ = 0;
    for (const auto& p : parts) c.dim_ += p.ambient_dim();
    c.size_ = static_cast<Index>(parts.size());
    c.parts_ = std::move(parts);
    return c;
  }

  ConeKind kind() const { return kind_; }
  Index ambient_dim() const { return dim_; }
  // Orthant/SOC/Free: coordinate count. PSD: matrix order. Product: number of parts.
  Index size() const { return size_; }
  const std::vector<ConeSpec>& components() const { return parts_; }

  std::string describe() const {
    switch (kind_) {
      case ConeKind::Orthant:
        return "orthant:" + std::to_string(size_);
      case ConeKind::SecondOrder:
        return "soc:" + std::to_string(size_);
      case ConeKind::Psd:
        return "psd:" + std::to_string(size_);
      case ConeKind::Free:
        return "free:" + std::to_string(size_);
      case ConeKind::Product: {
        std::string s;
        for (const auto& p : parts_) {
          if (!s.empty()) s += ",";
          s += p.describe();
        }
        return s;
      }
    }
    return {};
  }

  friend bool operator==(const ConeSpec& a, const ConeSpec& b) {
    return a.kind_ == b.kind_ && a.size_ == b.size_ && a.dim_ == b.dim_ && a.parts_ == b.parts_;
  }

 private:
  ConeSpec() = default;
  ConeSpec(ConeKind kind, Index size, Index dim) : kind_(kind), size_(size), dim_(dim) {
    if (size < 1) throw InvalidInput("cone dimension must be positive");
  }

  ConeKind kind_ = ConeKind::Orthant;
  Index size_ = 0;
  Index dim_ = 0;
  std::vector<ConeSpec> parts_;
};

// Visits every non-product leaf with its coordinate offset.
inline void for_each_leaf(const ConeSpec& cone, const std::function<void(Index, const ConeSpec&)>& fn,
                          Index offset = 0) {
  if (cone.kind() != ConeKind::Product) {
    fn(offset, cone);
    return;
  }
  for (const auto& part : cone.components()) {
    for_each_leaf(part, fn, offset);
    offset += part.ambient_dim();
  }
}

// ---------------------------------------------------------------------------
// Scaled symmetric vectorization.
//
// Column-major lower triangle; off-diagonal entries carry a factor sqrt(2) so
// that svec(A).dot(svec(B)) == trace(A*B).

inline Index svec_size(Index order) { return order * (order + 1) / 2; }

inline Index svec_order(Index size) {
  auto n = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(size) + 1.0) - 1.0) / 2.0));
  if (svec_size(n) != size) throw InvalidInput("length " + std::to_string(size) + " is not a triangular number");
  return n;
}

inline Vector svec(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("svec: matrix must be square");
  const Index n = m.rows();
  const double r2 = std::sqrt(2.0);
  Vector v(svec_size(n));
  Index k = 0;
  for (Index col = 0; col < n; ++col) {
    v[k++] = m(col, col);
    for (Index row = col + 1; row < n; ++row) v[k++] = r2 * m(row, col);
  }
  return v;
}

inline Matrix smat(const Eigen::Ref<const Vector>& v) {
  const Index n = svec_order(v.size());
  const double r2 = std::sqrt(2.0);
  Matrix m(n, n);
  Index k = 0;
  for (Index col = 0; col < n; ++col) {
    m(col, col) = v[k++];
    for (Index row = col + 1; row < n; ++row) {
      m(row, col) = v[k] / r2;
      m(col, row) = m(row, col);
      ++k;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

/// X = U diag(values) U^T with values sorted in descending order.
struct SpectralDecomposition {
  Matrix vectors;
  Vector values;

  Matrix reconstruct() const { return vectors * values.asDiagonal() * vectors.transpose(); }
  Matrix positive_part() const {
    return vectors * values.cwiseMax(0.0).asDiagonal() * vectors.transpose();
  }
};

inline SpectralDecomposition spectral_decomposition(const Matrix& sym) {
  if (sym.rows() != sym.cols()) throw InvalidInput("spectral decomposition needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolver did not converge", 0);
  SpectralDecomposition out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

inline Matrix project_psd_matrix(const Matrix& sym) { return spectral_decomposition(sym).positive_part(); }

// ---------------------------------------------------------------------------
// Projection

namespace detail {

inline void project_soc(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) {
  const double x0 = x[0];
  const double r = x.tail(x.size() - 1).norm();
  if (r <= x0) {
    out = x;
  } else if (r <= -x0) {
    out.setZero();
  } else {
    const double a = 0.5 * (x0 + r);
    out[0] = a;
    out.tail(x.size() - 1) = (a / r) * x.tail(x.size() - 1);
  }
}

}  // namespace detail

/// Euclidean projection onto the cone.
inline Vector project(const ConeSpec& cone, const Eigen::Ref<const Vector>& x) {
  require_dim(x.size(), cone.ambient_dim(), "project");
  Vector out(x.size());
  for_each_leaf(cone, [&](Index off, const ConeSpec& leaf) {
    const Index d = leaf.ambient_dim();
    auto xi = x.segment(off, d);
    auto oi = out.segment(off, d);
    switch (leaf.kind()) {
      case ConeKind::Orthant:
        oi = xi.cwiseMax(0.0);
        break;
      case ConeKind::SecondOrder:
        detail::project_soc(xi, oi);
        break;
      case ConeKind::Psd:
        oi = svec(project_psd_matrix(smat(xi)));
        break;
      case ConeKind::Free:
        oi = xi;
        break;
      case ConeKind::Product:
        break;
    }
  });
  return out;
}

/// Projection onto the dual cone. Orthant, SOC and PSD are self-dual; the dual
/// of a free factor is {0}.
inline Vector project_dual(const ConeSpec& cone, const Eigen::Ref<const Vector>& x) {
  require_dim(x.size(), cone.ambient_dim(), "project_dual");
  Vector out = project(cone, x);
  for_each_leaf(cone, [&](Index off, const ConeSpec& leaf) {
    if (leaf.kind() == ConeKind::Free) out.segment(off, leaf.ambient_dim()).setZero();
  });
  return out;
}

inline bool membership(const ConeSpec& cone, const Eigen::Ref<const Vector>& x, double tol) {
  require_dim(x.size(), cone.ambient_dim(), "membership");
  if (tol < 0) throw InvalidInput("membership tolerance must be nonnegative");
  return (x - project(cone, x)).norm() <= tol * (1.0 + x.norm());
}

/// A point in the interior of the cone (zero on free factors).
inline Vector unit_point(const ConeSpec& cone) {
  Vector e = Vector::Zero(cone.ambient_dim());
  for_each_leaf(cone, [&](Index off, const ConeSpec& leaf) {
    switch (leaf.kind()) {
      case ConeKind::Orthant:
        e.segment(off, leaf.ambient_dim()).setOnes();
        break;
      case ConeKind::SecondOrder:
        e[off] = 1.0;
        break;
      case ConeKind::Psd:
        e.segment(off, leaf.ambient_dim()) = svec(Matrix::Identity(leaf.size(), leaf.size()));
        break;
      default:
        break;
    }
  });
  return e;
}

// ---------------------------------------------------------------------------
// Generalized Jacobian elements

/// Discrete signature of a Jacobian element; equal keys mean the same
/// activity pattern (orthant activity set, SOC region, PSD eigenvalue signs).
using PatternKey = std::vector<std::int8_t>;

enum class SocRegion : std::int8_t { Interior = 0, Polar = 1, Boundary = 2 };

struct OrthantBlock {
  Vector active;  // 0/1
};

struct SocBlock {
  SocRegion region = SocRegion::Interior;
  double x0 = 0.0;
  double radius = 0.0;  // |xbar|
  Vector direction;     // xbar / |xbar| when region == Boundary
};

struct PsdBlock {
  SpectralDecomposition spectrum;
  Matrix omega;
};

struct IdentityBlock {};

/// One element V(x) of the Clarke generalized Jacobian of the projection,
/// held in structured per-leaf form. V is symmetric with spectrum in [0, 1]
/// and satisfies V(x) x = P(x).
class JacobianElement {
 public:
  using Block = std::variant<OrthantBlock, SocBlock, PsdBlock, IdentityBlock>;

  JacobianElement(ConeSpec cone, std::vector<std::pair<Index, Block>> blocks)
      : cone_(std::move(cone)), blocks_(std::move(blocks)) {}

  const ConeSpec& cone() const { return cone_; }
  const std::vector<std::pair<Index, Block>>& blocks() const { return blocks_; }

  Vector apply(const Eigen::Ref<const Vector>& h) const {
    require_dim(h.size(), cone_.ambient_dim(), "JacobianElement::apply");
    Vector out(h.size());
    Index leaf = 0;
    for_each_leaf(cone_, [&](Index off, const ConeSpec& spec) {
      const Index d = spec.ambient_dim();
      apply_block(blocks_[leaf++].second, h.segment(off, d), out.segment(off, d));
    });
    return out;
  }

  Matrix materialize() const {
    const Index n = cone_.ambient_dim();
    Matrix m = Matrix::Zero(n, n);
    Index leaf = 0;
    for_each_leaf(cone_, [&](Index off, const ConeSpec& spec) {
      const Index d = spec.ambient_dim();
      const Block& b = blocks_[leaf++].second;
      Vector e = Vector::Zero(d);
      Vector col(d);
      for (Index j = 0; j < d; ++j) {
        e[j] = 1.0;
        apply_block(b, e, col);
        m.block(off, off + j, d, 1) = col;
        e[j] = 0.0;
      }
    });
    return m;
  }

  PatternKey pattern_key() const {
    PatternKey key;
    for (const auto& [off, b] : blocks_) {
      if (const auto* o = std::get_if<OrthantBlock>(&b)) {
        for (Index i = 0; i < o->active.size(); ++i) key.push_back(o->active[i] > 0.5 ? 1 : 0);
      } else if (const auto* s = std::get_if<SocBlock>(&b)) {
        key.push_back(static_cast<std::int8_t>(s->region));
      } else if (const auto* p = std::get_if<PsdBlock>(&b)) {
        for (Index i = 0; i < p->spectrum.values.size(); ++i) key.push_back(p->spectrum.values[i] > 0.0 ? 1 : 0);
      }
      key.push_back(-1);  // leaf separator
    }
    return key;
  }

 private:
  static void apply_block(const Block& b, const Eigen::Ref<const Vector>& h, Eigen::Ref<Vector> out) {
    if (const auto* o = std::get_if<OrthantBlock>(&b)) {
      out = o->active.cwiseProduct(h);
    } else if (const auto* s = std::get_if<SocBlock>(&b)) {
      switch (s->region) {
        case SocRegion::Interior:
          out = h;
          break;
        case SocRegion::Polar:
          out.setZero();
          break;
        case SocRegion::Boundary: {
          const Index m = h.size() - 1;
          const double h0 = h[0];
          const double wh = s->direction.dot(h.tail(m));
          const double a = (s->x0 + s->radius) / s->radius;
          const double c = s->x0 / s->radius;
          out[0] = 0.5 * (h0 + wh);
          out.tail(m) = 0.5 * (h0 * s->direction + a * h.tail(m) - (c * wh) * s->direction);
          break;
        }
      }
    } else if (const auto* p = std::get_if<PsdBlock>(&b)) {
      const Matrix& u = p->spectrum.vectors;
      Matrix w = (u.transpose() * smat(h) * u).cwiseProduct(p->omega);
      out = svec(u * w * u.transpose());
    } else {
      out = h;
    }
  }

  ConeSpec cone_;
  std::vector<std::pair<Index, Block>> blocks_;
};

/// PSD scaling matrix: 1 on positive/positive pairs, 0 on nonpositive pairs,
/// l_i / (l_i - l_j) on mixed pairs with l_i > 0 >= l_j.
inline Matrix psd_omega(const Vector& eig) {
  const Index n = eig.size();
  Matrix omega(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double li = eig[i], lj = eig[j];
      if (li > 0.0 && lj > 0.0) {
        omega(i, j) = 1.0;
      } else if (li <= 0.0 && lj <= 0.0) {
        omega(i, j) = 0.0;
      } else if (li > 0.0) {
        omega(i, j) = li / (li - lj);
      } else {
        omega(i, j) = lj / (lj - li);
      }
    }
  }
  return omega;
}

/// Deterministic element of the generalized Jacobian of project(cone, .) at x.
///
/// Ties: orthant coordinates equal to zero are inactive; an SOC point with
/// |xbar| == |x0| and xbar != 0 takes the boundary formula, the origin takes
/// the identity; zero PSD eigenvalues count as nonpositive.
inline JacobianElement jacobian_element(const ConeSpec& cone, const Eigen::Ref<const Vector>& x) {
  require_dim(x.size(), cone.ambient_dim(), "jacobian_element");
  std::vector<std::pair<Index, JacobianElement::Block>> blocks;
  for_each_leaf(cone, [&](Index off, const ConeSpec& leaf) {
    auto xi = x.segment(off, leaf.ambient_dim());
    switch (leaf.kind()) {
      case ConeKind::Orthant: {
        OrthantBlock b;
        b.active = (xi.array() > 0.0).cast<double>().matrix();
        blocks.emplace_back(off, std::move(b));
        break;
      }
      case ConeKind::SecondOrder: {
        SocBlock b;
        b.x0 = xi[0];
        b.radius = xi.tail(xi.size() - 1).norm();
        if (b.radius == 0.0) {
          b.region = b.x0 >= 0.0 ? SocRegion::Interior : SocRegion::Polar;
        } else if (b.radius < b.x0) {
          b.region = SocRegion::Interior;
        } else if (b.radius < -b.x0) {
          b.region = SocRegion::Polar;
        } else {
          b.region = SocRegion::Boundary;
          b.direction = xi.tail(xi.size() - 1) / b.radius;
        }
        blocks.emplace_back(off, std::move(b));
        break;
      }
      case ConeKind::Psd: {
        PsdBlock b;
        b.spectrum = spectral_decomposition(smat(xi));
        b.omega = psd_omega(b.spectrum.values);
        blocks.emplace_back(off, std::move(b));
        break;
      }
      case ConeKind::Free:
        blocks.emplace_back(off, IdentityBlock{});
        break;
      case ConeKind::Product:
        break;
    }
  });
  return JacobianElement(cone, std::move(blocks));
}

}  // namespace conic

#endif  // CONIC_NEWTON_CONE_HPP
