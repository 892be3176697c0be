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

#ifndef CONIC_NEWTON_NCM_HPP
#define CONIC_NEWTON_NCM_HPP

#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "conic_newton/common.hpp"
#include "conic_newton/cone.hpp"
#include "conic_newton/qcp.hpp"

namespace conic {

/// Nearest correlation matrix: min 1/2 |X - G|_F^2 s.t. diag(X) = e, X psd.
struct NcmProblem {
  Matrix G;

  explicit NcmProblem(const Matrix& g) {
    if (g.rows() != g.cols()) throw InvalidInput("G must be square");
    if (g.rows() < 1) throw InvalidInput("G must be non-empty");
    if (!g.allFinite()) throw InvalidInput("G has non-finite entries");
    G = 0.5 * (g + g.transpose());
  }

  Index n() const { return G.rows(); }
};

/// Iterate of the diagonal Newton recursion. X = Diag(d) + Ghat always, so
/// only the diagonal moves; the spectral decomposition of X is cached for
/// the next step.
struct NcmState {
  Matrix X;
  Vector lambda;  // diag(G) - d
  Vector d;       // diag(X)
  Matrix Ghat;    // G with zero diagonal
  Vector g_diag;
  SpectralDecomposition spectrum;  // of X
  double residual = 0.0;
};

struct NcmReport {
  Matrix correlation_matrix;  // P_{S+}(raw_root)
  Matrix raw_root;
  Vector lambda;
  long iterations = 0;
  std::vector<double> residuals;
  double wall_time_seconds = 0.0;
  Termination termination = Termination::MaxIter;
};

/// |diag(P_{S+}(X)) - e|_2 from a decomposition of X.
inline double ncm_residual(const SpectralDecomposition& s) {
  const Matrix& u = s.vectors;
  Vector diag_p = u.array().square().matrix() * s.values.cwiseMax(0.0);
  return (diag_p - Vector::Ones(diag_p.size())).norm();
}

inline double ncm_residual(const NcmState& state) { return ncm_residual(state.spectrum); }

inline NcmState make_ncm_state(const NcmProblem& p, const Vector& d) {
  require_dim(d.size(), p.n(), "NCM diagonal");
  NcmState s;
  s.g_diag = p.G.diagonal();
  s.Ghat = p.G;
  s.Ghat.diagonal().setZero();
  s.d = d;
  s.X = s.Ghat;
  s.X.diagonal() = d;
  s.lambda = s.g_diag - d;
  s.spectrum = spectral_decomposition(s.X);
  s.residual = ncm_residual(s.spectrum);
  if (!std::isfinite(s.residual)) throw NumericalFailure("non-finite NCM residual", 0);
  return s;
}

/// diag(V(X)) for the projector V(X) = U D U^T, D_ii = 1 iff Lambda_ii > 0.
inline Vector projector_diagonal(const SpectralDecomposition& s) {
  const Vector active = (s.values.array() > 0.0).cast<double>().matrix();
  return s.vectors.array().square().matrix() * active;
}

inline bool check_positive_diag(const Matrix& x) { return (x.diagonal().array() > 0.0).all(); }

/// One step of diag(D^{k+1}) = Diag(diag(V))^+ [e - diag(V Ghat)] with the
/// ordinary matrix product V Ghat. Diagonal entries of V at or below 1e-12 in
/// magnitude are treated as zero by the pseudoinverse and leave d_i = 0.
inline NcmState ncm_step(const NcmState& state, long iteration = 0) {
  const SpectralDecomposition& s = state.spectrum;
  const Index n = s.values.size();
  Index positive = 0;
  while (positive < n && s.values[positive] > 0.0) ++positive;
  const auto u_pos = s.vectors.leftCols(positive);
  const Matrix v = u_pos * u_pos.transpose();
  const Vector v_diag = v.diagonal();
  // diag(V Ghat)_i = sum_j V_ij Ghat_ji
  const Vector vg_diag = v.cwiseProduct(state.Ghat.transpose()).rowwise().sum();

  Vector d(n);
  for (Index i = 0; i < n; ++i) {
    d[i] = std::abs(v_diag[i]) > 1e-12 ? (1.0 - vg_diag[i]) / v_diag[i] : 0.0;
  }
  if (!d.allFinite()) throw NumericalFailure("non-finite NCM diagonal update", iteration);

  NcmState next;
  next.Ghat = state.Ghat;
  next.g_diag = state.g_diag;
  next.d = std::move(d);
  next.X = next.Ghat;
  next.X.diagonal() = next.d;
  next.lambda = next.g_diag - next.d;
  next.spectrum = spectral_decomposition(next.X);
  next.residual = ncm_residual(next.spectrum);
  if (!std::isfinite(next.residual)) throw NumericalFailure("non-finite NCM residual", iteration);
  return next;
}

namespace detail {

inline NcmReport finish_ncm(NcmReport rep, const Matrix& raw, const Matrix& corr, const Vector& lambda,
                            std::chrono::steady_clock::time_point start) {
  rep.raw_root = raw;
  rep.correlation_matrix = corr;
  rep.lambda = lambda;
  rep.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace detail

/// Diagonal semi-smooth Newton recursion for the nearest correlation matrix,
/// started from X^0 = G (lambda^0 = 0) unless d0 overrides diag(X^0).
inline NcmReport solve_ncm(const NcmProblem& p, double tol = 1e-5, long max_iter = 200,
                           const std::optional<Vector>& d0 = std::nullopt) {
  if (!(tol > 0.0)) throw InvalidInput("tol must be positive");
  if (max_iter < 1) throw InvalidInput("max_iter must be at least 1");
  const auto start = std::chrono::steady_clock::now();

  NcmState state = make_ncm_state(p, d0 ? *d0 : Vector(p.G.diagonal()));
  NcmReport rep;
  rep.residuals.push_back(state.residual);
  rep.termination = Termination::MaxIter;
  if (state.residual <= tol) {
    rep.termination = Termination::ResidualTol;
  } else {
    for (long k = 1; k <= max_iter; ++k) {
      state = ncm_step(state, k);
      rep.iterations = k;
      rep.residuals.push_back(state.residual);
      if (state.residual <= tol) {
        rep.termination = Termination::ResidualTol;
        break;
      }
    }
  }
  Matrix corr = state.spectrum.positive_part();
  corr = (0.5 * (corr + corr.transpose())).eval();
  return detail::finish_ncm(std::move(rep), state.X, corr, state.lambda, start);
}

/// Alternating projections between the unit-diagonal set and the PSD cone
/// with Dykstra's correction on the PSD step. The returned matrix is the
/// PSD iterate; its diagonal error is the stopping residual.
inline NcmReport solve_ncm_baseline(const NcmProblem& p, double tol = 1e-5, long max_iter = 5000) {
  if (!(tol > 0.0)) throw InvalidInput("tol must be positive");
  if (max_iter < 1) throw InvalidInput("max_iter must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  const Index n = p.n();

  NcmReport rep;
  Matrix y = p.G;
  Matrix correction = Matrix::Zero(n, n);
  Matrix x = project_psd_matrix(y);
  double res = (x.diagonal() - Vector::Ones(n)).norm();
  rep.residuals.push_back(res);
  if (res <= tol) {
    rep.termination = Termination::ResidualTol;
  } else {
    for (long k = 1; k <= max_iter; ++k) {
      const Matrix r = y - correction;
      x = project_psd_matrix(r);
      x = (0.5 * (x + x.transpose())).eval();
      correction = x - r;
      y = x;
      y.diagonal().setOnes();
      res = (x.diagonal() - Vector::Ones(n)).norm();
      if (!std::isfinite(res)) throw NumericalFailure("non-finite baseline residual", k);
      rep.iterations = k;
      rep.residuals.push_back(res);
      if (res <= tol) {
        rep.termination = Termination::ResidualTol;
        break;
      }
    }
  }
  return detail::finish_ncm(std::move(rep), y, x, Vector(p.G.diagonal() - y.diagonal()), start);
}

/// The NCM problem as an equality-constrained QCP over svec coordinates:
/// Q = Id, q = -svec(G), A = diag.
inline QcpProblem ncm_as_qcp(const NcmProblem& p) {
  const Index n = p.n();
  const Index dim = svec_size(n);
  Matrix a = Matrix::Zero(n, dim);
  Index k = 0;
  for (Index col = 0; col < n; ++col) {
    a(col, k) = 1.0;
    k += n - col;
  }
  return QcpProblem(LinearOperator::identity(dim), -svec(p.G), ConeSpec::psd(n),
                    EqualityConstraints{std::move(a), Vector::Ones(n)});
}

}  // namespace conic

#endif  // CONIC_NEWTON_NCM_HPP
