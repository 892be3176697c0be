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

#ifndef CONIC_NEWTON_BENCH_HPP
#define CONIC_NEWTON_BENCH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "conic_newton/common.hpp"
#include "conic_newton/ncm.hpp"

namespace conic::bench {

// ---------------------------------------------------------------------------
// Random numbers
//
// Uniforms are built from raw 64-bit mt19937_64 output rather than the
// standard distributions, whose algorithms are implementation-defined, so
// instances are identical across standard libraries.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // [0, 1)
  double canonical() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }
  double normal() {
    if (spare_) {
      double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = canonical();
    while (u1 <= 0.0) u1 = canonical();
    const double u2 = canonical();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Symmetric matrix with upper-triangle entries (diagonal included) uniform in [lo, hi].
inline Matrix symmetric_uniform(Rng& rng, Index n, double lo, double hi) {
  Matrix m(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      m(i, j) = rng.uniform(lo, hi);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

/// Random correlation matrix: eigenvalues uniform on {l >= 0, sum l = n},
/// a Haar-like orthogonal conjugation (Q factor of a Gaussian matrix with
/// sign fix), then Bendel-Mickey Givens rotations to reach unit diagonal.
inline Matrix random_correlation_matrix(Rng& rng, Index n) {
  if (n < 1) throw InvalidInput("random_correlation_matrix: n must be positive");
  if (n == 1) return Matrix::Ones(1, 1);

  Vector eig(n);
  for (Index i = 0; i < n; ++i) {
    double u = rng.canonical();
    while (u <= 0.0) u = rng.canonical();
    eig[i] = -std::log(u);
  }
  eig *= static_cast<double>(n) / eig.sum();

  Matrix gauss(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) gauss(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);

  Matrix a = q * eig.asDiagonal() * q.transpose();
  a = (0.5 * (a + a.transpose())).eval();

  // Each rotation fixes one diagonal entry to 1 and keeps the trace, so at
  // most n - 1 rotations are needed.
  const double eps = 1e-14;
  for (Index sweep = 0; sweep < n; ++sweep) {
    Index i = -1, j = -1;
    for (Index k = 0; k < n && i < 0; ++k)
      if (a(k, k) < 1.0 - eps) i = k;
    for (Index k = 0; k < n && j < 0; ++k)
      if (a(k, k) > 1.0 + eps) j = k;
    if (i < 0 || j < 0) break;

    // Rotation rows i' = c e_i - s e_j, j' = s e_i + c e_j with t = s / c
    // solving t^2 (a_jj - 1) - 2 t a_ij + (a_ii - 1) = 0.
    const double aii = a(i, i), ajj = a(j, j), aij = a(i, j);
    const double disc = std::sqrt(std::max(0.0, aij * aij - (aii - 1.0) * (ajj - 1.0)));
    const double t = (aij + (aij >= 0 ? disc : -disc)) / (ajj - 1.0);
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = c * t;
    for (Index k = 0; k < n; ++k) {
      const double ri = a(i, k), rj = a(j, k);
      a(i, k) = c * ri - s * rj;
      a(j, k) = s * ri + c * rj;
    }
    for (Index k = 0; k < n; ++k) {
      const double ci = a(k, i), cj = a(k, j);
      a(k, i) = c * ci - s * cj;
      a(k, j) = s * ci + c * cj;
    }
  }
  a = (0.5 * (a + a.transpose())).eval();
  a.diagonal().setOnes();
  return a;
}

inline Matrix random_correlation_matrix(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return random_correlation_matrix(rng, n);
}

// ---------------------------------------------------------------------------
// Experiments

enum class Experiment { E55, E56, E57, E58 };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::E55:
      return "5.5";
    case Experiment::E56:
      return "5.6";
    case Experiment::E57:
      return "5.7";
    case Experiment::E58:
      return "5.8";
  }
  return "?";
}

inline Experiment experiment_from_string(const std::string& s) {
  if (s == "5.5" || s == "E55") return Experiment::E55;
  if (s == "5.6" || s == "E56") return Experiment::E56;
  if (s == "5.7" || s == "E57") return Experiment::E57;
  if (s == "5.8" || s == "E58") return Experiment::E58;
  throw InvalidInput("unknown experiment '" + s + "' (expected 5.5, 5.6, 5.7 or 5.8)");
}

struct ExperimentConfig {
  Experiment experiment = Experiment::E56;
  Index n = 100;
  double alpha = 0.0;             // E55, E58
  std::optional<Index> ell;       // E58; n/2 when absent
  std::uint64_t seed = 0;
  int replicates = 10;
  // E58 block factor: l/(1-l) as printed, or l/(l-1) when false.
  bool ell_factor_as_printed = true;

  Index ell_value() const { return ell ? *ell : std::max<Index>(1, n / 2); }

  void validate() const {
    if (n < 1) throw InvalidInput("n must be positive");
    if (replicates < 1) throw InvalidInput("replicates must be positive");
    const bool uses_alpha = experiment == Experiment::E55 || experiment == Experiment::E58;
    if (uses_alpha && !(alpha >= 0.0 && std::isfinite(alpha))) throw InvalidInput("alpha must be finite and nonnegative");
    if (!uses_alpha && alpha != 0.0) throw InvalidInput("alpha applies only to experiments 5.5 and 5.8");
    if (experiment == Experiment::E58) {
      const Index l = ell_value();
      if (l < 1 || l > n) throw InvalidInput("ell must lie in [1, n]");
    } else if (ell) {
      throw InvalidInput("ell applies only to experiment 5.8");
    }
  }
};

inline std::uint64_t instance_seed(const ExperimentConfig& cfg, int replicate) {
  std::uint64_t h = splitmix64(cfg.seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(cfg.experiment));
  h = splitmix64(h ^ static_cast<std::uint64_t>(cfg.n));
  return splitmix64(h ^ static_cast<std::uint64_t>(replicate));
}

inline double e58_block_factor(Index ell, bool as_printed) {
  if (ell == 1) return 0.0;  // E_1 - Id_1 = 0
  const double l = static_cast<double>(ell);
  return as_printed ? l / (1.0 - l) : l / (l - 1.0);
}

/// G for one replicate; deterministic in (config, replicate).
inline NcmProblem generate(const ExperimentConfig& cfg, int replicate) {
  cfg.validate();
  if (replicate < 0) throw InvalidInput("replicate index must be nonnegative");
  Rng rng(instance_seed(cfg, replicate));
  const Index n = cfg.n;
  Matrix g;
  switch (cfg.experiment) {
    case Experiment::E55: {
      g = random_correlation_matrix(rng, n);
      g += cfg.alpha * symmetric_uniform(rng, n, -1.0, 1.0);
      break;
    }
    case Experiment::E56:
      g = symmetric_uniform(rng, n, -1.0, 1.0);
      g.diagonal().setOnes();
      break;
    case Experiment::E57:
      g = symmetric_uniform(rng, n, 0.0, 2.0);
      g.diagonal().setOnes();
      break;
    case Experiment::E58: {
      const Index l = cfg.ell_value();
      g = Matrix::Zero(n, n);
      g.topLeftCorner(l, l) =
          e58_block_factor(l, cfg.ell_factor_as_printed) * (Matrix::Ones(l, l) - Matrix::Identity(l, l));
      for (Index i = 0; i < n; ++i) g(i, i) += rng.uniform(-20000.0, 20000.0);
      g += cfg.alpha * symmetric_uniform(rng, n, -1.0, 1.0);
      break;
    }
  }
  return NcmProblem(g);
}

// ---------------------------------------------------------------------------
// Performance profiles

struct ProfileTable {
  Matrix times;  // problems x solvers, +inf marks a failure
  std::vector<std::string> solver_names;
  std::vector<double> tau_grid;
  Matrix rho;  // solvers x tau
};

/// Dolan-More profile: r_ps = t_ps / min_s t_ps, rho_s(tau) = fraction of
/// problems with r_ps <= tau. Rows where every solver failed count as
/// unsolved for all. Without a grid, tau runs over 1 and every finite ratio.
inline ProfileTable profile(const Matrix& times, std::vector<std::string> names = {},
                            std::vector<double> tau_grid = {}) {
  if (times.rows() == 0 || times.cols() == 0) throw InvalidInput("profile: empty time table");
  if ((times.array().isNaN() || times.array() < 0.0).any()) throw InvalidInput("profile: times must be >= 0 or +inf");
  const Index np = times.rows(), ns = times.cols();
  if (names.empty())
    for (Index s = 0; s < ns; ++s) names.push_back("solver" + std::to_string(s));
  if (static_cast<Index>(names.size()) != ns) throw InvalidInput("profile: one name per solver column");

  const double inf = std::numeric_limits<double>::infinity();
  Matrix ratio(np, ns);
  for (Index p = 0; p < np; ++p) {
    const double best = times.row(p).minCoeff();
    for (Index s = 0; s < ns; ++s) {
      const double t = times(p, s);
      if (!std::isfinite(t) || !std::isfinite(best)) {
        ratio(p, s) = inf;
      } else if (t == best) {
        ratio(p, s) = 1.0;
      } else {
        ratio(p, s) = t / best;
      }
    }
  }

  if (tau_grid.empty()) {
    tau_grid.push_back(1.0);
    for (Index p = 0; p < np; ++p)
      for (Index s = 0; s < ns; ++s)
        if (std::isfinite(ratio(p, s))) tau_grid.push_back(ratio(p, s));
    std::sort(tau_grid.begin(), tau_grid.end());
    tau_grid.erase(std::unique(tau_grid.begin(), tau_grid.end()), tau_grid.end());
  } else {
    for (double t : tau_grid)
      if (!(t >= 1.0)) throw InvalidInput("profile: tau values must be >= 1");
    std::sort(tau_grid.begin(), tau_grid.end());
  }

  ProfileTable out;
  out.times = times;
  out.solver_names = std::move(names);
  out.tau_grid = std::move(tau_grid);
  out.rho.resize(ns, static_cast<Index>(out.tau_grid.size()));
  for (Index s = 0; s < ns; ++s) {
    for (Index k = 0; k < out.rho.cols(); ++k) {
      Index count = 0;
      for (Index p = 0; p < np; ++p)
        if (ratio(p, s) <= out.tau_grid[k]) ++count;
      out.rho(s, k) = static_cast<double>(count) / static_cast<double>(np);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Suite

inline std::string canonical_solver(const std::string& name) {
  if (name == "newton" || name == "semi-smooth-newton-ncm" || name == "ssn") return "newton";
  if (name == "baseline" || name == "alternating-projections" || name == "ap") return "baseline";
  throw InvalidInput("unknown solver '" + name + "' (expected newton or baseline)");
}

struct RawRecord {
  std::string experiment;
  Index n = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  int replicate = 0;
  std::string solver;
  double time_seconds = 0.0;
  long iterations = 0;
  bool converged = false;
};

struct SuiteResult {
  ProfileTable profile;
  std::vector<RawRecord> raw;
};

struct SuiteOptions {
  double tol = 1e-5;
  long newton_max_iter = 200;
  long baseline_max_iter = 5000;
  int jobs = 1;  // threads for instance generation; solves stay sequential
};

inline NcmReport run_solver(const std::string& solver, const NcmProblem& p, const SuiteOptions& opt) {
  if (solver == "newton") return solve_ncm(p, opt.tol, opt.newton_max_iter);
  return solve_ncm_baseline(p, opt.tol, opt.baseline_max_iter);
}

/// Runs every solver on every generated instance. Instances may be generated
/// on opt.jobs threads; solves are timed one at a time on the calling thread
/// after one untimed warm-up.
inline SuiteResult run_suite(const std::vector<ExperimentConfig>& configs, std::vector<std::string> solvers,
                             const SuiteOptions& opt = {}) {
  if (configs.empty()) throw InvalidInput("run_suite: no experiment configurations");
  if (solvers.empty()) throw InvalidInput("run_suite: no solvers");
  for (auto& s : solvers) s = canonical_solver(s);
  for (const auto& c : configs) c.validate();

  {
    const NcmProblem warm = generate(configs.front(), 0);
    for (const auto& s : solvers) (void)run_solver(s, warm, opt);
  }

  std::vector<std::pair<const ExperimentConfig*, int>> jobs;
  for (const auto& cfg : configs)
    for (int r = 0; r < cfg.replicates; ++r) jobs.emplace_back(&cfg, r);
  std::vector<std::optional<NcmProblem>> instances(jobs.size());
  {
    const std::size_t workers = static_cast<std::size_t>(std::max(1, opt.jobs));
    std::vector<std::future<void>> pending;
    for (std::size_t w = 0; w < workers; ++w) {
      pending.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < jobs.size(); i += workers) instances[i].emplace(generate(*jobs[i].first, jobs[i].second));
      }));
    }
    for (auto& f : pending) f.get();
  }

  SuiteResult out;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const ExperimentConfig& cfg = *jobs[i].first;
    const int r = jobs[i].second;
    const NcmProblem& prob = *instances[i];
    std::vector<double> row;
    for (const auto& s : solvers) {
      RawRecord rec;
      rec.experiment = to_string(cfg.experiment);
      rec.n = cfg.n;
      rec.alpha = cfg.alpha;
      rec.seed = cfg.seed;
      rec.replicate = r;
      rec.solver = s;
      try {
        const NcmReport rep = run_solver(s, prob, opt);
        rec.time_seconds = rep.wall_time_seconds;
        rec.iterations = rep.iterations;
        rec.converged = converged(rep.termination);
      } catch (const NumericalFailure& e) {
        rec.iterations = e.iteration();
        rec.converged = false;
      }
      row.push_back(rec.converged ? rec.time_seconds : std::numeric_limits<double>::infinity());
      out.raw.push_back(rec);
    }
    rows.push_back(std::move(row));
  }
  Matrix times(static_cast<Index>(rows.size()), static_cast<Index>(solvers.size()));
  for (Index p = 0; p < times.rows(); ++p)
    for (Index s = 0; s < times.cols(); ++s) times(p, s) = rows[p][s];
  out.profile = profile(times, solvers);
  return out;
}

// ---------------------------------------------------------------------------
// CSV output

inline void write_profile_csv(std::ostream& os, const ProfileTable& t) {
  os << "tau";
  for (const auto& s : t.solver_names) os << "," << s;
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < t.tau_grid.size(); ++k) {
    os << t.tau_grid[k];
    for (Index s = 0; s < t.rho.rows(); ++s) os << "," << t.rho(s, static_cast<Index>(k));
    os << "\n";
  }
}

inline void write_raw_csv(std::ostream& os, const std::vector<RawRecord>& raw) {
  os << "experiment,n,alpha,seed,replicate,solver,time_seconds,iterations,converged\n" << std::setprecision(17);
  for (const auto& r : raw) {
    os << r.experiment << "," << r.n << "," << r.alpha << "," << r.seed << "," << r.replicate << "," << r.solver
       << "," << r.time_seconds << "," << r.iterations << "," << (r.converged ? "true" : "false") << "\n";
  }
}

/// Average time and iteration count per (experiment, n, alpha, solver).
inline void write_summary(std::ostream& os, const std::vector<RawRecord>& raw) {
  struct Acc {
    double time = 0.0;
    double iterations = 0.0;
    int count = 0;
    int solved = 0;
  };
  std::map<std::tuple<std::string, Index, double, std::string>, Acc> groups;
  for (const auto& r : raw) {
    auto& a = groups[{r.experiment, r.n, r.alpha, r.solver}];
    a.time += r.time_seconds;
    a.iterations += static_cast<double>(r.iterations);
    a.count += 1;
    a.solved += r.converged ? 1 : 0;
  }
  os << std::left << std::setw(6) << "exp" << std::setw(8) << "n" << std::setw(10) << "alpha" << std::setw(10)
     << "solver" << std::right << std::setw(14) << "avg time (s)" << std::setw(10) << "avg it" << std::setw(10)
     << "solved" << "\n";
  for (const auto& [key, a] : groups) {
    const auto& [exp, n, alpha, solver] = key;
    std::ostringstream solved;
    solved << a.solved << "/" << a.count;
    os << std::left << std::setw(6) << exp << std::setw(8) << n << std::setw(10) << alpha << std::setw(10) << solver
       << std::right << std::fixed << std::setprecision(4) << std::setw(14) << a.time / a.count
       << std::setprecision(1) << std::setw(10) << a.iterations / a.count << std::setw(10) << solved.str() << "\n"
       << std::defaultfloat;
  }
}

}  // namespace conic::bench

#endif  // CONIC_NEWTON_BENCH_HPP
