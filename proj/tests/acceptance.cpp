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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure or time-budget overrun.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "conic_newton/bench.hpp"
#include "conic_newton/ncm.hpp"
#include "conic_newton/newton.hpp"
#include "conic_newton/qcp.hpp"
#include "support.hpp"

using namespace conic;
using namespace conic::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<NamedCone> cone_kinds() {
  return {{"orthant", ConeSpec::orthant(10)},
          {"soc", ConeSpec::second_order(8)},
          {"psd", ConeSpec::psd(8)},
          {"product", ConeSpec::product({ConeSpec::orthant(3), ConeSpec::second_order(4), ConeSpec::psd(3)})}};
}

Outcome jacobian_invariants() {
  Outcome o;
  Rng rng(1001);
  double worst_norm = 0, worst_identity = 0, worst_bound = 0, worst_low = 0, worst_high = 0;
  for (const auto& [name, base] : cone_kinds()) {
    for (int i = 0; i < 1000; ++i) {
      ConeSpec cone = base;
      if (name == "psd") cone = ConeSpec::psd(2 + i % 7);
      const Vector x = random_point(rng, cone);
      const Vector y = random_point(rng, cone);
      const auto v = jacobian_element(cone, x);
      const Matrix m = v.materialize();
      Eigen::JacobiSVD<Matrix> svd(m);
      const double norm = svd.singularValues()(0);
      const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.transpose())).eigenvalues();
      const double id = (v.apply(x) - project(cone, x)).norm() / (1.0 + x.norm());
      const Vector h = y - x;
      const double bound = (project(cone, y) - project(cone, x) - v.apply(h)).norm() - (1.0 + 1e-8) * h.norm();
      worst_norm = std::max(worst_norm, norm);
      worst_identity = std::max(worst_identity, id);
      worst_bound = std::max(worst_bound, bound);
      worst_low = std::min(worst_low, eig.minCoeff());
      worst_high = std::max(worst_high, eig.maxCoeff());
      o.require(norm <= 1.0 + 1e-8, name + ": |V| = " + fmt(norm));
      o.require(id <= 1e-8, name + ": V x != P x");
      o.require(eig.minCoeff() >= -1e-8 && eig.maxCoeff() <= 1.0 + 1e-8, name + ": spectrum outside [0, 1]");
      o.require(bound <= 0.0, name + ": first-order bound violated");
    }
  }
  if (o.ok) {
    o.detail = "4x1000 points; max |V| " + fmt(worst_norm) + ", max |Vx-Px|/(1+|x|) " + fmt(worst_identity) +
               ", spectrum in [" + fmt(worst_low) + ", " + fmt(worst_high) + "]";
  }
  return o;
}

Outcome finite_differences() {
  Outcome o;
  Rng rng(2002);
  double worst = 0;
  for (const auto& [name, cone] : cone_kinds()) {
    for (int i = 0; i < 200; ++i) {
      const Vector x = separated_point(rng, cone);
      const double err =
          (jacobian_element(cone, x).materialize() - finite_difference_jacobian(cone, x, 1e-6)).cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      o.require(err <= 1e-4, name + ": finite-difference mismatch " + fmt(err));
    }
  }
  if (o.ok) o.detail = "4x200 points; max entry error " + fmt(worst);
  return o;
}

Outcome convergence_rates() {
  Outcome o;
  Rng rng(3003);
  double worst_margin = -1;
  long ratios = 0;
  for (double c : {2.0, 3.0, 5.0}) {
    for (const auto& [name, cone] : cone_kinds()) {
      const auto g = analyze(LinearOperator::scaled_identity(c, cone.ambient_dim()));
      o.require(g.guarantee == Guarantee::QLinear, "analyzer gave no rate for c=" + fmt(c));
      if (!o.ok) return o;
      for (int i = 0; i < 100; ++i) {
        const Vector xhat = random_point(rng, cone);
        const auto p = constructed_problem(cone, c, xhat);
        NewtonConfig cfg;
        cfg.tol = 1e-12;
        for (double r : measure_ratios(p, cfg, xhat)) {
          ++ratios;
          worst_margin = std::max(worst_margin, r - *g.predicted_ratio);
          o.require(r <= *g.predicted_ratio + 0.05, name + " c=" + fmt(c) + ": ratio " + fmt(r));
        }
      }
    }
  }
  if (o.ok) o.detail = "1200 problems, " + std::to_string(ratios) + " ratios; max excess over bound " + fmt(worst_margin);
  return o;
}

Outcome kkt_round_trip() {
  Outcome o;
  Rng rng(4004);
  const std::vector<NamedCone> cones{
      {"orthant", ConeSpec::orthant(8)},
      {"soc", ConeSpec::second_order(6)},
      {"psd", ConeSpec::psd(4)},
      {"product", ConeSpec::product({ConeSpec::orthant(3), ConeSpec::second_order(3), ConeSpec::psd(2)})}};
  double worst_kkt = 0, worst_pe = 0;
  for (const auto& [name, cone] : cones) {
    for (bool eq : {false, true}) {
      for (int i = 0; i < 100; ++i) {
        const QcpProblem p = random_qcp(rng, cone, eq);
        NewtonConfig cfg;
        cfg.tol = 1e-10;
        const auto [k, rep] = solve_qcp(p, cfg);
        const std::string label = name + (eq ? "+eq" : "") + " #" + std::to_string(i);
        o.require(k.verified, label + ": not converged (" + to_string(rep.termination) + ")");
        if (!k.verified) return o;
        const double kkt = kkt_residual(p, k);
        const double pe = residual(to_projection_equation(p), embed_kkt(p, k, 1e-6));
        worst_kkt = std::max(worst_kkt, kkt);
        worst_pe = std::max(worst_pe, pe);
        o.require(kkt <= 1e-6, label + ": KKT residual " + fmt(kkt));
        o.require(pe <= 1e-6, label + ": embedded residual " + fmt(pe));
      }
    }
  }
  if (o.ok) o.detail = "800 programs; max KKT residual " + fmt(worst_kkt) + ", max embedded residual " + fmt(worst_pe);
  return o;
}

Outcome ncm_oracle() {
  Outcome o;
  bench::ExperimentConfig cfg;
  cfg.experiment = bench::Experiment::E56;
  cfg.n = 30;
  cfg.seed = 5005;
  double worst_gap = 0, worst_kkt = 0;
  for (int r = 0; r < 50; ++r) {
    const NcmProblem p = bench::generate(cfg, r);
    const auto a = solve_ncm(p, 1e-7);
    const auto b = solve_ncm_baseline(p, 1e-7, 100000);
    const std::string label = "instance " + std::to_string(r);
    o.require(converged(a.termination), label + ": newton did not converge");
    o.require(converged(b.termination), label + ": baseline did not converge");
    if (!o.ok) return o;
    const double gap = (a.correlation_matrix - b.correlation_matrix).norm();
    const QcpProblem q = ncm_as_qcp(p);
    KktPoint k;
    k.x = svec(a.correlation_matrix);
    k.lambda = a.lambda;
    k.mu = kkt_multiplier(q, k.x, k.lambda);
    const double kkt = kkt_residual(q, k);
    worst_gap = std::max(worst_gap, gap);
    worst_kkt = std::max(worst_kkt, kkt);
    o.require(gap <= 1e-3, label + ": solvers differ by " + fmt(gap));
    o.require(kkt <= 1e-5, label + ": KKT residual " + fmt(kkt));
  }
  if (o.ok) o.detail = "50 instances; max Frobenius gap " + fmt(worst_gap) + ", max KKT residual " + fmt(worst_kkt);
  return o;
}

Outcome two_by_two() {
  Outcome o;
  double worst = 0;
  for (double g : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.0}) {
    Matrix m(2, 2);
    m << 1, g, g, 1;
    const auto rep = solve_ncm(NcmProblem(m));
    const double err = std::abs(rep.correlation_matrix(0, 1) - std::clamp(g, -1.0, 1.0));
    worst = std::max(worst, err);
    o.require(converged(rep.termination) && err <= 1e-8, "g=" + fmt(g) + ": error " + fmt(err));
  }
  if (o.ok) o.detail = "6 values; max error " + fmt(worst);
  return o;
}

Outcome desk_scale() {
  Outcome o;
  std::ostringstream summary;
  auto run = [&](bench::ExperimentConfig cfg, long max_iter, int need, const std::string& label) {
    cfg.seed = 6006;
    cfg.replicates = 10;
    int ok = 0;
    long worst_it = 0;
    for (int r = 0; r < cfg.replicates; ++r) {
      try {
        const auto rep = solve_ncm(bench::generate(cfg, r), 1e-5, max_iter);
        if (rep.termination == Termination::ResidualTol && rep.residuals.back() <= 1e-5) ++ok;
        worst_it = std::max(worst_it, rep.iterations);
      } catch (const NumericalFailure&) {
      }
    }
    summary << label << " " << ok << "/10 (max it " << worst_it << "); ";
    o.require(ok >= need, label + ": converged on " + std::to_string(ok) + "/10");
  };
  bench::ExperimentConfig c;
  c.experiment = bench::Experiment::E58;
  c.n = 400;
  c.ell = 200;
  c.alpha = 0.001;
  run(c, 40, 10, "5.8 n=400");
  for (double a : {0.01, 0.1}) {
    bench::ExperimentConfig e;
    e.experiment = bench::Experiment::E55;
    e.n = 200;
    e.alpha = a;
    run(e, 100, 9, "5.5 a=" + fmt(a));
  }
  for (auto ex : {bench::Experiment::E56, bench::Experiment::E57}) {
    bench::ExperimentConfig e;
    e.experiment = ex;
    e.n = 200;
    run(e, 100, 9, bench::to_string(ex) + " n=200");
  }
  if (o.ok) o.detail = summary.str();
  return o;
}

Outcome profile_pipeline() {
  Outcome o;
  Matrix hand(3, 2);
  hand << 1, 2, 2, 1, 1, 1;
  const auto h = bench::profile(hand);
  o.require(h.tau_grid.front() == 1.0 && h.rho(0, 0) == 2.0 / 3.0 && h.rho(1, 0) == 2.0 / 3.0,
            "hand example rho(1) != (2/3, 2/3)");

  std::vector<bench::ExperimentConfig> suite;
  auto add = [&](bench::Experiment e, Index n, double alpha) {
    bench::ExperimentConfig c;
    c.experiment = e;
    c.n = n;
    c.alpha = alpha;
    c.seed = 7007;
    c.replicates = 3;
    suite.push_back(c);
  };
  add(bench::Experiment::E55, 60, 0.1);
  add(bench::Experiment::E56, 60, 0.0);
  add(bench::Experiment::E57, 60, 0.0);
  add(bench::Experiment::E58, 100, 0.001);
  bench::SuiteOptions opt;
  opt.baseline_max_iter = 2000;
  const auto res = bench::run_suite(suite, {"newton", "baseline"}, opt);

  std::ostringstream csv;
  bench::write_profile_csv(csv, res.profile);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  o.require(line == "tau,newton,baseline", "profile.csv header '" + line + "'");
  std::vector<std::vector<double>> table;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    table.push_back(row);
  }
  o.require(!table.empty(), "profile.csv has no rows");
  if (!o.ok) return o;
  for (std::size_t k = 1; k < table.size(); ++k) {
    o.require(table[k][0] > table[k - 1][0], "tau grid not increasing");
    for (std::size_t s = 1; s <= 2; ++s) o.require(table[k][s] >= table[k - 1][s], "rho not monotone");
  }
  const std::vector<std::string> solvers{"newton", "baseline"};
  std::string fractions;
  for (std::size_t s = 0; s < 2; ++s) {
    double solved = 0, total = 0;
    for (const auto& r : res.raw) {
      if (r.solver != solvers[s]) continue;
      total += 1;
      solved += r.converged ? 1 : 0;
    }
    const double last = table.back()[s + 1];
    o.require(std::abs(last - solved / total) < 1e-12, solvers[s] + ": rho(max tau) != solved fraction");
    fractions += solvers[s] + " " + fmt(last) + " ";
  }
  if (o.ok) o.detail = "hand rho(1) = (2/3, 2/3); suite of 12 instances, rho(max tau): " + fractions;
  return o;
}

Outcome analyzer() {
  Outcome o;
  const auto a = analyze(LinearOperator::scaled_identity(3.0, 3));
  const auto b = analyze(LinearOperator::scaled_identity(2.0, 3));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -2.0;
  const auto c = analyze(LinearOperator::dense(d));
  const auto e = analyze(LinearOperator::scaled_identity(0.5, 3));
  o.require(a.guarantee == Guarantee::QLinear && a.predicted_ratio == 1.0 / 3.0, "3 Id: " + a.summary());
  o.require(b.guarantee == Guarantee::QLinear && b.predicted_ratio == 0.5, "2 Id: " + b.summary());
  o.require(c.guarantee == Guarantee::ExistenceUniqueness, "diag(2,-2): " + c.summary());
  o.require(e.guarantee == Guarantee::None, "0.5 Id: " + e.summary());
  if (o.ok) o.detail = "QLinear(1/3), QLinear(1/2), ExistenceUniqueness, None";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"jacobian-invariants", 60, jacobian_invariants},
      {"finite-difference-oracle", 60, finite_differences},
      {"convergence-rate-conformance", 120, convergence_rates},
      {"kkt-round-trip", 120, kkt_round_trip},
      {"ncm-vs-baseline", 120, ncm_oracle},
      {"ncm-2x2-closed-form", 1, two_by_two},
      {"desk-scale-regression", 600, desk_scale},
      {"profile-pipeline", 600, profile_pipeline},
      {"guarantee-analyzer", 1, analyzer},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs > c.budget_seconds) {
      o.ok = false;
      o.detail = "exceeded time budget of " + fmt(c.budget_seconds) + "s; " + o.detail;
    }
    if (!o.ok) ++failures;
    std::printf("%s %-30s %8.2fs  %s\n", o.ok ? "PASS" : "FAIL", c.name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
