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

#ifndef CONIC_NEWTON_TOOLS_CLI_HPP
#define CONIC_NEWTON_TOOLS_CLI_HPP

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conic_newton/bench.hpp"
#include "conic_newton/cone.hpp"
#include "conic_newton/io.hpp"
#include "conic_newton/linear_operator.hpp"
#include "conic_newton/ncm.hpp"
#include "conic_newton/newton.hpp"
#include "conic_newton/report.hpp"

namespace conic::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kMaxIter = 2, kNumericalFailure = 3 };

inline int exit_code_for(Termination t) {
  switch (t) {
    case Termination::ResidualTol:
    case Termination::PatternRepeat:
      return kOk;
    case Termination::MaxIter:
      return kMaxIter;
    case Termination::SingularSystem:
      return kNumericalFailure;
  }
  return kNumericalFailure;
}

/// "orthant:3", "soc:4", "psd:2", "free:1", or a comma-separated product.
inline ConeSpec parse_cone(const std::string& text) {
  std::vector<ConeSpec> parts;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidInput("cone '" + item + "' must look like kind:n");
    const std::string kind = item.substr(0, colon);
    const std::string count = item.substr(colon + 1);
    long n = 0;
    try {
      std::size_t used = 0;
      n = std::stol(count, &used);
      if (used != count.size()) throw std::invalid_argument(count);
    } catch (const std::exception&) {
      throw InvalidInput("cone dimension '" + count + "' is not an integer");
    }
    if (n < 1) throw InvalidInput("cone dimension must be positive");
    if (kind == "orthant") {
      parts.push_back(ConeSpec::orthant(n));
    } else if (kind == "soc") {
      parts.push_back(ConeSpec::second_order(n));
    } else if (kind == "psd") {
      parts.push_back(ConeSpec::psd(n));
    } else if (kind == "free") {
      parts.push_back(ConeSpec::free(n));
    } else {
      throw InvalidInput("unknown cone kind '" + kind + "' (orthant, soc, psd, free)");
    }
  }
  if (parts.empty()) throw InvalidInput("empty cone description");
  return parts.size() == 1 ? parts.front() : ConeSpec::product(std::move(parts));
}

// ---------------------------------------------------------------------------

struct SolvePeOptions {
  std::string cone;
  std::string t_path;
  std::string b_path;
  double tol = 1e-5;
  long max_iter = 200;
  std::string x0 = "zero";
  std::string out;
  bool no_pattern_stop = false;
};

inline nlohmann::json echo(const SolvePeOptions& o) {
  return {{"cone", o.cone}, {"T", o.t_path}, {"b", o.b_path}, {"tol", o.tol}, {"max_iter", o.max_iter},
          {"x0", o.x0}, {"use_pattern_stop", !o.no_pattern_stop}};
}

inline SolvePeOptions solve_pe_options_from_json(const nlohmann::json& j) {
  SolvePeOptions o;
  o.cone = j.at("cone").get<std::string>();
  o.t_path = j.at("T").get<std::string>();
  o.b_path = j.at("b").get<std::string>();
  o.tol = j.at("tol").get<double>();
  o.max_iter = j.at("max_iter").get<long>();
  o.x0 = j.at("x0").get<std::string>();
  o.no_pattern_stop = !j.at("use_pattern_stop").get<bool>();
  return o;
}

/// Loads the problem described by the options and runs the Newton solver.
/// Returns the report that cmd_solve_pe writes.
inline io::RunReport run_solve_pe(const SolvePeOptions& o, std::ostream& err) {
  const ConeSpec cone = parse_cone(o.cone);
  const Matrix t = io::read_matrix(o.t_path);
  const Index n = cone.ambient_dim();
  if (t.rows() != n || t.cols() != n) {
    throw InvalidInput(o.t_path + ": expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix for cone " +
                       cone.describe());
  }
  const Vector b = io::read_vector(o.b_path);
  require_dim(b.size(), n, ("right-hand side " + o.b_path).c_str());

  NewtonConfig cfg;
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.use_pattern_stop = !o.no_pattern_stop;
  if (o.x0 != "zero") {
    cfg.x0 = io::read_vector(o.x0);
    require_dim(cfg.x0->size(), n, ("initial point " + o.x0).c_str());
  }

  const LinearOperator op = LinearOperator::dense(t);
  const GuaranteeReport g = analyze(op);
  err << "analysis: " << g.summary() << "\n";

  const ProjectionEquationProblem problem(cone, op, b);
  const SolveReport rep = solve(problem, cfg);

  io::RunReport out;
  out.solver = "semi-smooth-newton";
  out.config = echo(o);
  out.termination = rep.termination;
  out.iterations = rep.iterations;
  out.residuals = rep.residuals;
  out.wall_time_seconds = rep.wall_time_seconds;
  out.guarantee = g;
  out.solution = io::to_std(rep.solution);
  out.projected_solution = io::to_std(rep.projected_solution);
  return out;
}

// ---------------------------------------------------------------------------

struct NcmOptions {
  std::string input;
  double tol = 1e-5;
  std::optional<long> max_iter;
  std::string method = "newton";
  std::string out_matrix;
  std::string out_report;
};

inline nlohmann::json echo(const NcmOptions& o) {
  return {{"input", o.input},
          {"tol", o.tol},
          {"max_iter", o.max_iter ? nlohmann::json(*o.max_iter) : nlohmann::json(nullptr)},
          {"method", o.method}};
}

inline std::pair<io::RunReport, NcmReport> run_ncm(const NcmOptions& o, std::ostream& err) {
  std::vector<std::string> warnings;
  const Matrix g = io::read_symmetric_matrix(o.input, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  const NcmProblem problem(g);
  NcmReport rep;
  io::RunReport out;
  if (o.method == "newton") {
    rep = solve_ncm(problem, o.tol, o.max_iter.value_or(200));
    out.solver = "semi-smooth-newton-ncm";
  } else if (o.method == "baseline") {
    rep = solve_ncm_baseline(problem, o.tol, o.max_iter.value_or(5000));
    out.solver = "alternating-projections";
  } else {
    throw InvalidInput("unknown method '" + o.method + "' (newton or baseline)");
  }
  out.config = echo(o);
  out.termination = rep.termination;
  out.iterations = rep.iterations;
  out.residuals = rep.residuals;
  out.wall_time_seconds = rep.wall_time_seconds;
  if (!o.out_matrix.empty()) out.solution_file = o.out_matrix;
  return {out, rep};
}

// ---------------------------------------------------------------------------

struct BenchOptions {
  std::string experiment;
  std::vector<long> n;
  std::vector<double> alpha;
  std::string ell = "n/2";
  std::optional<std::uint64_t> seed;
  int replicates = 10;
  std::vector<std::string> solvers{"newton", "baseline"};
  std::string out_dir = ".";
  double tol = 1e-5;
  int jobs = 1;
  std::string ell_factor = "printed";
};

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CONIC_NEWTON_SEED")) {
    try {
      std::size_t used = 0;
      const std::string s(env);
      const auto v = std::stoull(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput(std::string("CONIC_NEWTON_SEED is not an unsigned integer: '") + env + "'");
  }
  return 0;
}

inline std::vector<bench::ExperimentConfig> bench_configs(const BenchOptions& o) {
  const bench::Experiment e = bench::experiment_from_string(o.experiment);
  std::vector<long> ns = o.n;
  if (ns.empty()) ns = e == bench::Experiment::E58 ? std::vector<long>{200, 400} : std::vector<long>{100, 200, 300};
  std::vector<double> alphas = o.alpha;
  const bool uses_alpha = e == bench::Experiment::E55 || e == bench::Experiment::E58;
  if (alphas.empty()) {
    if (e == bench::Experiment::E55) alphas = {0.01, 0.1, 1.0, 10.0};
    else if (e == bench::Experiment::E58) alphas = {0.001};
    else alphas = {0.0};
  } else if (!uses_alpha) {
    throw InvalidInput("--alpha applies only to experiments 5.5 and 5.8");
  }
  if (o.ell_factor != "printed" && o.ell_factor != "alt") throw InvalidInput("--ell-factor must be printed or alt");
  if (o.ell != "n/2" && e != bench::Experiment::E58) throw InvalidInput("--ell applies only to experiment 5.8");

  const std::uint64_t seed = resolve_seed(o.seed);
  std::vector<bench::ExperimentConfig> out;
  for (long n : ns) {
    for (double a : alphas) {
      bench::ExperimentConfig c;
      c.experiment = e;
      c.n = n;
      c.alpha = a;
      c.seed = seed;
      c.replicates = o.replicates;
      c.ell_factor_as_printed = o.ell_factor == "printed";
      if (e == bench::Experiment::E58 && o.ell != "n/2") {
        try {
          std::size_t used = 0;
          c.ell = std::stol(o.ell, &used);
          if (used != o.ell.size()) throw std::invalid_argument(o.ell);
        } catch (const std::exception&) {
          throw InvalidInput("--ell must be an integer or n/2");
        }
      }
      c.validate();
      out.push_back(c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Semi-smooth Newton solver for projection equations over convex cones"};
  app.require_subcommand(1);

  SolvePeOptions pe;
  auto* solve_pe_cmd = app.add_subcommand("solve-pe", "Solve M P_K(x) + T x = b with M = Id");
  solve_pe_cmd->add_option("--cone", pe.cone, "orthant:n | soc:n | psd:n, comma-separated for products")->required();
  solve_pe_cmd->add_option("--T", pe.t_path, "operator T (MatrixMarket or CSV)")->required();
  solve_pe_cmd->add_option("--b", pe.b_path, "right-hand side vector file")->required();
  solve_pe_cmd->add_option("--tol", pe.tol, "residual tolerance");
  solve_pe_cmd->add_option("--max-iter", pe.max_iter, "iteration limit");
  solve_pe_cmd->add_option("--x0", pe.x0, "initial point file or 'zero'");
  solve_pe_cmd->add_option("--out", pe.out, "JSON report path");
  solve_pe_cmd->add_flag("--no-pattern-stop", pe.no_pattern_stop, "disable the repeated-pattern stopping rule");

  NcmOptions ncm;
  long ncm_max_iter = 0;
  auto* ncm_cmd = app.add_subcommand("ncm", "Nearest correlation matrix");
  ncm_cmd->add_option("--input", ncm.input, "symmetric matrix G")->required();
  ncm_cmd->add_option("--tol", ncm.tol, "residual tolerance");
  auto* ncm_max_iter_opt = ncm_cmd->add_option("--max-iter", ncm_max_iter, "iteration limit (200 newton, 5000 baseline)");
  ncm_cmd->add_option("--method", ncm.method, "newton | baseline");
  ncm_cmd->add_option("--out-matrix", ncm.out_matrix, "correlation matrix output (.mtx or .csv)");
  ncm_cmd->add_option("--out-report", ncm.out_report, "JSON report path");

  BenchOptions bo;
  std::uint64_t seed_flag = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Random nearest-correlation experiments and performance profiles");
  bench_cmd->add_option("--experiment", bo.experiment, "5.5 | 5.6 | 5.7 | 5.8")->required();
  bench_cmd->add_option("--n", bo.n, "dimensions")->delimiter(',');
  bench_cmd->add_option("--alpha", bo.alpha, "noise levels (5.5, 5.8)")->delimiter(',');
  bench_cmd->add_option("--ell", bo.ell, "block size for 5.8: integer or n/2");
  auto* seed_opt = bench_cmd->add_option("--seed", seed_flag, "base seed (falls back to CONIC_NEWTON_SEED)");
  bench_cmd->add_option("--replicates", bo.replicates, "instances per parameter choice");
  bench_cmd->add_option("--solvers", bo.solvers, "newton, baseline")->delimiter(',');
  bench_cmd->add_option("--out-dir", bo.out_dir, "directory for raw.csv and profile.csv");
  bench_cmd->add_option("--tol", bo.tol, "residual tolerance");
  bench_cmd->add_option("--jobs", bo.jobs, "threads for instance generation");
  bench_cmd->add_option("--ell-factor", bo.ell_factor, "printed: l/(1-l), alt: l/(l-1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInputError;
  }

  try {
    if (*solve_pe_cmd) {
      const io::RunReport rep = run_solve_pe(pe, err);
      if (!pe.out.empty()) io::write_report(pe.out, rep);
      err << "termination: " << to_string(rep.termination) << " after " << rep.iterations << " iterations, residual "
          << rep.residuals.back() << "\n";
      return exit_code_for(rep.termination);
    }
    if (*ncm_cmd) {
      if (*ncm_max_iter_opt) ncm.max_iter = ncm_max_iter;
      auto [rep, result] = run_ncm(ncm, err);
      if (!ncm.out_matrix.empty()) io::write_matrix(ncm.out_matrix, result.correlation_matrix);
      if (!ncm.out_report.empty()) io::write_report(ncm.out_report, rep);
      err << "termination: " << to_string(rep.termination) << " after " << rep.iterations << " iterations, residual "
          << rep.residuals.back() << "\n";
      return exit_code_for(rep.termination);
    }
    if (*bench_cmd) {
      if (*seed_opt) bo.seed = seed_flag;
      const auto configs = bench_configs(bo);
      bench::SuiteOptions so;
      so.tol = bo.tol;
      so.jobs = bo.jobs;
      const bench::SuiteResult res = bench::run_suite(configs, bo.solvers, so);
      std::filesystem::create_directories(bo.out_dir);
      {
        std::ofstream raw(std::filesystem::path(bo.out_dir) / "raw.csv");
        bench::write_raw_csv(raw, res.raw);
        std::ofstream prof(std::filesystem::path(bo.out_dir) / "profile.csv");
        bench::write_profile_csv(prof, res.profile);
        if (!raw || !prof) throw InvalidInput("cannot write CSV output in '" + bo.out_dir + "'");
      }
      bench::write_summary(out, res.raw);
      return kOk;
    }
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace conic::cli

#endif  // CONIC_NEWTON_TOOLS_CLI_HPP
