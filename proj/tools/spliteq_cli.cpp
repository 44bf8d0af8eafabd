// SPDX-License-Identifier: Apache-2.0
//
// spliteq: generate split equilibrium instances, validate solver settings
// and run either outer method. Exit codes: 0 success, 1 validation failure,
// 2 usage or parse error, 3 iteration budget exhausted.

#include "spliteq/spliteq.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMaxIter = 3;

struct ProblemDeleter {
  void operator()(spliteq_problem* p) const { spliteq_problem_free(p); }
};
struct ReportDeleter {
  void operator()(spliteq_report* r) const { spliteq_report_free(r); }
};
struct ResultDeleter {
  void operator()(spliteq_result* r) const { spliteq_result_free(r); }
};
using ProblemPtr = std::unique_ptr<spliteq_problem, ProblemDeleter>;
using ReportPtr = std::unique_ptr<spliteq_report, ReportDeleter>;
using ResultPtr = std::unique_ptr<spliteq_result, ResultDeleter>;

int report_error(spliteq_status status) {
  std::cerr << "error: " << spliteq_last_error() << '\n';
  return status == SPLITEQ_E_VALIDATION ? kExitValidation : kExitUsage;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("SPLIT_EQ_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return v;
    std::cerr << "warning: ignoring malformed SPLIT_EQ_WORKERS='" << env << "'\n";
  }
  return 0;
}

struct Overrides {
  std::optional<double> lambda, mu, r, r_min, tol, inner_tol;
  std::optional<std::size_t> max_iter, inner_max_iter, workers;

  void add_to(CLI::App& app) {
    app.add_option("--lambda", lambda, "extragradient step lambda");
    app.add_option("--mu", mu, "split correction step mu");
    app.add_option("--r", r, "constant resolvent parameter r_n")->check(CLI::PositiveNumber);
    app.add_option("--r-min", r_min, "lower bound d on r_n");
    app.add_option("--tol", tol, "residual tolerance")->check(CLI::PositiveNumber);
    app.add_option("--max-iter", max_iter, "outer iteration budget")->check(CLI::PositiveNumber);
    app.add_option("--inner-tol", inner_tol, "inner solver tolerance")->check(CLI::PositiveNumber);
    app.add_option("--inner-max-iter", inner_max_iter, "inner iteration budget")
        ->check(CLI::PositiveNumber);
    app.add_option("--workers", workers,
                   "worker threads for the family sweeps (default $SPLIT_EQ_WORKERS "
                   "or hardware concurrency)");
  }

  void apply(spliteq_config& c) const {
    if (lambda) c.lambda = *lambda;
    if (mu) c.mu = *mu;
    if (r) c.r = *r;
    if (r_min) c.r_min = *r_min;
    if (tol) c.tol_residual = *tol;
    if (max_iter) c.max_iter = *max_iter;
    if (inner_tol) c.inner_tol = *inner_tol;
    if (inner_max_iter) c.inner_max_iter = *inner_max_iter;
    c.workers = workers ? *workers : default_workers();
  }
};

int cmd_generate(std::size_t n, std::size_t m, std::size_t d1, std::size_t d2,
                 std::uint64_t seed, bool unique, const std::string& out) {
  spliteq_problem* raw = nullptr;
  if (auto s = spliteq_problem_generate(n, m, d1, d2, seed, unique ? 1 : 0, &raw)) {
    std::cerr << "error: " << spliteq_last_error() << '\n';
    return s == SPLITEQ_E_INVALID_ARGUMENT ? kExitUsage : report_error(s);
  }
  ProblemPtr problem(raw);
  if (auto s = spliteq_problem_save(problem.get(), out.c_str())) return report_error(s);

  spliteq_config config;
  spliteq_config_default(problem.get(), &config);
  spliteq_report* rep = nullptr;
  if (auto s = spliteq_validate(problem.get(), &config, 1, seed, &rep)) {
    return report_error(s);
  }
  ReportPtr report(rep);
  std::cout << "wrote " << out << " (N=" << n << ", M=" << m << ", d1=" << d1
            << ", d2=" << d2 << ", seed=" << seed
            << (unique ? ", unique solution 0" : ", 0 in solution set") << ")\n"
            << spliteq_report_text(report.get());
  return spliteq_report_passed(report.get()) ? kExitOk : kExitValidation;
}

int cmd_solve(const std::string& path, const std::string& mode_name,
              const Overrides& overrides, const std::string& trace_path,
              const std::string& solution_path, std::optional<std::uint64_t> seed,
              const std::vector<double>& x0, bool force, bool no_timing) {
  spliteq_problem* raw = nullptr;
  if (auto s = spliteq_problem_load(path.c_str(), &raw)) return report_error(s);
  ProblemPtr problem(raw);

  spliteq_problem_info info;
  spliteq_problem_info_get(problem.get(), &info);

  spliteq_config config;
  if (auto s = spliteq_config_default(problem.get(), &config)) return report_error(s);
  overrides.apply(config);

  spliteq_report* rep = nullptr;
  if (auto s = spliteq_validate(problem.get(), &config, 0, 0, &rep)) {
    return report_error(s);
  }
  ReportPtr report(rep);
  if (!spliteq_report_passed(report.get())) {
    if (!force) {
      std::cerr << spliteq_report_text(report.get())
                << "error: configuration rejected (use --force to run anyway)\n";
      return kExitValidation;
    }
    std::cerr << "warning: running with parameters outside the convergence bounds\n"
              << spliteq_report_text(report.get());
  }

  if (!x0.empty() && x0.size() != info.d1) {
    std::cerr << "error: --x0 needs " << info.d1 << " values\n";
    return kExitUsage;
  }

  spliteq_solve_options options;
  spliteq_solve_options_init(&options);
  options.seed = seed.value_or(info.seed);
  if (!x0.empty()) {
    options.x0 = x0.data();
    options.x0_len = x0.size();
  }
  options.trace_csv_path = trace_path.empty() ? nullptr : trace_path.c_str();
  options.trace_timing = no_timing ? 0 : 1;

  const spliteq_mode mode = mode_name == "hybrid" ? SPLITEQ_MODE_HYBRID : SPLITEQ_MODE_WEAK;
  spliteq_result* res = nullptr;
  if (auto s = spliteq_solve(problem.get(), &config, mode, &options, &res)) {
    std::cerr << "error: " << spliteq_last_error() << '\n';
    return s == SPLITEQ_E_NUMERIC ? kExitValidation : report_error(s);
  }
  ResultPtr result(res);
  if (!solution_path.empty()) {
    if (auto s = spliteq_result_write_solution(result.get(), solution_path.c_str())) {
      return report_error(s);
    }
  }

  std::cerr << spliteq_result_warnings(result.get());
  const bool converged = spliteq_result_outcome(result.get()) == SPLITEQ_OUTCOME_CONVERGED;
  std::cout << mode_name << ": " << (converged ? "converged" : "max-iter")
            << " after " << spliteq_result_iterations(result.get())
            << " iterations, residual " << spliteq_result_residual(result.get());
  const double dist = spliteq_result_distance_to_known(result.get());
  if (dist == dist) std::cout << ", distance to known solution " << dist;
  std::cout << '\n';
  return converged ? kExitOk : kExitMaxIter;
}

int cmd_validate(const std::string& path, const Overrides& overrides,
                 std::uint64_t seed) {
  spliteq_problem* raw = nullptr;
  if (auto s = spliteq_problem_load(path.c_str(), &raw)) return report_error(s);
  ProblemPtr problem(raw);
  spliteq_config config;
  if (auto s = spliteq_config_default(problem.get(), &config)) return report_error(s);
  overrides.apply(config);
  spliteq_report* rep = nullptr;
  if (auto s = spliteq_validate(problem.get(), &config, 1, seed, &rep)) {
    return report_error(s);
  }
  ReportPtr report(rep);
  std::cout << spliteq_report_text(report.get());
  return spliteq_report_passed(report.get()) ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split equilibrium problem solver"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "write a seeded instance with a known solution");
  std::size_t n = 1, m = 1, d1 = 2, d2 = 2;
  std::uint64_t gen_seed = 0;
  bool unique = false;
  std::string gen_out;
  gen->add_option("--n", n, "number of bifunctions f_i");
  gen->add_option("--m", m, "number of bifunctions F_j");
  gen->add_option("--d1", d1, "dimension of the primal space");
  gen->add_option("--d2", d2, "dimension of the image space");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_flag("--unique", unique, "make the solution set {0}");
  gen->add_option("-o,--output", gen_out, "problem file to write")->required();

  auto* sol = app.add_subcommand("solve", "run the weak or hybrid method");
  std::string solve_path, mode = "weak", trace_path, solution_path;
  Overrides solve_over;
  std::optional<std::uint64_t> solve_seed;
  std::vector<double> x0;
  bool force = false, no_timing = false;
  sol->add_option("problem", solve_path, "problem file")->required();
  sol->add_option("--mode", mode, "weak | hybrid")
      ->check(CLI::IsMember({"weak", "hybrid"}));
  solve_over.add_to(*sol);
  sol->add_option("--trace", trace_path, "trace CSV output");
  sol->add_option("--solution", solution_path, "solution JSON output");
  sol->add_option("--seed", solve_seed, "seed for the random starting point");
  sol->add_option("--x0", x0, "starting point (d1 values)")->delimiter(',');
  sol->add_flag("--force", force, "run even if the parameter bounds are violated");
  sol->add_flag("--no-timing", no_timing, "write elapsed_ms as 0 (reproducible traces)");

  auto* val = app.add_subcommand("validate", "check parameters, hypotheses and certificate");
  std::string val_path;
  Overrides val_over;
  std::uint64_t val_seed = 0;
  val->add_option("problem", val_path, "problem file")->required();
  val_over.add_to(*val);
  val->add_option("--seed", val_seed, "sampling seed");

  app.add_subcommand("version", "print the library version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*gen) {
    if (n < 1 || m < 1 || d1 < 1 || d2 < 1) {
      std::cerr << "error: --n, --m, --d1, --d2 must all be >= 1\n";
      return kExitUsage;
    }
    return cmd_generate(n, m, d1, d2, gen_seed, unique, gen_out);
  }
  if (*sol) {
    return cmd_solve(solve_path, mode, solve_over, trace_path, solution_path,
                     solve_seed, x0, force, no_timing);
  }
  if (*val) return cmd_validate(val_path, val_over, val_seed);
  std::cout << "spliteq " << spliteq_version() << '\n';
  return kExitOk;
}
