// SPDX-License-Identifier: Apache-2.0

#include "spliteq/spliteq.h"

#include "core/problems.hpp"
#include "core/report.hpp"
#include "core/solver.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#ifndef SPLITEQ_VERSION
#define SPLITEQ_VERSION "0.0.0"
#endif

struct spliteq_problem {
  spliteq::InstanceBundle bundle;
};

struct spliteq_report {
  bool passed = false;
  std::string text;
};

struct spliteq_result {
  spliteq::SolveResult run;
  spliteq::SolverConfig config;
  double distance_to_known = std::numeric_limits<double>::quiet_NaN();
  std::string warnings;
};

namespace {

thread_local std::string last_error;

spliteq_status fail(spliteq_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Maps the C++ exception in flight to a status code.
spliteq_status translate() {
  try {
    throw;
  } catch (const spliteq::ParseError& e) {
    return fail(SPLITEQ_E_PARSE, e.what());
  } catch (const spliteq::ValidationError& e) {
    return fail(SPLITEQ_E_VALIDATION, e.what());
  } catch (const spliteq::ContractViolation& e) {
    return fail(SPLITEQ_E_VALIDATION, e.what());
  } catch (const spliteq::EmptyIntersection& e) {
    return fail(SPLITEQ_E_NUMERIC, e.what());
  } catch (const spliteq::InvalidArgument& e) {
    return fail(SPLITEQ_E_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPLITEQ_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPLITEQ_E_INTERNAL, e.what());
  } catch (...) {
    return fail(SPLITEQ_E_INTERNAL, "unknown error");
  }
}

#define SPLITEQ_REQUIRE(cond, msg) \
  do {                             \
    if (!(cond)) return fail(SPLITEQ_E_INVALID_ARGUMENT, msg); \
  } while (0)

spliteq::SolverConfig to_cpp(const spliteq_config& c) {
  spliteq::SolverConfig out;
  out.lambda = c.lambda;
  out.mu = c.mu;
  const double r = c.r;
  out.r_schedule = [r](std::size_t) { return r; };
  out.r_min = c.r_min;
  out.tol_residual = c.tol_residual;
  out.max_iter = c.max_iter;
  out.inner_tol = c.inner_tol;
  out.inner_max_iter = c.inner_max_iter;
  out.workers = c.workers;
  return out;
}

void append_check(std::ostringstream& out, bool& passed, bool ok,
                  const std::string& name) {
  out << (ok ? "PASS " : "FAIL ") << name << '\n';
  passed = passed && ok;
}

}  // namespace

extern "C" {

const char* spliteq_version(void) { return SPLITEQ_VERSION; }

const char* spliteq_last_error(void) { return last_error.c_str(); }

const char* spliteq_status_string(spliteq_status status) {
  switch (status) {
    case SPLITEQ_OK: return "ok";
    case SPLITEQ_E_INVALID_ARGUMENT: return "invalid argument";
    case SPLITEQ_E_PARSE: return "parse error";
    case SPLITEQ_E_VALIDATION: return "validation error";
    case SPLITEQ_E_IO: return "i/o error";
    case SPLITEQ_E_NUMERIC: return "numerical failure";
    case SPLITEQ_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

spliteq_status spliteq_problem_generate(size_t n, size_t m, size_t d1, size_t d2,
                                        uint64_t seed, int make_unique,
                                        spliteq_problem** out) {
  SPLITEQ_REQUIRE(out, "out must not be null");
  SPLITEQ_REQUIRE(n >= 1 && m >= 1 && d1 >= 1 && d2 >= 1,
                  "N, M, d1, d2 must all be >= 1");
  try {
    *out = new spliteq_problem{spliteq::generate_instance(
        n, m, static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(d2), seed,
        make_unique != 0)};
    return SPLITEQ_OK;
  } catch (...) {
    return translate();
  }
}

spliteq_status spliteq_problem_load(const char* path, spliteq_problem** out) {
  SPLITEQ_REQUIRE(path && out, "path and out must not be null");
  try {
    std::ifstream file(path, std::ios::binary);
    if (!file) return fail(SPLITEQ_E_IO, std::string("cannot open '") + path + "'");
    std::ostringstream text;
    text << file.rdbuf();
    *out = new spliteq_problem{spliteq::parse_problem(text.str())};
    return SPLITEQ_OK;
  } catch (...) {
    return translate();
  }
}

spliteq_status spliteq_problem_save(const spliteq_problem* problem, const char* path) {
  SPLITEQ_REQUIRE(problem && path, "problem and path must not be null");
  try {
    const std::string text = spliteq::dump_problem(problem->bundle);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) return fail(SPLITEQ_E_IO, std::string("cannot write '") + path + "'");
    file << text;
    if (!file) return fail(SPLITEQ_E_IO, std::string("write failed for '") + path + "'");
    return SPLITEQ_OK;
  } catch (...) {
    return translate();
  }
}

spliteq_status spliteq_problem_info_get(const spliteq_problem* problem,
                                        spliteq_problem_info* out) {
  SPLITEQ_REQUIRE(problem && out, "problem and out must not be null");
  const auto& b = problem->bundle;
  out->n = b.problem.f.size();
  out->m = b.problem.big_f.size();
  out->d1 = static_cast<size_t>(b.problem.d1());
  out->d2 = static_cast<size_t>(b.problem.d2());
  out->has_known_solution = b.known_solution ? 1 : 0;
  out->solution_unique = b.solution_unique ? 1 : 0;
  out->seed = b.seed;
  return SPLITEQ_OK;
}

spliteq_status spliteq_problem_known_solution(const spliteq_problem* problem,
                                              double* out, size_t len) {
  SPLITEQ_REQUIRE(problem && out, "problem and out must not be null");
  const auto& ks = problem->bundle.known_solution;
  if (!ks) return fail(SPLITEQ_E_INVALID_ARGUMENT, "problem has no known solution");
  SPLITEQ_REQUIRE(len == static_cast<size_t>(ks->size()), "len must equal d1");
  for (Eigen::Index k = 0; k < ks->size(); ++k) out[k] = (*ks)[k];
  return SPLITEQ_OK;
}

void spliteq_problem_free(spliteq_problem* problem) { delete problem; }

spliteq_status spliteq_config_default(const spliteq_problem* problem,
                                      spliteq_config* out) {
  SPLITEQ_REQUIRE(problem && out, "problem and out must not be null");
  try {
    const auto c = spliteq::default_config(problem->bundle.problem);
    out->lambda = c.lambda;
    out->mu = c.mu;
    out->r = c.r_schedule(0);
    out->r_min = c.r_min;
    out->tol_residual = c.tol_residual;
    out->max_iter = c.max_iter;
    out->inner_tol = c.inner_tol;
    out->inner_max_iter = c.inner_max_iter;
    out->workers = c.workers;
    return SPLITEQ_OK;
  } catch (...) {
    return translate();
  }
}

spliteq_status spliteq_validate(const spliteq_problem* problem,
                                const spliteq_config* config, int full,
                                uint64_t seed, spliteq_report** out) {
  SPLITEQ_REQUIRE(problem && config && out, "arguments must not be null");
  try {
    const auto& bundle = problem->bundle;
    const auto& p = bundle.problem;
    const spliteq::SolverConfig cfg = to_cpp(*config);

    auto report = std::make_unique<spliteq_report>();
    std::ostringstream text;
    bool passed = true;

    const auto v = spliteq::validate_config(cfg, p);
    append_check(text, passed, v.passed, "parameter bounds: " + v.to_string());

    if (full) {
      constexpr std::size_t kSamples = 10'000;
      std::mt19937_64 rng(seed);
      for (std::size_t i = 0; i < p.f.size(); ++i) {
        const std::string name = "f[" + std::to_string(i) + "]";
        append_check(text, passed,
                     spliteq::sample_pseudomonotone(p.f[i], p.c, p.d1(), kSamples, rng),
                     name + " pseudomonotone on sampled pairs");
        append_check(text, passed,
                     spliteq::sample_lipschitz_type(p.f[i], p.c, p.d1(), kSamples, rng),
                     name + " Lipschitz-type on sampled triples");
      }
      for (std::size_t j = 0; j < p.big_f.size(); ++j) {
        append_check(text, passed,
                     spliteq::sample_monotone(p.big_f[j], p.q, p.d2(), kSamples, rng),
                     "F[" + std::to_string(j) + "] monotone on sampled pairs");
      }
      if (bundle.known_solution) {
        const auto cert = spliteq::check_known_solution(bundle, cfg, 1000, seed);
        std::string detail;
        for (const auto& f : cert.failures) detail += "\n    " + f;
        append_check(text, passed, cert.passed, "known-solution certificate" + detail);
      }
    }
    report->passed = passed;
    report->text = text.str();
    *out = report.release();
    return SPLITEQ_OK;
  } catch (...) {
    return translate();
  }
}

int spliteq_report_passed(const spliteq_report* report) {
  return report && report->passed ? 1 : 0;
}

const char* spliteq_report_text(const spliteq_report* report) {
  return report ? report->text.c_str() : "";
}

void spliteq_report_free(spliteq_report* report) { delete report; }

void spliteq_solve_options_init(spliteq_solve_options* options) {
  if (!options) return;
  options->x0 = nullptr;
  options->x0_len = 0;
  options->seed = 0;
  options->trace_csv_path = nullptr;
  options->trace_timing = 1;
}

spliteq_status spliteq_solve(const spliteq_problem* problem,
                             const spliteq_config* config, spliteq_mode mode,
                             const spliteq_solve_options* options,
                             spliteq_result** out) {
  SPLITEQ_REQUIRE(problem && config && out, "arguments must not be null");
  SPLITEQ_REQUIRE(mode == SPLITEQ_MODE_WEAK || mode == SPLITEQ_MODE_HYBRID,
                  "unknown mode");
  spliteq_solve_options opts;
  spliteq_solve_options_init(&opts);
  if (options) opts = *options;
  try {
    const auto& bundle = problem->bundle;
    const auto& p = bundle.problem;

    spliteq::Vector x0;
    if (opts.x0) {
      SPLITEQ_REQUIRE(opts.x0_len == static_cast<size_t>(p.d1()),
                      "x0 must have length d1");
      x0 = Eigen::Map<const spliteq::Vector>(opts.x0, p.d1());
    } else {
      std::mt19937_64 rng(opts.seed);
      x0 = spliteq::sample_point(p.c, p.d1(), rng);
    }

    auto result = std::make_unique<spliteq_result>();
    result->config = to_cpp(*config);

    std::ofstream trace_file;
    spliteq::SolveOptions so;
    so.known_solution = bundle.known_solution;
    so.record_timing = opts.trace_timing != 0;
    if (opts.trace_csv_path) {
      trace_file.open(opts.trace_csv_path, std::ios::binary | std::ios::trunc);
      if (!trace_file) {
        return fail(SPLITEQ_E_IO,
                    std::string("cannot write '") + opts.trace_csv_path + "'");
      }
      trace_file << spliteq::trace_csv_header() << std::flush;
      const bool timing = so.record_timing;
      so.on_record = [&trace_file, timing](const spliteq::TraceRecord& r) {
        trace_file << spliteq::trace_csv_row(r, timing) << std::flush;
      };
    }

    result->run = spliteq::solve(
        p, result->config,
        mode == SPLITEQ_MODE_WEAK ? spliteq::Mode::kWeak : spliteq::Mode::kHybrid,
        x0, so);

    const auto& sol = result->run.solution;
    if (bundle.known_solution) {
      result->distance_to_known = (sol.x - *bundle.known_solution).norm();
    }
    if (result->run.trace.start_projected) {
      result->warnings += "x0 was outside C and has been projected onto C\n";
    }
    std::size_t unconverged = 0;
    for (const auto& r : result->run.trace.records) {
      if (!r.inner_converged || !r.projection_converged) ++unconverged;
    }
    if (unconverged > 0) {
      result->warnings += std::to_string(unconverged) +
                          " iteration(s) had inner solves that hit their "
                          "iteration limit\n";
    }
    *out = result.release();
    return SPLITEQ_OK;
  } catch (...) {
    return translate();
  }
}

spliteq_outcome spliteq_result_outcome(const spliteq_result* result) {
  return result && result->run.solution.status == spliteq::Status::kConverged
             ? SPLITEQ_OUTCOME_CONVERGED
             : SPLITEQ_OUTCOME_MAX_ITER;
}

size_t spliteq_result_iterations(const spliteq_result* result) {
  return result ? result->run.solution.iterations : 0;
}

double spliteq_result_residual(const spliteq_result* result) {
  return result ? result->run.solution.residual
                : std::numeric_limits<double>::quiet_NaN();
}

double spliteq_result_distance_to_known(const spliteq_result* result) {
  return result ? result->distance_to_known : std::numeric_limits<double>::quiet_NaN();
}

size_t spliteq_result_trace_length(const spliteq_result* result) {
  return result ? result->run.trace.records.size() : 0;
}

spliteq_status spliteq_result_x(const spliteq_result* result, double* out, size_t len) {
  SPLITEQ_REQUIRE(result && out, "result and out must not be null");
  const auto& x = result->run.solution.x;
  SPLITEQ_REQUIRE(len == static_cast<size_t>(x.size()), "len must equal d1");
  for (Eigen::Index k = 0; k < x.size(); ++k) out[k] = x[k];
  return SPLITEQ_OK;
}

const char* spliteq_result_warnings(const spliteq_result* result) {
  return result ? result->warnings.c_str() : "";
}

spliteq_status spliteq_result_write_solution(const spliteq_result* result,
                                             const char* path) {
  SPLITEQ_REQUIRE(result && path, "result and path must not be null");
  try {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) return fail(SPLITEQ_E_IO, std::string("cannot write '") + path + "'");
    file << spliteq::solution_json(result->run.solution, result->config);
    if (!file) return fail(SPLITEQ_E_IO, std::string("write failed for '") + path + "'");
    return SPLITEQ_OK;
  } catch (...) {
    return translate();
  }
}

spliteq_status spliteq_result_write_trace(const spliteq_result* result,
                                          const char* path, int timing) {
  SPLITEQ_REQUIRE(result && path, "result and path must not be null");
  try {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) return fail(SPLITEQ_E_IO, std::string("cannot write '") + path + "'");
    spliteq::write_trace_csv(result->run.trace, file, timing != 0);
    if (!file) return fail(SPLITEQ_E_IO, std::string("write failed for '") + path + "'");
    return SPLITEQ_OK;
  } catch (...) {
    return translate();
  }
}

void spliteq_result_free(spliteq_result* result) { delete result; }

}  // extern "C"
