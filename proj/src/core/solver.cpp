// SPDX-License-Identifier: Apache-2.0

#include "core/solver.hpp"

#include "core/prox.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>

namespace spliteq {

const char* to_string(Mode mode) {
  return mode == Mode::kWeak ? "weak" : "hybrid";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "weak") return Mode::kWeak;
  if (text == "hybrid") return Mode::kHybrid;
  return std::nullopt;
}

const char* to_string(Status status) {
  return status == Status::kConverged ? "converged" : "max-iter";
}

namespace {

InnerOptions inner_options(const SolverConfig& config) {
  InnerOptions o;
  o.tol = config.inner_tol;
  o.max_iter = config.inner_max_iter;
  return o;
}

void run(WorkerPool* pool, std::size_t count,
         const std::function<void(std::size_t)>& task) {
  if (pool) {
    pool->parallel_for(count, task);
  } else {
    for (std::size_t i = 0; i < count; ++i) task(i);
  }
}

// Lowest index attaining the maximum distance to `from`.
std::size_t furthest(const std::vector<Vector>& points, const Vector& from) {
  std::size_t best = 0;
  double best_dist = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = (points[i] - from).norm();
    if (d > best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace

ExtragradientSweep extragradient_sweep(const SplitProblem& problem,
                                       const Vector& x,
                                       const SolverConfig& config,
                                       WorkerPool* pool) {
  require_point(x, problem.d1(), "extragradient_sweep");
  const std::size_t count = problem.f.size();
  const InnerOptions options = inner_options(config);

  ExtragradientSweep out;
  out.y.resize(count);
  out.z.resize(count);
  std::vector<std::size_t> iterations(count, 0);
  std::vector<char> converged(count, 1);

  run(pool, count, [&](std::size_t i) {
    const Bifunction& f = problem.f[i];
    ProxResult predict = prox_step(f, x, x, config.lambda, problem.c, options);
    ProxResult correct =
        prox_step(f, predict.point, x, config.lambda, problem.c, options);
    iterations[i] = predict.inner_iterations + correct.inner_iterations;
    converged[i] = predict.converged && correct.converged;
    out.y[i] = std::move(predict.point);
    out.z[i] = std::move(correct.point);
  });

  for (std::size_t i = 0; i < count; ++i) {
    out.inner_iterations += iterations[i];
    out.converged = out.converged && converged[i];
  }
  out.i_star = furthest(out.z, x);
  out.z_bar = out.z[out.i_star];
  return out;
}

ResolventSweep resolvent_sweep(const SplitProblem& problem, const Vector& z_bar,
                               double r_n, const SolverConfig& config,
                               WorkerPool* pool) {
  if (!(r_n >= config.r_min && r_n > 0.0)) {
    throw InvalidArgument("resolvent_sweep: r_n = " + std::to_string(r_n) +
                          " below r_min");
  }
  const std::size_t count = problem.big_f.size();
  const InnerOptions options = inner_options(config);

  ResolventSweep out;
  out.az_bar = problem.a.apply(z_bar);
  out.w.resize(count);
  std::vector<std::size_t> iterations(count, 0);
  std::vector<char> converged(count, 1);

  run(pool, count, [&](std::size_t j) {
    ResolventResult res =
        resolvent(problem.big_f[j], r_n, out.az_bar, problem.q, options);
    iterations[j] = res.inner_iterations;
    converged[j] = res.converged;
    out.w[j] = std::move(res.point);
  });

  for (std::size_t j = 0; j < count; ++j) {
    out.inner_iterations += iterations[j];
    out.converged = out.converged && converged[j];
  }
  out.j_star = furthest(out.w, out.az_bar);
  out.w_bar = out.w[out.j_star];
  return out;
}

double residual(const SolverState& state) {
  double r = (state.w_bar - state.az_bar).norm();
  for (const auto& y : state.y) r = std::max(r, (y - state.x).norm());
  for (const auto& z : state.z) r = std::max(r, (z - state.x).norm());
  return r;
}

SolverState evaluate(const SplitProblem& problem, std::size_t n, const Vector& x,
                     const SolverConfig& config, WorkerPool* pool) {
  SolverState s;
  s.n = n;
  s.x = x;
  s.r_n = config.r_schedule(n);

  ExtragradientSweep eg = extragradient_sweep(problem, x, config, pool);
  ResolventSweep rs = resolvent_sweep(problem, eg.z_bar, s.r_n, config, pool);

  s.y = std::move(eg.y);
  s.z = std::move(eg.z);
  s.z_bar = std::move(eg.z_bar);
  s.i_star = eg.i_star;
  s.w = std::move(rs.w);
  s.az_bar = std::move(rs.az_bar);
  s.w_bar = std::move(rs.w_bar);
  s.j_star = rs.j_star;
  s.inner_iterations = eg.inner_iterations + rs.inner_iterations;
  s.inner_converged = eg.converged && rs.converged;
  s.t = problem.c.project(
      s.z_bar + config.mu * problem.a.apply_adjoint(s.w_bar - s.az_bar));
  s.residual = residual(s);
  return s;
}

Step advance_weak(SolverState evaluated) {
  Step step;
  step.next_x = evaluated.t;
  step.state = std::move(evaluated);
  return step;
}

Step advance_hybrid(const SplitProblem& problem, SolverState evaluated,
                    HybridState& hybrid, const DykstraOptions& projection) {
  hybrid.halfspaces.push_back(halfspace_from_bisector(evaluated.t, evaluated.z_bar));
  hybrid.halfspaces.push_back(halfspace_from_bisector(evaluated.z_bar, evaluated.x));

  IntersectionProjection p = project_intersection(
      hybrid.x0, problem.c, hybrid.halfspaces, projection, &hybrid.dykstra);
  if (p.infeasible) {
    throw EmptyIntersection(
        "hybrid step " + std::to_string(evaluated.n) +
        ": outer approximation is empty (max violation " +
        std::to_string(p.max_violation) + "); the solution set is likely empty");
  }
  Step step;
  step.next_x = p.point;
  step.projection = std::move(p);
  step.state = std::move(evaluated);
  return step;
}

Step algorithm1_step(const SplitProblem& problem, const SolverState& current,
                     const SolverConfig& config, WorkerPool* pool) {
  return advance_weak(evaluate(problem, current.n, current.x, config, pool));
}

Step algorithm2_step(const SplitProblem& problem, const SolverState& current,
                     HybridState& hybrid, const SolverConfig& config,
                     WorkerPool* pool, const DykstraOptions& projection) {
  return advance_hybrid(problem, evaluate(problem, current.n, current.x, config, pool),
                        hybrid, projection);
}

SolveResult solve(const SplitProblem& problem, const SolverConfig& config,
                  Mode mode, const Vector& x0, const SolveOptions& options) {
  check_problem(problem);
  require_point(x0, problem.d1(), "solve: x0");
  if (config.max_iter == 0) throw InvalidArgument("solve: max_iter must be > 0");

  SolveResult result;
  Vector x = x0;
  if (!problem.c.contains(x, 0.0)) {
    x = problem.c.project(x);
    result.trace.start_projected = true;
  }

  std::unique_ptr<WorkerPool> pool;
  if (config.workers != 1) pool = std::make_unique<WorkerPool>(config.workers);

  HybridState hybrid;
  hybrid.x0 = x;

  Solution& sol = result.solution;
  sol.mode = mode;
  sol.start_projected = result.trace.start_projected;

  using Clock = std::chrono::steady_clock;
  for (std::size_t n = 0; n < config.max_iter; ++n) {
    const auto started = Clock::now();
    SolverState state = evaluate(problem, n, x, config, pool.get());

    TraceRecord rec;
    rec.n = n;
    rec.x = state.x;
    rec.residual = state.residual;
    rec.dist_to_known_solution =
        options.known_solution ? (state.x - *options.known_solution).norm()
                               : std::numeric_limits<double>::quiet_NaN();
    rec.norm_zbar_minus_x = (state.z_bar - state.x).norm();
    rec.norm_wbar_minus_azbar = (state.w_bar - state.az_bar).norm();
    rec.inner_iterations = state.inner_iterations;
    rec.inner_converged = state.inner_converged;
    rec.halfspace_count = mode == Mode::kHybrid ? hybrid.halfspaces.size() : 0;

    sol.x = state.x;
    sol.az_bar = state.az_bar;
    sol.w_bar = state.w_bar;
    sol.residual = state.residual;
    sol.iterations = n;

    const bool done = state.residual <= config.tol_residual;
    if (!done) {
      Step step = mode == Mode::kWeak
                      ? advance_weak(std::move(state))
                      : advance_hybrid(problem, std::move(state), hybrid,
                                       options.projection);
      if (step.projection) rec.projection_converged = step.projection->converged;
      if (options.on_step) {
        options.on_step(step, mode == Mode::kHybrid ? &hybrid : nullptr);
      }
      x = std::move(step.next_x);
    }

    if (options.record_timing) {
      rec.elapsed_ms =
          std::chrono::duration<double, std::milli>(Clock::now() - started).count();
    }
    if (options.on_record) options.on_record(rec);
    result.trace.records.push_back(std::move(rec));

    if (done) {
      sol.status = Status::kConverged;
      return result;
    }
  }
  // Budget exhausted: report the last computed iterate.
  sol.status = Status::kMaxIter;
  sol.iterations = config.max_iter;
  sol.x = x;
  return result;
}

}  // namespace spliteq
