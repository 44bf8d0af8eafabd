// SPDX-License-Identifier: Apache-2.0
//
// Outer iterations for split equilibrium problems.
//
// Weak mode (parallel extragradient-proximal method), iteration n:
//   y_i = argmin{ lambda f_i(x_n, y) + 1/2||y - x_n||^2 : y in C }
//   z_i = argmin{ lambda f_i(y_i, y) + 1/2||y - x_n||^2 : y in C }
//   z_bar = z_i furthest from x_n
//   w_j = T_{r_n}^{F_j}(A z_bar),  w_bar = w_j furthest from A z_bar
//   x_{n+1} = P_C(z_bar + mu A^T (w_bar - A z_bar))
//
// Hybrid mode keeps the same sweeps, calls the last point t_n and instead
// sets x_{n+1} = P_{C_{n+1}}(x_0) with
//   C_{n+1} = { v in C_n : ||t_n - v|| <= ||z_bar - v|| <= ||x_n - v|| }.

#ifndef SPLITEQ_CORE_SOLVER_HPP
#define SPLITEQ_CORE_SOLVER_HPP

#include "core/core.hpp"
#include "core/geometry.hpp"
#include "core/worker_pool.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace spliteq {

enum class Mode { kWeak, kHybrid };
const char* to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

// Raised when the hybrid outer approximation becomes empty. With a nonempty
// solution set that cannot happen, so it signals bad problem data.
class EmptyIntersection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExtragradientSweep {
  std::vector<Vector> y;
  std::vector<Vector> z;
  Vector z_bar;
  std::size_t i_star = 0;
  std::size_t inner_iterations = 0;
  bool converged = true;
};

// Argmax ties go to the lowest index. `pool` may be null (sequential).
ExtragradientSweep extragradient_sweep(const SplitProblem& problem,
                                       const Vector& x,
                                       const SolverConfig& config,
                                       WorkerPool* pool = nullptr);

struct ResolventSweep {
  std::vector<Vector> w;
  Vector az_bar;
  Vector w_bar;
  std::size_t j_star = 0;
  std::size_t inner_iterations = 0;
  bool converged = true;
};

ResolventSweep resolvent_sweep(const SplitProblem& problem, const Vector& z_bar,
                               double r_n, const SolverConfig& config,
                               WorkerPool* pool = nullptr);

struct SolverState {
  std::size_t n = 0;
  Vector x;
  std::vector<Vector> y;
  std::vector<Vector> z;
  Vector z_bar;
  std::size_t i_star = 0;
  std::vector<Vector> w;
  Vector az_bar;
  Vector w_bar;
  std::size_t j_star = 0;
  // P_C(z_bar + mu A^T (w_bar - A z_bar)): x_{n+1} in weak mode, t_n in
  // hybrid mode.
  Vector t;
  double r_n = 0.0;
  double residual = 0.0;
  std::size_t inner_iterations = 0;
  bool inner_converged = true;
};

// Accumulated outer approximation for hybrid mode. Two cuts per completed
// iteration; whole-space cuts are kept as empty entries.
struct HybridState {
  Vector x0;
  std::vector<Cut> halfspaces;
  DykstraState dykstra;
};

// max( max_i ||y_i - x||, max_i ||z_i - x||, ||w_bar - A z_bar|| )
double residual(const SolverState& state);

// Runs both sweeps at x = x_n and fills every field of the state.
SolverState evaluate(const SplitProblem& problem, std::size_t n, const Vector& x,
                     const SolverConfig& config, WorkerPool* pool = nullptr);

struct Step {
  SolverState state;  // iteration n, fully evaluated
  Vector next_x;      // x_{n+1}
  std::optional<IntersectionProjection> projection;  // hybrid only
};

// Evaluates iteration current.n at current.x and advances.
Step algorithm1_step(const SplitProblem& problem, const SolverState& current,
                     const SolverConfig& config, WorkerPool* pool = nullptr);
// Appends the two bisector cuts of iteration n to `hybrid` and projects
// hybrid.x0 onto C intersected with all cuts so far.
Step algorithm2_step(const SplitProblem& problem, const SolverState& current,
                     HybridState& hybrid, const SolverConfig& config,
                     WorkerPool* pool = nullptr,
                     const DykstraOptions& projection = {});

// Advances an already evaluated state (the second half of the steps above).
Step advance_weak(SolverState evaluated);
Step advance_hybrid(const SplitProblem& problem, SolverState evaluated,
                    HybridState& hybrid, const DykstraOptions& projection = {});

enum class Status { kConverged, kMaxIter };
const char* to_string(Status status);

struct Solution {
  Vector x;
  Vector az_bar;
  Vector w_bar;
  Status status = Status::kMaxIter;
  // Index of the last evaluated iteration (converged) or max_iter.
  std::size_t iterations = 0;
  double residual = 0.0;
  Mode mode = Mode::kWeak;
  bool start_projected = false;
};

struct TraceRecord {
  std::size_t n = 0;
  Vector x;
  double residual = 0.0;
  // NaN when the instance carries no known solution.
  double dist_to_known_solution = 0.0;
  double norm_zbar_minus_x = 0.0;
  double norm_wbar_minus_azbar = 0.0;
  std::size_t inner_iterations = 0;
  std::size_t halfspace_count = 0;
  double elapsed_ms = 0.0;
  bool inner_converged = true;
  bool projection_converged = true;
};

struct Trace {
  std::vector<TraceRecord> records;
  bool start_projected = false;
};

struct SolveOptions {
  std::optional<Vector> known_solution;
  bool record_timing = true;
  DykstraOptions projection;
  // Called once per trace row, as soon as it is complete.
  std::function<void(const TraceRecord&)> on_record;
  // Called after every advance with the step and (hybrid) the cut state.
  std::function<void(const Step&, const HybridState*)> on_step;
};

struct SolveResult {
  Solution solution;
  Trace trace;
};

// Iterates until the residual of the evaluated iterate drops to
// config.tol_residual or config.max_iter iterations have been evaluated.
// x0 outside C is projected first and the fact recorded.
SolveResult solve(const SplitProblem& problem, const SolverConfig& config,
                  Mode mode, const Vector& x0, const SolveOptions& options = {});

}  // namespace spliteq

#endif  // SPLITEQ_CORE_SOLVER_HPP
