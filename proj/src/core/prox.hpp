// SPDX-License-Identifier: Apache-2.0
//
// Inner solvers: the extragradient prox-subproblem
//
//   argmin { lambda f(x, y) + 1/2 ||y - x||^2 : y in C }
//
// and the resolvent T_r^F of a monotone bifunction, i.e. the unique z in Q
// with F(z, y) + (1/r) <y - z, z - x> >= 0 for every y in Q.

#ifndef SPLITEQ_CORE_PROX_HPP
#define SPLITEQ_CORE_PROX_HPP

#include "core/core.hpp"

#include <utility>
#include <vector>

namespace spliteq {

struct InnerOptions {
  double tol = 1e-10;
  std::size_t max_iter = 50'000;
  // Allow the finite active-set solve for box-constrained linear
  // subproblems. Off forces the iterative paths.
  bool exact_box = true;
};

struct ProxResult {
  Vector point;
  std::size_t inner_iterations = 0;
  double objective_gap_bound = 0.0;
  bool converged = false;
};

struct ResolventResult {
  Vector point;
  std::size_t inner_iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Minimizes lambda f(first, y) + 1/2 ||y - x||^2 over C. The predictor step
// uses first = x; the extragradient correction uses first = y_n.
ProxResult prox_step(const Bifunction& f, const Vector& first, const Vector& x,
                     double lambda, const ConvexSet& c,
                     const InnerOptions& options = {});

inline ProxResult prox_step(const Bifunction& f, const Vector& x, double lambda,
                            const ConvexSet& c, const InnerOptions& options = {}) {
  return prox_step(f, x, x, lambda, c, options);
}

// Throws ContractViolation if F is not tagged monotone, or if F has no
// affine structure and no Lipschitz-type constants to size the inner step.
ResolventResult resolvent(const Bifunction& big_f, double r, const Vector& x,
                          const ConvexSet& q, const InnerOptions& options = {});

bool check_firmly_nonexpansive(const Bifunction& big_f, double r,
                               const ConvexSet& q,
                               const std::vector<std::pair<Vector, Vector>>& samples,
                               double slack = 1e-8,
                               const InnerOptions& options = {});

// ||T_r(x) - T_s(y)|| <= ||x - y|| + |s - r|/s ||T_s(y) - y||
bool check_resolvent_continuity(const Bifunction& big_f, double r, double s,
                                const Vector& x, const Vector& y,
                                const ConvexSet& q, double slack = 1e-8,
                                const InnerOptions& options = {});

}  // namespace spliteq

#endif  // SPLITEQ_CORE_PROX_HPP
