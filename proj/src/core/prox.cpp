// SPDX-License-Identifier: Apache-2.0

#include "core/prox.hpp"

#include "core/box_lvi.hpp"
#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spliteq {
namespace {

bool is_box(const ConvexSet& set) { return set.kind() == SetKind::kBox; }

// Linear VI <K z + c, y - z> >= 0 over C with K + K^T positive definite.
// Tries the closed forms first: the unconstrained solution when it lies in
// C, then the active-set solve on boxes.
std::optional<Vector> exact_linear_vi(const Matrix& k, const Vector& c,
                                      const ConvexSet& set,
                                      const InnerOptions& options,
                                      std::size_t& iterations) {
  iterations = 1;
  const Vector unconstrained = k.partialPivLu().solve(-c);
  if (!unconstrained.allFinite()) return std::nullopt;
  if (set.kind() == SetKind::kWholeSpace || set.contains(unconstrained, 0.0)) {
    return unconstrained;
  }
  if (options.exact_box && is_box(set)) {
    const auto [lo, hi] = box_bounds(set);
    std::size_t solves = 0;
    auto z = solve_box_lvi(k, c, lo, hi, 0, &solves);
    iterations += solves;
    return z;
  }
  return std::nullopt;
}

// Projected gradient on a smooth strongly convex objective. With `adaptive`
// the step 1/l is found by backtracking on the local gradient Lipschitz
// estimate |grad(next) - grad(y)| <= l |next - y|, which stays reliable when
// objective differences are at rounding level. The certificate is the
// unit-step prox-gradient residual ||y - P_C(y - grad phi(y))||.
template <typename Gradient>
ProxResult projected_gradient(const Gradient& gradient, Vector y, const ConvexSet& c,
                              double lipschitz, bool adaptive,
                              const InnerOptions& options) {
  ProxResult out;
  double l = std::max(lipschitz, 1.0);
  Vector g = gradient(y);
  for (std::size_t k = 0; k < options.max_iter; ++k) {
    const double residual = (y - c.project(y - g)).norm();
    out.inner_iterations = k;
    if (residual <= options.tol) {
      out.converged = true;
      out.objective_gap_bound = 0.5 * residual * residual;
      out.point = std::move(y);
      return out;
    }
    Vector next;
    Vector g_next;
    for (int tries = 0; tries < 60; ++tries) {
      next = c.project(y - g / l);
      g_next = gradient(next);
      if (!adaptive) break;
      const double moved = (next - y).norm();
      if ((g_next - g).norm() <= l * moved) break;
      l *= 2.0;
    }
    y = std::move(next);
    g = std::move(g_next);
    if (adaptive) l = std::max(1.0, l / 1.5);
  }
  const double residual = (y - c.project(y - g)).norm();
  out.inner_iterations = options.max_iter;
  out.converged = residual <= options.tol;
  out.objective_gap_bound = 0.5 * residual * residual;
  out.point = std::move(y);
  return out;
}

// Subgradient descent for the 1-strongly convex objective with steps
// 2/(k+2) and k-weighted averaging; gap(avg) <= 2 G^2 / (k + 1).
template <typename Subgradient>
ProxResult averaged_subgradient(const Subgradient& subgradient, Vector y,
                                const ConvexSet& c, const InnerOptions& options) {
  ProxResult out;
  Vector average = y;
  double weight_sum = 0.0;
  double g_max = 0.0;
  for (std::size_t k = 0; k < options.max_iter; ++k) {
    const Vector g = subgradient(y);
    g_max = std::max(g_max, g.norm());
    const double w = static_cast<double>(k + 1);
    weight_sum += w;
    average += (w / weight_sum) * (y - average);
    out.inner_iterations = k + 1;
    out.objective_gap_bound = 2.0 * g_max * g_max / static_cast<double>(k + 2);
    if (out.objective_gap_bound <= options.tol) {
      out.converged = true;
      break;
    }
    y = c.project(y - (2.0 / static_cast<double>(k + 2)) * g);
  }
  out.point = c.project(average);
  return out;
}

}  // namespace

ProxResult prox_step(const Bifunction& f, const Vector& first, const Vector& x,
                     double lambda, const ConvexSet& c,
                     const InnerOptions& options) {
  if (!(lambda > 0.0)) throw InvalidArgument("prox_step: lambda must be > 0");
  if (!x.allFinite() || !first.allFinite()) {
    throw InvalidArgument("prox_step: non-finite point");
  }
  if (first.size() != x.size()) {
    throw InvalidArgument("prox_step: dimension mismatch");
  }

  if (const auto& form = f.form()) {
    // phi(y) = lambda <P u + Q y + q, y - u> + 1/2 ||y - x||^2 with u = first.
    // grad phi = H y + g0, H = I + lambda (Q + Q^T).
    const Vector pu = form->p * first + form->shift;
    if (form->linear_in_second()) {
      ProxResult out;
      out.point = c.project(x - lambda * pu);
      out.converged = true;
      out.inner_iterations = 1;
      return out;
    }
    const auto d = x.size();
    const Matrix h = Matrix::Identity(d, d) +
                     lambda * (form->q + form->q.transpose());
    const Vector g0 = lambda * (pu - form->q.transpose() * first) - x;
    std::size_t solves = 0;
    if (auto exact = exact_linear_vi(h, g0, c, options, solves)) {
      ProxResult out;
      out.point = std::move(*exact);
      out.inner_iterations = solves;
      out.converged = true;
      return out;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
      throw ContractViolation("prox_step: f(x, .) is not convex (Q + Q^T not PSD)");
    }
    const double l = eig.eigenvalues().maxCoeff();
    auto gradient = [&](const Vector& y) -> Vector { return h * y + g0; };
    return projected_gradient(gradient, c.project(x), c, l, false, options);
  }

  auto gradient = [&](const Vector& y) -> Vector {
    return lambda * f.subgradient(first, y) + (y - x);
  };
  if (f.smooth()) {
    return projected_gradient(gradient, c.project(x), c, 1.0, true, options);
  }
  return averaged_subgradient(gradient, c.project(x), c, options);
}

namespace {

ResolventResult affine_resolvent(const BilinearForm& form, double r,
                                 const Vector& x, const ConvexSet& q,
                                 const InnerOptions& options) {
  // (M + I/r) z + (b - x/r) with M = P, b = shift; scaled by r for the solve.
  const auto d = x.size();
  const Matrix& m = form.p;
  const Matrix k = Matrix::Identity(d, d) + r * m;
  const Vector c = r * form.shift - x;
  ResolventResult out;
  std::size_t solves = 0;
  if (auto exact = exact_linear_vi(k, c, q, options, solves)) {
    out.point = std::move(*exact);
    out.inner_iterations = solves;
    out.converged = true;
    return out;
  }

  // Projected fixed point z <- P_Q(z - tau (M z + b + (z - x)/r)). The map
  // contracts with factor sqrt(1 - 2 tau a + tau^2 L^2), a = 1/r,
  // L = ||M|| + 1/r, and tau = a / L^2 minimizes it.
  const double norm_m = kNormSafetyFactor * operator_norm(m).value;
  const double a = 1.0 / r;
  const double l = norm_m + a;
  const double tau = r / ((1.0 + r * norm_m) * (1.0 + r * norm_m));
  const double factor =
      std::sqrt(std::max(0.0, 1.0 - 2.0 * tau * a + tau * tau * l * l));
  const double to_fixed_point = factor / (1.0 - factor);

  Vector z = q.project(k.partialPivLu().solve(-c));
  if (!z.allFinite()) z = q.project(x);
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    Vector next = q.project(z - tau * (m * z + form.shift + (z - x) / r));
    const double step = (next - z).norm();
    z = std::move(next);
    out.inner_iterations = it;
    // Distance from z to the fixed point is at most factor/(1-factor) * step.
    out.residual = to_fixed_point * step;
    if (out.residual <= options.tol) {
      out.converged = true;
      break;
    }
  }
  out.point = std::move(z);
  return out;
}

// Extragradient on the strongly monotone G(z, y) = F(z, y) + (1/r)<y - z, z - x>.
ResolventResult generic_resolvent(const Bifunction& big_f, double r,
                                  const Vector& x, const ConvexSet& q,
                                  const InnerOptions& options) {
  const auto& lf = big_f.lipschitz();
  if (!lf) {
    throw ContractViolation(
        "resolvent: F needs Lipschitz-type constants for the inner solver");
  }
  // The regularizing term has Lipschitz-type constants 1/(2r) each.
  const double c_max = std::max(lf->c1, lf->c2) + 0.5 / r;
  const double rho = 0.25 / c_max;

  Bifunction g(
      [&big_f, &x, r](const Vector& z, const Vector& y) {
        return big_f(z, y) + (y - z).dot(z - x) / r;
      },
      [&big_f, &x, r](const Vector& z, const Vector& y) -> Vector {
        return big_f.subgradient(z, y) + (z - x) / r;
      },
      MonotonicityClass::kMonotone, LipschitzConstants{c_max, c_max},
      big_f.smooth());

  InnerOptions sub = options;
  sub.tol = std::max(options.tol * 1e-2, 1e-15);

  ResolventResult out;
  Vector z = q.project(x);
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const ProxResult predict = prox_step(g, z, z, rho, q, sub);
    const ProxResult correct = prox_step(g, predict.point, z, rho, q, sub);
    const double step = (correct.point - z).norm();
    z = correct.point;
    out.inner_iterations = it;
    out.residual = step;
    if (step <= options.tol) {
      out.converged = true;
      break;
    }
  }
  out.point = std::move(z);
  return out;
}

}  // namespace

ResolventResult resolvent(const Bifunction& big_f, double r, const Vector& x,
                          const ConvexSet& q, const InnerOptions& options) {
  if (big_f.tag() != MonotonicityClass::kMonotone) {
    throw ContractViolation("resolvent: F must be monotone");
  }
  if (!(r > 0.0)) throw InvalidArgument("resolvent: r must be > 0");
  if (!x.allFinite()) throw InvalidArgument("resolvent: non-finite point");

  if (const auto& form = big_f.form(); form && form->linear_in_second()) {
    return affine_resolvent(*form, r, x, q, options);
  }
  return generic_resolvent(big_f, r, x, q, options);
}

bool check_firmly_nonexpansive(const Bifunction& big_f, double r,
                               const ConvexSet& q,
                               const std::vector<std::pair<Vector, Vector>>& samples,
                               double slack, const InnerOptions& options) {
  for (const auto& [x, y] : samples) {
    const Vector tx = resolvent(big_f, r, x, q, options).point;
    const Vector ty = resolvent(big_f, r, y, q, options).point;
    const Vector d = tx - ty;
    if (d.squaredNorm() > d.dot(x - y) + slack) return false;
  }
  return true;
}

bool check_resolvent_continuity(const Bifunction& big_f, double r, double s,
                                const Vector& x, const Vector& y,
                                const ConvexSet& q, double slack,
                                const InnerOptions& options) {
  if (!(r > 0.0 && s > 0.0)) {
    throw InvalidArgument("check_resolvent_continuity: r, s must be > 0");
  }
  const Vector trx = resolvent(big_f, r, x, q, options).point;
  const Vector tsy = resolvent(big_f, s, y, q, options).point;
  const double lhs = (trx - tsy).norm();
  const double rhs = (x - y).norm() + std::abs(s - r) / s * (tsy - y).norm();
  return lhs <= rhs + slack;
}

}  // namespace spliteq
