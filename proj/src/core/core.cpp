// SPDX-License-Identifier: Apache-2.0

#include "core/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace spliteq {

bool is_finite(const Vector& v) { return v.allFinite(); }

void require_point(const Vector& v, Eigen::Index dim, const char* what) {
  if (v.size() != dim) {
    std::ostringstream msg;
    msg << what << ": expected dimension " << dim << ", got " << v.size();
    throw InvalidArgument(msg.str());
  }
  if (!v.allFinite()) {
    throw InvalidArgument(std::string(what) + ": non-finite coordinate");
  }
}

LinearMap::LinearMap(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1) {
    throw InvalidArgument("LinearMap: dimensions must be positive");
  }
  if (!matrix_.allFinite()) {
    throw InvalidArgument("LinearMap: non-finite entry");
  }
}

Vector LinearMap::apply(const Vector& x) const {
  require_point(x, domain_dim(), "LinearMap::apply");
  return matrix_ * x;
}

Vector LinearMap::apply_adjoint(const Vector& u) const {
  require_point(u, range_dim(), "LinearMap::apply_adjoint");
  return matrix_.transpose() * u;
}

NormEstimate operator_norm(const Matrix& a, double tol, int max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("operator_norm: tol must be positive");
  NormEstimate est;
  if (a.size() == 0 || a.isZero(0.0)) {
    est.converged = true;
    return est;
  }
  Vector v = Vector::Ones(a.cols()).normalized();
  double prev = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    Vector w = a.transpose() * (a * v);
    const double norm_w = w.norm();
    est.iterations = k;
    if (norm_w == 0.0) {
      // Start vector in the null space of A^T A; restart from a unit basis
      // vector not orthogonal to the row space.
      Eigen::Index col = 0;
      a.colwise().norm().maxCoeff(&col);
      v = Vector::Unit(a.cols(), col);
      continue;
    }
    // Rayleigh quotient of A^T A at v gives sigma^2 from below.
    const double sigma = std::sqrt(v.dot(w));
    v = w / norm_w;
    est.value = sigma;
    if (std::abs(sigma - prev) <= tol * sigma) {
      est.converged = true;
      return est;
    }
    prev = sigma;
  }
  return est;
}

const char* to_string(MonotonicityClass c) {
  return c == MonotonicityClass::kMonotone ? "monotone" : "pseudomonotone";
}

Bifunction::Bifunction(Eval eval, Subgradient subgradient,
                       MonotonicityClass tag,
                       std::optional<LipschitzConstants> lipschitz,
                       bool smooth)
    : eval_(std::move(eval)),
      subgradient_(std::move(subgradient)),
      tag_(tag),
      lipschitz_(lipschitz),
      smooth_(smooth) {
  if (!eval_ || !subgradient_) {
    throw InvalidArgument("Bifunction: evaluator and subgradient required");
  }
  if (lipschitz_ && (lipschitz_->c1 < 0.0 || lipschitz_->c2 < 0.0)) {
    throw InvalidArgument("Bifunction: Lipschitz-type constants must be >= 0");
  }
}

Bifunction Bifunction::from_form(BilinearForm form, MonotonicityClass tag,
                                 std::optional<LipschitzConstants> lipschitz) {
  const auto d = form.p.rows();
  if (form.p.cols() != d || form.q.rows() != d || form.q.cols() != d ||
      form.shift.size() != d) {
    throw InvalidArgument("Bifunction::from_form: inconsistent dimensions");
  }
  auto shared = std::make_shared<const BilinearForm>(form);
  Eval eval = [shared](const Vector& x, const Vector& y) {
    return (shared->p * x + shared->q * y + shared->shift).dot(y - x);
  };
  // grad_y <Px + Qy + q, y - x> = Px + q + (Q + Q^T) y - Q^T x
  Subgradient grad = [shared](const Vector& x, const Vector& y) {
    const Matrix& q = shared->q;
    Vector g = shared->p * x + shared->shift + q * y + q.transpose() * (y - x);
    return g;
  };
  Bifunction f(std::move(eval), std::move(grad), tag, lipschitz, true);
  f.form_ = std::move(form);
  return f;
}

Bifunction Bifunction::without_structure() const {
  Bifunction copy = *this;
  copy.form_.reset();
  return copy;
}

const char* to_string(SetKind kind) {
  switch (kind) {
    case SetKind::kBox: return "box";
    case SetKind::kBall: return "ball";
    case SetKind::kSimplex: return "simplex";
    case SetKind::kHalfspace: return "halfspace";
    case SetKind::kIntersection: return "intersection";
    case SetKind::kWholeSpace: return "whole-space";
  }
  return "unknown";
}

ConvexSet::ConvexSet(std::shared_ptr<const SetImpl> impl)
    : impl_(std::move(impl)) {
  if (!impl_) throw InvalidArgument("ConvexSet: null description");
}

Vector ConvexSet::project(const Vector& x) const { return impl_->project(x); }
bool ConvexSet::contains(const Vector& x, double tol) const {
  return impl_->contains(x, tol);
}
SetKind ConvexSet::kind() const { return impl_->kind(); }
Eigen::Index ConvexSet::dim() const { return impl_->dim(); }

void check_problem(const SplitProblem& problem) {
  if (problem.f.empty()) throw InvalidArgument("split problem: N must be >= 1");
  if (problem.big_f.empty()) throw InvalidArgument("split problem: M must be >= 1");
  for (std::size_t j = 0; j < problem.big_f.size(); ++j) {
    if (problem.big_f[j].tag() != MonotonicityClass::kMonotone) {
      throw ContractViolation("split problem: F[" + std::to_string(j) +
                              "] must be monotone");
    }
  }
  const auto cd = problem.c.dim();
  const auto qd = problem.q.dim();
  if (cd >= 0 && cd != problem.d1()) {
    throw InvalidArgument("split problem: C has dimension " +
                          std::to_string(cd) + ", A expects " +
                          std::to_string(problem.d1()));
  }
  if (qd >= 0 && qd != problem.d2()) {
    throw InvalidArgument("split problem: Q has dimension " +
                          std::to_string(qd) + ", A maps into " +
                          std::to_string(problem.d2()));
  }
}

LipschitzConstants family_constants(const SplitProblem& problem) {
  LipschitzConstants c;
  for (std::size_t i = 0; i < problem.f.size(); ++i) {
    const auto& l = problem.f[i].lipschitz();
    if (!l) {
      throw ContractViolation("f[" + std::to_string(i) +
                              "] has no Lipschitz-type constants");
    }
    c.c1 = std::max(c.c1, l->c1);
    c.c2 = std::max(c.c2, l->c2);
  }
  return c;
}

namespace {

double lambda_bound(const LipschitzConstants& c) {
  const double b1 = c.c1 > 0.0 ? 1.0 / (2.0 * c.c1)
                               : std::numeric_limits<double>::infinity();
  const double b2 = c.c2 > 0.0 ? 1.0 / (2.0 * c.c2)
                               : std::numeric_limits<double>::infinity();
  return std::min(b1, b2);
}

double mu_bound(double norm_a) {
  const double n = kNormSafetyFactor * norm_a;
  return n > 0.0 ? 2.0 / (n * n) : std::numeric_limits<double>::infinity();
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  out << (passed ? "config OK" : "config INVALID") << " (lambda < "
      << lambda_bound << ", mu < " << mu_bound << ", ||A|| ~ " << norm_a
      << ")";
  for (const auto& v : violations) out << "\n  - " << v;
  return out.str();
}

ValidationReport validate_config(const SolverConfig& config,
                                 const SplitProblem& problem) {
  ValidationReport report;
  auto fail = [&report](std::string msg) {
    report.passed = false;
    report.violations.push_back(std::move(msg));
  };

  std::optional<LipschitzConstants> constants;
  try {
    constants = family_constants(problem);
  } catch (const ContractViolation& e) {
    fail(e.what());
  }

  if (constants) {
    report.lambda_bound = lambda_bound(*constants);
    if (!(config.lambda > 0.0 && config.lambda < report.lambda_bound)) {
      std::ostringstream msg;
      msg << "0 < lambda < min{1/(2c1), 1/(2c2)} violated: lambda = "
          << config.lambda << ", bound = " << report.lambda_bound;
      fail(msg.str());
    }
  }

  report.norm_a = operator_norm(problem.a).value;
  report.mu_bound = mu_bound(report.norm_a);
  if (!(config.mu > 0.0 && config.mu < report.mu_bound)) {
    std::ostringstream msg;
    msg << "0 < mu < 2/||A||^2 violated: mu = " << config.mu
        << ", bound = " << report.mu_bound;
    fail(msg.str());
  }

  if (!(config.r_min > 0.0)) {
    fail("r_min must be positive");
  } else if (config.r_schedule) {
    // The schedule is arbitrary code; probe the iterations the run can reach.
    const std::size_t probes = std::min<std::size_t>(config.max_iter, 100'000);
    for (std::size_t n = 0; n < probes; ++n) {
      const double r = config.r_schedule(n);
      if (!(r >= config.r_min)) {
        std::ostringstream msg;
        msg << "r_n >= r_min violated at n = " << n << ": r_n = " << r;
        fail(msg.str());
        break;
      }
    }
  } else {
    fail("r_schedule missing");
  }

  if (config.max_iter == 0) fail("max_iter must be positive");
  if (!(config.tol_residual > 0.0)) fail("tol_residual must be positive");
  if (!(config.inner_tol > 0.0)) fail("inner_tol must be positive");
  if (config.inner_max_iter == 0) fail("inner_max_iter must be positive");
  return report;
}

SolverConfig default_config(const SplitProblem& problem) {
  SolverConfig config;
  const auto c = family_constants(problem);
  const double lb = lambda_bound(c);
  config.lambda = std::isfinite(lb) ? 0.5 * lb : 1.0;
  const double norm_a = operator_norm(problem.a).value;
  config.mu = norm_a > 0.0 ? 0.9 * 2.0 / (norm_a * norm_a) : 1.0;
  return config;
}

bool check_lipschitz_type(const Bifunction& f, double c1, double c2,
                          const std::vector<Triple>& samples, double slack) {
  for (const auto& s : samples) {
    const double fxy = f(s.x, s.y);
    const double fyz = f(s.y, s.z);
    const double fxz = f(s.x, s.z);
    const double dxy = (s.x - s.y).squaredNorm();
    const double dyz = (s.y - s.z).squaredNorm();
    const double lhs = fxy + fyz;
    const double rhs = fxz - c1 * dxy - c2 * dyz;
    const double scale = 1.0 + std::abs(fxy) + std::abs(fyz) + std::abs(fxz) +
                         c1 * dxy + c2 * dyz;
    if (lhs < rhs - slack * scale) return false;
  }
  return true;
}

}  // namespace spliteq
