// SPDX-License-Identifier: Apache-2.0
//
// Shared vocabulary for the split equilibrium solver: points, linear maps,
// bifunctions, convex sets, the split problem itself and the solver
// configuration with its parameter checks.

#ifndef SPLITEQ_CORE_CORE_HPP
#define SPLITEQ_CORE_CORE_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spliteq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Thrown when an argument breaks a documented precondition (dimension
// mismatch, non-finite coordinates, empty family, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a bifunction or set does not satisfy the structural
// hypotheses an operation depends on (e.g. resolvent of a non-monotone F).
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_finite(const Vector& v);

// Throws InvalidArgument naming `what` if v has a NaN/Inf or the wrong size.
void require_point(const Vector& v, Eigen::Index dim, const char* what);

// Dense linear map R^{d1} -> R^{d2}.
class LinearMap {
 public:
  explicit LinearMap(Matrix matrix);

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& u) const;

  const Matrix& matrix() const { return matrix_; }
  Eigen::Index domain_dim() const { return matrix_.cols(); }
  Eigen::Index range_dim() const { return matrix_.rows(); }

 private:
  Matrix matrix_;
};

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Spectral norm by power iteration on A^T A, started from the normalized
// all-ones vector. Stops once successive estimates agree to tol (relative).
NormEstimate operator_norm(const Matrix& a, double tol = 1e-12,
                           int max_iter = 10'000);
inline NormEstimate operator_norm(const LinearMap& a, double tol = 1e-12,
                                  int max_iter = 10'000) {
  return operator_norm(a.matrix(), tol, max_iter);
}

enum class MonotonicityClass { kPseudomonotone, kMonotone };

const char* to_string(MonotonicityClass c);

struct LipschitzConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

// f(x,y) = <P x + Q y + q, y - x>. Affine VI bifunctions are the Q = 0 case.
struct BilinearForm {
  Matrix p;
  Matrix q;
  Vector shift;

  bool linear_in_second() const { return q.isZero(0.0); }
};

// A bifunction f(x, y) together with a subgradient oracle for y -> f(x, y).
//
// `smooth` declares that y -> f(x, y) is differentiable, in which case the
// subgradient oracle returns the gradient. `form` is set when f has the
// bilinear structure above; inner solvers use it for exact steps.
//
// Hemicontinuity of F (upper limit along segments) and joint weak continuity
// of f are caller obligations; neither is checked.
class Bifunction {
 public:
  using Eval = std::function<double(const Vector&, const Vector&)>;
  using Subgradient = std::function<Vector(const Vector&, const Vector&)>;

  Bifunction(Eval eval, Subgradient subgradient, MonotonicityClass tag,
             std::optional<LipschitzConstants> lipschitz = std::nullopt,
             bool smooth = true);

  static Bifunction from_form(BilinearForm form, MonotonicityClass tag,
                              std::optional<LipschitzConstants> lipschitz);

  double operator()(const Vector& x, const Vector& y) const {
    return eval_(x, y);
  }
  Vector subgradient(const Vector& x, const Vector& y) const {
    return subgradient_(x, y);
  }

  MonotonicityClass tag() const { return tag_; }
  const std::optional<LipschitzConstants>& lipschitz() const {
    return lipschitz_;
  }
  bool smooth() const { return smooth_; }
  const std::optional<BilinearForm>& form() const { return form_; }

  // Copy of this bifunction with any bilinear structure hidden, forcing the
  // generic inner solvers. Used to cross-check the exact paths.
  Bifunction without_structure() const;

 private:
  Eval eval_;
  Subgradient subgradient_;
  MonotonicityClass tag_;
  std::optional<LipschitzConstants> lipschitz_;
  bool smooth_;
  std::optional<BilinearForm> form_;
};

enum class SetKind { kBox, kBall, kSimplex, kHalfspace, kIntersection, kWholeSpace };

const char* to_string(SetKind kind);

class SetImpl;

// Closed convex set given by its projection oracle. Immutable and cheap to
// copy; copies share the underlying description.
class ConvexSet {
 public:
  explicit ConvexSet(std::shared_ptr<const SetImpl> impl);

  Vector project(const Vector& x) const;
  bool contains(const Vector& x, double tol) const;
  SetKind kind() const;
  // Dimension of the ambient space, or -1 when unconstrained in size.
  Eigen::Index dim() const;

  const SetImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const SetImpl> impl_;
};

class SetImpl {
 public:
  virtual ~SetImpl() = default;
  virtual Vector project(const Vector& x) const = 0;
  virtual bool contains(const Vector& x, double tol) const = 0;
  virtual SetKind kind() const = 0;
  virtual Eigen::Index dim() const = 0;
};

struct SplitProblem {
  std::vector<Bifunction> f;  // on C x C
  ConvexSet c;
  std::vector<Bifunction> big_f;  // on Q x Q, all monotone
  ConvexSet q;
  LinearMap a;

  Eigen::Index d1() const { return a.domain_dim(); }
  Eigen::Index d2() const { return a.range_dim(); }
};

// Throws InvalidArgument / ContractViolation if the structural invariants of
// a split problem do not hold (family sizes, tags, set dimensions).
void check_problem(const SplitProblem& problem);

struct SolverConfig {
  double lambda = 0.0;
  double mu = 0.0;
  // Proximal parameter r_n of the resolvent at outer iteration n.
  std::function<double(std::size_t)> r_schedule = [](std::size_t) { return 1.0; };
  double r_min = 1e-3;
  std::size_t max_iter = 10'000;
  double tol_residual = 1e-6;
  double inner_tol = 1e-10;
  std::size_t inner_max_iter = 50'000;
  // Number of worker threads for the family sweeps; 0 means hardware default.
  std::size_t workers = 1;
};

// Lipschitz-type constants shared by the whole family: the componentwise
// maximum over f_i. Throws ContractViolation naming the first f_i lacking them.
LipschitzConstants family_constants(const SplitProblem& problem);

// Safety multiplier applied to the power-iteration norm estimate before
// checking the mu bound.
inline constexpr double kNormSafetyFactor = 1.01;

struct ValidationReport {
  bool passed = true;
  std::vector<std::string> violations;
  double lambda_bound = 0.0;  // min{1/(2c1), 1/(2c2)}
  double mu_bound = 0.0;      // 2 / (1.01 * ||A||_est)^2
  double norm_a = 0.0;

  std::string to_string() const;
};

ValidationReport validate_config(const SolverConfig& config,
                                 const SplitProblem& problem);

// Defaults used when no explicit lambda/mu is given: lambda at half of its
// admissible bound, mu at 0.9 * 2/||A||^2.
SolverConfig default_config(const SplitProblem& problem);

struct Triple {
  Vector x, y, z;
};

// Falsifier for f(x,y) + f(y,z) >= f(x,z) - c1||x-y||^2 - c2||y-z||^2.
bool check_lipschitz_type(const Bifunction& f, double c1, double c2,
                          const std::vector<Triple>& samples,
                          double slack = 1e-12);

}  // namespace spliteq

#endif  // SPLITEQ_CORE_CORE_HPP
