// SPDX-License-Identifier: Apache-2.0
//
// Concrete bifunction classes, seeded instance generation with a built-in
// solution, the JSON problem file, and the sampling checks used to certify
// instances.

#ifndef SPLITEQ_CORE_PROBLEMS_HPP
#define SPLITEQ_CORE_PROBLEMS_HPP

#include "core/core.hpp"
#include "core/geometry.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace spliteq {

// Schema violation in a problem file; the message names the field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed file whose data breaks an invariant (dimensions, PSD parts).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// f(x, y) = <P x + Q y + q, y - x>. Monotone iff sym(P - Q) is PSD;
// f(x, .) is convex iff sym(Q) is PSD. Lipschitz-type constants
// c1 = c2 = ||P^T - Q|| / 2 are attached.
Bifunction make_bilinear(const Matrix& p, const Matrix& q, const Vector& shift);

// F(u, v) = <M u + b, v - u>, monotone when sym(M) is PSD.
Bifunction make_affine(const Matrix& m, const Vector& b);

// Smallest eigenvalue of (X + X^T)/2.
double min_symmetric_eigenvalue(const Matrix& x);
// PSD up to a relative tolerance on the spectrum.
bool symmetric_part_psd(const Matrix& x, double rel_tol = 1e-12);

// Serializable description of the sets a problem file can name.
struct BoxSpec { Vector lo, hi; };
struct BallSpec { Vector center; double radius = 1.0; };
struct SimplexSpec { Eigen::Index dim = 1; };
struct HalfspaceSpec { Vector normal; double offset = 0.0; };
struct WholeSpaceSpec { Eigen::Index dim = 1; };
using SetSpec = std::variant<BoxSpec, BallSpec, SimplexSpec, HalfspaceSpec, WholeSpaceSpec>;

ConvexSet build_set(const SetSpec& spec);
Eigen::Index set_dim(const SetSpec& spec);

struct InstanceBundle {
  SplitProblem problem;
  SetSpec c_spec;
  SetSpec q_spec;
  std::optional<Vector> known_solution;
  bool solution_unique = false;
  std::uint64_t seed = 0;
};

// Assembles the problem from raw data and checks every invariant: f_i need
// sym(Q_i) PSD, F_j need sym(M_j) PSD, dimensions must agree. Throws
// ValidationError naming the offending entry.
InstanceBundle make_bundle(Matrix a, SetSpec c, SetSpec q,
                           std::vector<BilinearForm> f, std::vector<BilinearForm> big_f,
                           std::optional<Vector> known_solution,
                           bool solution_unique, std::uint64_t seed);

// Random instance with 0 in the solution set: q_i = 0, b_j = 0, boxes
// around 0. With make_unique the f_i are strongly monotone, so the solution
// set is {0}.
InstanceBundle generate_instance(std::size_t n, std::size_t m, Eigen::Index d1,
                                 Eigen::Index d2, std::uint64_t seed,
                                 bool make_unique);

InstanceBundle load_problem(const std::string& path);
InstanceBundle parse_problem(const std::string& text);
void save_problem(const InstanceBundle& bundle, const std::string& path);
std::string dump_problem(const InstanceBundle& bundle);

// Uniform on boxes; otherwise the projection of a Gaussian point scaled by
// `spread`.
Vector sample_point(const ConvexSet& set, Eigen::Index dim, std::mt19937_64& rng,
                    double spread = 3.0);

// Falsifiers over sampled pairs drawn from `set`.
bool sample_pseudomonotone(const Bifunction& f, const ConvexSet& set,
                           Eigen::Index dim, std::size_t samples,
                           std::mt19937_64& rng, double slack = 1e-10);
bool sample_monotone(const Bifunction& f, const ConvexSet& set, Eigen::Index dim,
                     std::size_t samples, std::mt19937_64& rng,
                     double slack = 1e-10);
bool sample_lipschitz_type(const Bifunction& f, const ConvexSet& set,
                           Eigen::Index dim, std::size_t samples,
                           std::mt19937_64& rng);

struct CertificateReport {
  bool passed = true;
  std::vector<std::string> failures;
};

// Checks x* against every EP in the family by sampling, A x* in Q, and the
// prox / resolvent fixed-point property at x* (to 1e-8).
CertificateReport check_known_solution(const InstanceBundle& bundle,
                                       const SolverConfig& config,
                                       std::size_t samples, std::uint64_t seed,
                                       double slack = 1e-10);

// Grid points x of a box (d <= 2) with min over grid y of f(x, y) >= -slack.
// slack defaults to 10 / grid_resolution.
std::vector<Vector> brute_force_ep(const Bifunction& f, const ConvexSet& c,
                                   int grid_resolution,
                                   std::optional<double> slack = std::nullopt);

}  // namespace spliteq

#endif  // SPLITEQ_CORE_PROBLEMS_HPP
