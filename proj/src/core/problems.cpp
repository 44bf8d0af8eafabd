// SPDX-License-Identifier: Apache-2.0

#include "core/problems.hpp"

#include "core/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace spliteq {

double min_symmetric_eigenvalue(const Matrix& x) {
  const Matrix sym = 0.5 * (x + x.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

bool symmetric_part_psd(const Matrix& x, double rel_tol) {
  const double scale = 1.0 + x.norm();
  return min_symmetric_eigenvalue(x) >= -rel_tol * scale;
}

Bifunction make_bilinear(const Matrix& p, const Matrix& q, const Vector& shift) {
  const double c = 0.5 * operator_norm(Matrix(p.transpose() - q)).value;
  const auto tag = symmetric_part_psd(p - q) ? MonotonicityClass::kMonotone
                                             : MonotonicityClass::kPseudomonotone;
  return Bifunction::from_form(BilinearForm{p, q, shift}, tag,
                               LipschitzConstants{c, c});
}

Bifunction make_affine(const Matrix& m, const Vector& b) {
  const auto d = m.rows();
  // An affine F is itself bilinear with Q = 0.
  const double c = 0.5 * operator_norm(m).value;
  const auto tag = symmetric_part_psd(m) ? MonotonicityClass::kMonotone
                                         : MonotonicityClass::kPseudomonotone;
  return Bifunction::from_form(BilinearForm{m, Matrix::Zero(d, d), b}, tag,
                               LipschitzConstants{c, c});
}

ConvexSet build_set(const SetSpec& spec) {
  return std::visit(
      [](const auto& s) -> ConvexSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpec>) {
          return make_box(s.lo, s.hi);
        } else if constexpr (std::is_same_v<T, BallSpec>) {
          return make_ball(s.center, s.radius);
        } else if constexpr (std::is_same_v<T, SimplexSpec>) {
          return make_simplex(s.dim);
        } else if constexpr (std::is_same_v<T, HalfspaceSpec>) {
          return make_halfspace(Halfspace(s.normal, s.offset));
        } else {
          return make_whole_space(s.dim);
        }
      },
      spec);
}

Eigen::Index set_dim(const SetSpec& spec) {
  return std::visit(
      [](const auto& s) -> Eigen::Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpec>) return s.lo.size();
        else if constexpr (std::is_same_v<T, BallSpec>) return s.center.size();
        else if constexpr (std::is_same_v<T, HalfspaceSpec>) return s.normal.size();
        else return s.dim;
      },
      spec);
}

InstanceBundle make_bundle(Matrix a, SetSpec c, SetSpec q,
                           std::vector<BilinearForm> f,
                           std::vector<BilinearForm> big_f,
                           std::optional<Vector> known_solution,
                           bool solution_unique, std::uint64_t seed) {
  const auto d1 = a.cols();
  const auto d2 = a.rows();
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (d1 < 1 || d2 < 1) fail("A must have positive dimensions");
  if (!a.allFinite()) fail("A has a non-finite entry");
  if (f.empty()) fail("f: N must be >= 1");
  if (big_f.empty()) fail("F: M must be >= 1");
  if (set_dim(c) != d1) {
    fail("C: dimension " + std::to_string(set_dim(c)) + " != d1 " + std::to_string(d1));
  }
  if (set_dim(q) != d2) {
    fail("Q: dimension " + std::to_string(set_dim(q)) + " != d2 " + std::to_string(d2));
  }

  std::vector<Bifunction> fs;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& form = f[i];
    const std::string name = "f[" + std::to_string(i) + "]";
    if (form.p.rows() != d1 || form.p.cols() != d1 || form.q.rows() != d1 ||
        form.q.cols() != d1 || form.shift.size() != d1) {
      fail(name + ": expected P, Q of size d1 x d1 and q of length d1");
    }
    if (!form.p.allFinite() || !form.q.allFinite() || !form.shift.allFinite()) {
      fail(name + ": non-finite entry");
    }
    if (!symmetric_part_psd(form.q)) {
      std::ostringstream msg;
      msg << name << ": f(x, .) is not convex, min eigenvalue of sym(Q) = "
          << min_symmetric_eigenvalue(form.q);
      fail(msg.str());
    }
    fs.push_back(make_bilinear(form.p, form.q, form.shift));
  }

  std::vector<Bifunction> bigs;
  for (std::size_t j = 0; j < big_f.size(); ++j) {
    const auto& form = big_f[j];
    const std::string name = "F[" + std::to_string(j) + "]";
    if (form.p.rows() != d2 || form.p.cols() != d2 || form.shift.size() != d2) {
      fail(name + ": expected M of size d2 x d2 and b of length d2");
    }
    if (!form.p.allFinite() || !form.shift.allFinite()) {
      fail(name + ": non-finite entry");
    }
    if (!symmetric_part_psd(form.p)) {
      std::ostringstream msg;
      msg << name << ": not monotone, min eigenvalue of sym(M) = "
          << min_symmetric_eigenvalue(form.p);
      fail(msg.str());
    }
    bigs.push_back(make_affine(form.p, form.shift));
  }

  if (known_solution && known_solution->size() != d1) {
    fail("known_solution: expected length d1");
  }

  ConvexSet cset = [&] {
    try {
      return build_set(c);
    } catch (const InvalidArgument& e) {
      throw ValidationError(std::string("C: ") + e.what());
    }
  }();
  ConvexSet qset = [&] {
    try {
      return build_set(q);
    } catch (const InvalidArgument& e) {
      throw ValidationError(std::string("Q: ") + e.what());
    }
  }();

  InstanceBundle bundle{
      SplitProblem{std::move(fs), std::move(cset), std::move(bigs), std::move(qset),
                   LinearMap(std::move(a))},
      std::move(c), std::move(q), std::move(known_solution), solution_unique, seed};
  return bundle;
}

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Fill row by row so the stream order does not depend on storage order.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

Matrix symmetrized(const Matrix& x) { return 0.5 * (x + x.transpose()); }

// Random PSD matrix of the given rank with spectral scale around `scale`.
Matrix random_psd(Eigen::Index d, Eigen::Index rank, double scale,
                  std::mt19937_64& rng) {
  const Matrix b = gaussian(d, rank, rng);
  return symmetrized(scale * b * b.transpose() / static_cast<double>(d + rank));
}

}  // namespace

InstanceBundle generate_instance(std::size_t n, std::size_t m, Eigen::Index d1,
                                 Eigen::Index d2, std::uint64_t seed,
                                 bool make_unique) {
  if (n < 1 || m < 1 || d1 < 1 || d2 < 1) {
    throw InvalidArgument("generate_instance: N, M, d1, d2 must all be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> extent(1.0, 3.0);

  // Strong monotonicity modulus added to P_i - Q_i for unique instances.
  constexpr double kGamma = 0.5;

  std::vector<BilinearForm> f;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index rank = make_unique ? d1 : std::max<Eigen::Index>(1, d1 / 2);
    Matrix q = random_psd(d1, rank, 1.0, rng);
    Matrix gap = random_psd(d1, rank, 2.0, rng);
    if (make_unique) gap += kGamma * Matrix::Identity(d1, d1);
    Matrix p = symmetrized(q + gap);
    f.push_back(BilinearForm{std::move(p), std::move(q), Vector::Zero(d1)});
  }

  std::vector<BilinearForm> big_f;
  for (std::size_t j = 0; j < m; ++j) {
    const Eigen::Index rank = std::max<Eigen::Index>(1, d2 / 2);
    Matrix sym = random_psd(d2, rank, 2.0, rng);
    const Matrix g = gaussian(d2, d2, rng);
    const Matrix skew = 0.25 * (g - g.transpose()) / std::sqrt(static_cast<double>(d2));
    big_f.push_back(BilinearForm{sym + skew, Matrix::Zero(d2, d2), Vector::Zero(d2)});
  }

  auto box = [&](Eigen::Index d) {
    BoxSpec b{Vector(d), Vector(d)};
    for (Eigen::Index k = 0; k < d; ++k) {
      b.lo[k] = -extent(rng);
      b.hi[k] = extent(rng);
    }
    return b;
  };
  BoxSpec c = box(d1);
  BoxSpec q = box(d2);
  Matrix a = gaussian(d2, d1, rng) / std::sqrt(static_cast<double>(d1));

  return make_bundle(std::move(a), std::move(c), std::move(q), std::move(f),
                     std::move(big_f), Vector::Zero(d1), make_unique, seed);
}

Vector sample_point(const ConvexSet& set, Eigen::Index dim, std::mt19937_64& rng,
                    double spread) {
  if (set.kind() == SetKind::kBox) {
    const auto [lo, hi] = box_bounds(set);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = lo[k] + u(rng) * (hi[k] - lo[k]);
    return v;
  }
  std::normal_distribution<double> normal(0.0, spread);
  Vector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v[k] = normal(rng);
  return set.project(v);
}

bool sample_pseudomonotone(const Bifunction& f, const ConvexSet& set,
                           Eigen::Index dim, std::size_t samples,
                           std::mt19937_64& rng, double slack) {
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector x = sample_point(set, dim, rng);
    const Vector y = sample_point(set, dim, rng);
    const double fxy = f(x, y);
    if (fxy < 0.0) continue;
    const double fyx = f(y, x);
    if (fyx > slack * (1.0 + std::abs(fxy))) return false;
  }
  return true;
}

bool sample_monotone(const Bifunction& f, const ConvexSet& set, Eigen::Index dim,
                     std::size_t samples, std::mt19937_64& rng, double slack) {
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector x = sample_point(set, dim, rng);
    const Vector y = sample_point(set, dim, rng);
    const double fxy = f(x, y);
    const double fyx = f(y, x);
    if (fxy + fyx > slack * (1.0 + std::abs(fxy) + std::abs(fyx))) return false;
  }
  return true;
}

bool sample_lipschitz_type(const Bifunction& f, const ConvexSet& set,
                           Eigen::Index dim, std::size_t samples,
                           std::mt19937_64& rng) {
  const auto& l = f.lipschitz();
  if (!l) return false;
  std::vector<Triple> triples;
  triples.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    Vector x = sample_point(set, dim, rng);
    Vector y = sample_point(set, dim, rng);
    Vector z = sample_point(set, dim, rng);
    triples.push_back({std::move(x), std::move(y), std::move(z)});
  }
  return check_lipschitz_type(f, l->c1, l->c2, triples);
}

CertificateReport check_known_solution(const InstanceBundle& bundle,
                                       const SolverConfig& config,
                                       std::size_t samples, std::uint64_t seed,
                                       double slack) {
  CertificateReport report;
  auto fail = [&report](std::string msg) {
    report.passed = false;
    report.failures.push_back(std::move(msg));
  };
  if (!bundle.known_solution) {
    fail("no known solution recorded");
    return report;
  }
  const SplitProblem& p = bundle.problem;
  const Vector& xs = *bundle.known_solution;
  const Vector axs = p.a.apply(xs);
  std::mt19937_64 rng(seed);

  if (!p.c.contains(xs, 1e-10)) fail("x* is not in C");
  if (!p.q.contains(axs, 1e-10)) fail("A x* is not in Q");

  for (std::size_t i = 0; i < p.f.size(); ++i) {
    for (std::size_t s = 0; s < samples; ++s) {
      const Vector y = sample_point(p.c, p.d1(), rng);
      const double v = p.f[i](xs, y);
      if (v < -slack * (1.0 + std::abs(v))) {
        std::ostringstream msg;
        msg << "f[" << i << "](x*, y) = " << v << " < 0";
        fail(msg.str());
        break;
      }
    }
  }
  for (std::size_t j = 0; j < p.big_f.size(); ++j) {
    for (std::size_t s = 0; s < samples; ++s) {
      const Vector v = sample_point(p.q, p.d2(), rng);
      const double val = p.big_f[j](axs, v);
      if (val < -slack * (1.0 + std::abs(val))) {
        std::ostringstream msg;
        msg << "F[" << j << "](A x*, v) = " << val << " < 0";
        fail(msg.str());
        break;
      }
    }
  }

  InnerOptions inner;
  inner.tol = config.inner_tol;
  inner.max_iter = config.inner_max_iter;
  const double lambda = config.lambda > 0.0 ? config.lambda : 0.1;
  for (std::size_t i = 0; i < p.f.size(); ++i) {
    const Vector y = prox_step(p.f[i], xs, lambda, p.c, inner).point;
    if ((y - xs).norm() > 1e-8) {
      fail("x* is not a fixed point of the prox step of f[" + std::to_string(i) + "]");
    }
  }
  const double r = config.r_schedule ? config.r_schedule(0) : 1.0;
  for (std::size_t j = 0; j < p.big_f.size(); ++j) {
    const Vector w = resolvent(p.big_f[j], r, axs, p.q, inner).point;
    if ((w - axs).norm() > 1e-8) {
      fail("A x* is not a fixed point of the resolvent of F[" + std::to_string(j) + "]");
    }
  }
  return report;
}

std::vector<Vector> brute_force_ep(const Bifunction& f, const ConvexSet& c,
                                   int grid_resolution, std::optional<double> slack) {
  if (c.kind() != SetKind::kBox) {
    throw InvalidArgument("brute_force_ep: C must be a box");
  }
  const auto [lo, hi] = box_bounds(c);
  const auto d = lo.size();
  if (d > 2) throw InvalidArgument("brute_force_ep: unsupported for d > 2");
  if (grid_resolution < 2) throw InvalidArgument("brute_force_ep: resolution >= 2");
  const double tol = slack.value_or(10.0 / grid_resolution);

  std::vector<Vector> grid;
  const int per_axis = grid_resolution;
  auto coord = [&](Eigen::Index k, int idx) {
    return lo[k] + (hi[k] - lo[k]) * idx / static_cast<double>(per_axis - 1);
  };
  if (d == 1) {
    for (int a = 0; a < per_axis; ++a) grid.push_back(Vector::Constant(1, coord(0, a)));
  } else {
    for (int a = 0; a < per_axis; ++a) {
      for (int b = 0; b < per_axis; ++b) {
        Vector v(2);
        v << coord(0, a), coord(1, b);
        grid.push_back(std::move(v));
      }
    }
  }

  std::vector<Vector> solutions;
  for (const auto& x : grid) {
    bool ok = true;
    for (const auto& y : grid) {
      if (f(x, y) < -tol) {
        ok = false;
        break;
      }
    }
    if (ok) solutions.push_back(x);
  }
  return solutions;
}

}  // namespace spliteq
