// SPDX-License-Identifier: Apache-2.0
//
// Reference computations for the tests. Written from scratch on plain
// std::vector storage so they share no code path with the library: cyclic
// Jacobi for symmetric spectra and singular values, Gaussian elimination,
// exhaustive active-set enumeration for small QPs and simplex projections,
// grid search and interval arithmetic in one dimension.

#ifndef SPLITEQ_TESTS_ORACLES_HPP
#define SPLITEQ_TESTS_ORACLES_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major

inline Mat to_mat(const Eigen::MatrixXd& m) {
  Mat out(m.rows(), Vec(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

inline Eigen::VectorXd to_eigen(const Vec& v) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi rotations).
inline Vec jacobi_eigenvalues(Mat a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline Mat transpose(const Mat& a) {
  if (a.empty()) return {};
  Mat t(a[0].size(), Vec(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

// Largest singular value via one-sided Jacobi orthogonalisation of columns.
inline double largest_singular_value(Mat a) {
  const std::size_t m = a.size(), n = a[0].size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double worst = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += a[i][p] * a[i][p];
          beta += a[i][q] * a[i][q];
          gamma += a[i][p] * a[i][q];
        }
        if (alpha == 0.0 || beta == 0.0) continue;
        worst = std::max(worst, std::abs(gamma) / std::sqrt(alpha * beta));
        if (std::abs(gamma) < 1e-300) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double ap = a[i][p], aq = a[i][q];
          a[i][p] = c * ap - s * aq;
          a[i][q] = s * ap + c * aq;
        }
      }
    }
    if (worst < 1e-15) break;
  }
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += a[i][j] * a[i][j];
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

// Solves a x = b by Gaussian elimination with partial pivoting; nullopt if
// singular to working precision.
inline std::optional<Vec> gauss_solve(Mat a, Vec b) {
  const std::size_t n = a.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= 1e-12 * (1.0 + scale)) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// min 1/2 y^T H y + g^T y  s.t.  G y <= h, H symmetric positive definite.
// Enumerates every active subset of size <= dim, solves its KKT system and
// keeps the feasible point with nonnegative multipliers and least objective.
inline std::optional<Vec> qp_enumerate(const Mat& hm, const Vec& g, const Mat& gm,
                                       const Vec& h, double feas_tol = 1e-9) {
  const std::size_t d = g.size(), m = gm.size();
  std::optional<Vec> best;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> active;
  auto objective = [&](const Vec& y) {
    double v = 0;
    for (std::size_t i = 0; i < d; ++i) {
      double hy = 0;
      for (std::size_t j = 0; j < d; ++j) hy += hm[i][j] * y[j];
      v += 0.5 * y[i] * hy + g[i] * y[i];
    }
    return v;
  };
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    active.clear();
    for (std::size_t k = 0; k < m; ++k)
      if (mask & (std::size_t{1} << k)) active.push_back(k);
    if (active.size() > d) continue;
    const std::size_t s = active.size();
    Mat kkt(d + s, Vec(d + s, 0.0));
    Vec rhs(d + s, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) kkt[i][j] = hm[i][j];
      rhs[i] = -g[i];
    }
    for (std::size_t a = 0; a < s; ++a) {
      for (std::size_t j = 0; j < d; ++j) {
        kkt[d + a][j] = gm[active[a]][j];
        kkt[j][d + a] = gm[active[a]][j];
      }
      rhs[d + a] = h[active[a]];
    }
    auto sol = gauss_solve(kkt, rhs);
    if (!sol) continue;
    Vec y(sol->begin(), sol->begin() + d);
    bool ok = true;
    for (std::size_t a = 0; a < s && ok; ++a) ok = (*sol)[d + a] >= -feas_tol;
    for (std::size_t k = 0; k < m && ok; ++k) {
      double v = -h[k];
      for (std::size_t j = 0; j < d; ++j) v += gm[k][j] * y[j];
      ok = v <= feas_tol;
    }
    if (!ok) continue;
    const double obj = objective(y);
    if (obj < best_obj) {
      best_obj = obj;
      best = y;
    }
  }
  return best;
}

// Euclidean projection of x0 onto {G y <= h}.
inline std::optional<Vec> project_polyhedron(const Vec& x0, const Mat& gm, const Vec& h) {
  const std::size_t d = x0.size();
  Mat id(d, Vec(d, 0.0));
  Vec g(d);
  for (std::size_t i = 0; i < d; ++i) {
    id[i][i] = 1.0;
    g[i] = -x0[i];
  }
  return qp_enumerate(id, g, gm, h);
}

// Box facets lo <= y <= hi as rows of G y <= h.
inline void append_box(Mat& gm, Vec& h, const Vec& lo, const Vec& hi) {
  const std::size_t d = lo.size();
  for (std::size_t i = 0; i < d; ++i) {
    Vec up(d, 0.0), down(d, 0.0);
    up[i] = 1.0;
    down[i] = -1.0;
    gm.push_back(up);
    h.push_back(hi[i]);
    gm.push_back(down);
    h.push_back(-lo[i]);
  }
}

// Projection onto the probability simplex by enumerating every support set:
// on the support v = x - theta with theta fixed by the sum constraint.
inline Vec project_simplex(const Vec& x) {
  const std::size_t d = x.size();
  Vec best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < (std::size_t{1} << d); ++mask) {
    double sum = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (std::size_t{1} << i)) {
        sum += x[i];
        ++count;
      }
    const double theta = (sum - 1.0) / static_cast<double>(count);
    Vec v(d, 0.0);
    bool ok = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask & (std::size_t{1} << i)) {
        v[i] = x[i] - theta;
        if (v[i] < -1e-15) ok = false;
      }
    }
    if (!ok) continue;
    double dist = 0;
    for (std::size_t i = 0; i < d; ++i) dist += (v[i] - x[i]) * (v[i] - x[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = v;
    }
  }
  return best;
}

// One-dimensional {v : a v <= b} constraints intersected with [lo, hi]; the
// projection of x0 onto the resulting interval.
struct Interval {
  double lo, hi;
};
inline std::optional<double> project_interval(double x0, Interval box,
                                              const std::vector<std::pair<double, double>>& cuts) {
  Interval iv = box;
  for (const auto& [a, b] : cuts) {
    if (a > 0) iv.hi = std::min(iv.hi, b / a);
    else if (a < 0) iv.lo = std::max(iv.lo, b / a);
    else if (b < 0) return std::nullopt;
  }
  if (iv.lo > iv.hi) return std::nullopt;
  return std::clamp(x0, iv.lo, iv.hi);
}

// Minimiser of phi over a uniform grid on [lo, hi]^2.
template <typename Phi>
Vec grid_argmin_2d(const Phi& phi, double lo, double hi, int res) {
  Vec best(2);
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= res; ++i) {
    for (int j = 0; j <= res; ++j) {
      const Vec y{lo + (hi - lo) * i / res, lo + (hi - lo) * j / res};
      const double v = phi(y);
      if (v < best_val) {
        best_val = v;
        best = y;
      }
    }
  }
  return best;
}

// lambda <P u + Q y + q, y - u> + 1/2 |y - x|^2 as 1/2 y^T H y + g^T y.
inline std::pair<Mat, Vec> prox_quadratic(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                                          const Eigen::VectorXd& shift,
                                          const Eigen::VectorXd& u, const Eigen::VectorXd& x,
                                          double lambda) {
  const auto d = x.size();
  Mat h(d, Vec(d));
  Vec g(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double lin = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
      h[i][j] = lambda * (q(i, j) + q(j, i)) + (i == j ? 1.0 : 0.0);
      lin += p(i, j) * u[j] - q(j, i) * u[j];
    }
    g[i] = lambda * (lin + shift[i]) - x[i];
  }
  return {h, g};
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c,
                                     double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index d, double scale = 1.0) {
  return random_matrix(rng, d, 1, scale);
}

inline Eigen::VectorXd uniform_vector(std::mt19937_64& rng, Eigen::Index d, double lo,
                                      double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

}  // namespace oracle

#endif  // SPLITEQ_TESTS_ORACLES_HPP
