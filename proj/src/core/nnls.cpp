// SPDX-License-Identifier: Apache-2.0

#include "core/nnls.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace spliteq {

namespace {

// Least squares restricted to the passive columns; entries outside stay 0.
Vector passive_solve(const Matrix& e, const Vector& f, const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    if (passive[j]) cols.push_back(j);
  }
  Vector z = Vector::Zero(e.cols());
  if (cols.empty()) return z;
  Matrix sub(e.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = e.col(cols[k]);
  const Vector zs = sub.colPivHouseholderQr().solve(f);
  for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = zs[k];
  return z;
}

}  // namespace

NnlsResult nnls(const Matrix& e, const Vector& f, std::size_t max_iter) {
  if (e.rows() != f.size()) throw InvalidArgument("nnls: dimension mismatch");
  const Eigen::Index n = e.cols();
  if (max_iter == 0) max_iter = 3 * static_cast<std::size_t>(n) + 30;
  const double tol = 1e-13 * (1.0 + e.cwiseAbs().maxCoeff()) * (1.0 + f.norm());

  NnlsResult out;
  out.x = Vector::Zero(n);
  std::vector<bool> passive(n, false);
  std::vector<bool> blocked(n, false);
  Vector& x = out.x;

  while (out.iterations < max_iter) {
    const Vector w = e.transpose() * (f - e * x);
    Eigen::Index enter = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && !blocked[j] && w[j] > best) {
        best = w[j];
        enter = j;
      }
    }
    if (enter < 0) {
      out.converged = true;
      return out;
    }
    ++out.iterations;
    passive[enter] = true;

    Vector z = passive_solve(e, f, passive);
    if (z[enter] <= 0.0) {
      // Rounding made the entering column useless; skip it this round.
      passive[enter] = false;
      blocked[enter] = true;
      continue;
    }
    std::fill(blocked.begin(), blocked.end(), false);

    while (true) {
      double alpha = std::numeric_limits<double>::infinity();
      Eigen::Index leave = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!passive[j] || z[j] > 0.0) continue;
        const double a = x[j] <= 0.0 ? 0.0 : x[j] / (x[j] - z[j]);
        if (a < alpha) {
          alpha = a;
          leave = j;
        }
      }
      if (leave < 0) break;
      x += alpha * (z - x);
      x[leave] = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x[j] <= 0.0) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
      z = passive_solve(e, f, passive);
    }
    x = z;
  }
  return out;
}

PolyhedralProjection project_polyhedron(const Vector& x0, const Matrix& g,
                                        const Vector& h) {
  if (g.rows() != h.size() || g.cols() != x0.size()) {
    throw InvalidArgument("project_polyhedron: dimension mismatch");
  }
  const Eigen::Index d = x0.size();
  const Eigen::Index m = g.rows();
  PolyhedralProjection out;
  if (m == 0) {
    out.point = x0;
    out.feasible = true;
    return out;
  }

  // Shift to u = v - x0 and normalise rows: G u <= c.
  Matrix gn(m, d);
  Vector c(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double norm = g.row(i).norm();
    if (!(norm > 0.0)) throw InvalidArgument("project_polyhedron: zero row");
    gn.row(i) = g.row(i) / norm;
    c[i] = (h[i] - g.row(i).dot(x0)) / norm;
  }
  if ((c.array() >= 0.0).all()) {
    out.point = x0;
    out.feasible = true;
    return out;
  }

  // min ||u|| s.t. (-G) u >= -c, via NNLS on [(-G)^T; (-c)^T] and e_{d+1}.
  Matrix e(d + 1, m);
  e.topRows(d) = -gn.transpose();
  e.row(d) = -c.transpose();
  Vector f = Vector::Zero(d + 1);
  f[d] = 1.0;
  const NnlsResult sol = nnls(e, f);
  out.iterations = sol.iterations;
  const Vector r = e * sol.x - f;
  if (r.norm() <= 1e-12 || r[d] >= 0.0) {
    out.point = x0;
    out.feasible = false;
  } else {
    out.point = x0 - r.head(d) / r[d];
    out.feasible = sol.converged;
  }
  const Vector slack = gn * (out.point - x0) - c;
  out.max_violation = std::max(0.0, slack.maxCoeff());
  return out;
}

}  // namespace spliteq
