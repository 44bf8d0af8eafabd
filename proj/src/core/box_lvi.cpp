// SPDX-License-Identifier: Apache-2.0

#include "core/box_lvi.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace spliteq {

bool box_lvi_kkt(const Matrix& k, const Vector& c, const Vector& lo,
                 const Vector& hi, const Vector& z, double tol) {
  const Vector w = k * z + c;
  const double scale = 1.0 + k.cwiseAbs().rowwise().sum().maxCoeff() *
                                 z.cwiseAbs().maxCoeff() +
                       c.cwiseAbs().maxCoeff();
  const double eps = tol * scale;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] < lo[i] || z[i] > hi[i]) return false;
    const bool at_lo = z[i] == lo[i];
    const bool at_hi = z[i] == hi[i];
    if (at_lo && at_hi) continue;
    if (at_lo) {
      if (w[i] < -eps) return false;
    } else if (at_hi) {
      if (w[i] > eps) return false;
    } else if (std::abs(w[i]) > eps) {
      return false;
    }
  }
  return true;
}

std::optional<Vector> solve_box_lvi(const Matrix& k, const Vector& c,
                                    const Vector& lo, const Vector& hi,
                                    int max_iter, std::size_t* iterations) {
  const auto n = c.size();
  std::size_t solves = 1;
  auto finish = [&](std::optional<Vector> z) {
    if (iterations) *iterations = solves;
    return z;
  };
  if (max_iter <= 0) max_iter = static_cast<int>(4 * n + 20);

  enum State : signed char { kFree = 0, kLower = 1, kUpper = 2 };
  Vector z = k.partialPivLu().solve(-c);
  if (!z.allFinite()) return finish(std::nullopt);
  z = z.cwiseMax(lo).cwiseMin(hi);

  std::vector<signed char> state(n, kFree), prev;
  for (int it = 0; it < max_iter; ++it) {
    const Vector w = k * z + c;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double trial = z[i] - w[i];
      state[i] = trial <= lo[i] ? kLower : (trial >= hi[i] ? kUpper : kFree);
    }
    if (state == prev && box_lvi_kkt(k, c, lo, hi, z)) return finish(z);
    prev = state;

    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] == kLower) z[i] = lo[i];
      else if (state[i] == kUpper) z[i] = hi[i];
      else free.push_back(i);
    }
    if (!free.empty()) {
      const auto nf = static_cast<Eigen::Index>(free.size());
      Matrix kff(nf, nf);
      Vector rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        rhs[a] = -c[free[a]];
        for (Eigen::Index j = 0; j < n; ++j) {
          if (state[j] != kFree) rhs[a] -= k(free[a], j) * z[j];
        }
        for (Eigen::Index b = 0; b < nf; ++b) kff(a, b) = k(free[a], free[b]);
      }
      const Vector zf = kff.partialPivLu().solve(rhs);
      ++solves;
      if (!zf.allFinite()) return finish(std::nullopt);
      for (Eigen::Index a = 0; a < nf; ++a) z[free[a]] = zf[a];
    }
    // Free components that left the box get clamped; the next pass
    // reclassifies them.
    if (box_lvi_kkt(k, c, lo, hi, z)) return finish(z);
    z = z.cwiseMax(lo).cwiseMin(hi);
  }
  return finish(std::nullopt);
}

}  // namespace spliteq
