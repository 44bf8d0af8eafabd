// SPDX-License-Identifier: Apache-2.0
//
// Nonnegative least squares and the least-distance projection onto a
// polyhedron built on it.

#ifndef SPLITEQ_CORE_NNLS_HPP
#define SPLITEQ_CORE_NNLS_HPP

#include "core/core.hpp"

namespace spliteq {

struct NnlsResult {
  Vector x;
  std::size_t iterations = 0;
  bool converged = false;
};

// argmin ||E x - f|| subject to x >= 0 (Lawson-Hanson active set).
NnlsResult nnls(const Matrix& e, const Vector& f, std::size_t max_iter = 0);

struct PolyhedralProjection {
  Vector point;
  bool feasible = false;
  std::size_t iterations = 0;
  // Largest constraint violation of `point`, measured as a distance.
  double max_violation = 0.0;
};

// Euclidean projection of x0 onto {v : G v <= h}. Rows of G must be
// nonzero. An empty polyhedron is reported through `feasible`.
PolyhedralProjection project_polyhedron(const Vector& x0, const Matrix& g,
                                        const Vector& h);

}  // namespace spliteq

#endif  // SPLITEQ_CORE_NNLS_HPP
