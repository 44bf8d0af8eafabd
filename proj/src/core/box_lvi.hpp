// SPDX-License-Identifier: Apache-2.0
//
// Box-constrained linear variational inequality:
//   find z in [lo, hi] with <K z + c, y - z> >= 0 for all y in [lo, hi].
// Both inner problems reduce to this when the bifunction is bilinear and the
// constraint set is a box.

#ifndef SPLITEQ_CORE_BOX_LVI_HPP
#define SPLITEQ_CORE_BOX_LVI_HPP

#include "core/core.hpp"

#include <optional>

namespace spliteq {

// Primal-dual active set iteration started from P_box(K^{-1}(-c)). Returns
// the solution only if it passes the KKT check; nullopt means the caller
// should fall back to an iterative method. Requires K + K^T positive
// definite. `iterations`, when given, receives the number of linear solves.
std::optional<Vector> solve_box_lvi(const Matrix& k, const Vector& c,
                                    const Vector& lo, const Vector& hi,
                                    int max_iter = 0,
                                    std::size_t* iterations = nullptr);

// True if z satisfies the KKT conditions of the box LVI to a relative
// tolerance tol.
bool box_lvi_kkt(const Matrix& k, const Vector& c, const Vector& lo,
                 const Vector& hi, const Vector& z, double tol = 1e-12);

}  // namespace spliteq

#endif  // SPLITEQ_CORE_BOX_LVI_HPP
