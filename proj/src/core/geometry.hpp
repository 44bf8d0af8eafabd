// SPDX-License-Identifier: Apache-2.0
//
// Projection oracles for the concrete convex sets, plus projection onto a
// base set cut by a list of halfspaces (exact for polyhedral bases,
// Dykstra's alternating projections otherwise).

#ifndef SPLITEQ_CORE_GEOMETRY_HPP
#define SPLITEQ_CORE_GEOMETRY_HPP

#include "core/core.hpp"

#include <optional>
#include <vector>

namespace spliteq {

// Normals shorter than this are treated as degenerate.
inline constexpr double kDegenerateNormal = 1e-14;

// {v : <normal, v> <= offset}
class Halfspace {
 public:
  // Throws InvalidArgument when ||normal|| < kDegenerateNormal.
  Halfspace(Vector normal, double offset);

  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }
  // Signed constraint value <normal, v> - offset.
  double violation(const Vector& v) const { return normal_.dot(v) - offset_; }
  bool contains(const Vector& v, double tol) const {
    return violation(v) <= tol * normal_.norm();
  }

 private:
  Vector normal_;
  double offset_;
};

// A bisector cut is either a genuine halfspace or the whole space.
using Cut = std::optional<Halfspace>;

class InvalidSet : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

Vector project_box(const Vector& x, const Vector& lo, const Vector& hi);
Vector project_ball(const Vector& x, const Vector& center, double radius);
// Euclidean projection onto {v >= 0, sum v = 1} (sort and threshold).
Vector project_simplex(const Vector& x);
Vector project_halfspace(const Vector& x, const Halfspace& h);

// {v : ||near - v|| <= ||far - v||}; the whole space when near == far.
Cut halfspace_from_bisector(const Vector& near, const Vector& far);

ConvexSet make_box(Vector lo, Vector hi);
ConvexSet make_ball(Vector center, double radius);
ConvexSet make_simplex(Eigen::Index dim);
ConvexSet make_halfspace(Halfspace h);
ConvexSet make_whole_space(Eigen::Index dim = -1);
// Intersection of the parts; projection runs Dykstra with default settings.
ConvexSet make_intersection(std::vector<ConvexSet> parts);

// Accessors for set parameters (throw InvalidArgument on kind mismatch).
struct BoxBounds {
  Vector lo, hi;
};
BoxBounds box_bounds(const ConvexSet& set);

// {v : G v <= h} for box, halfspace and whole-space sets (infinite box
// bounds produce no row); nullopt for anything else.
struct LinearDescription {
  Matrix g;
  Vector h;
};
std::optional<LinearDescription> linear_description(const ConvexSet& set,
                                                    Eigen::Index dim);

struct DykstraOptions {
  double tol = 1e-10;
  std::size_t max_sweeps = 10'000;
  // Box, halfspace and whole-space bases are projected exactly through
  // project_polyhedron; false forces Dykstra for every base.
  bool exact_polyhedral = true;
};

// Dykstra correction terms, one per constraint in the order
// {base, halfspaces...}. Passing the state of a previous call on a prefix of
// the same constraint list resumes the dual ascent instead of restarting.
struct DykstraState {
  std::vector<Vector> increments;
};

struct IntersectionProjection {
  Vector point;
  std::size_t sweeps = 0;
  bool converged = false;
  // Only the exact polyhedral path can certify an empty intersection;
  // Dykstra reports trouble through `converged` instead.
  bool infeasible = false;
  double max_violation = 0.0;
};

IntersectionProjection project_intersection(const Vector& x0,
                                            const ConvexSet& base,
                                            const std::vector<Cut>& halfspaces,
                                            const DykstraOptions& options = {},
                                            DykstraState* warm = nullptr);

// Dykstra over arbitrary sets; `exact_polyhedral` is ignored.
IntersectionProjection project_intersection(const Vector& x0,
                                            const std::vector<ConvexSet>& sets,
                                            const DykstraOptions& options = {});

}  // namespace spliteq

#endif  // SPLITEQ_CORE_GEOMETRY_HPP
