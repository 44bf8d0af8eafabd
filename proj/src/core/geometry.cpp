// SPDX-License-Identifier: Apache-2.0

#include "core/geometry.hpp"

#include "core/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <utility>

namespace spliteq {

Halfspace::Halfspace(Vector normal, double offset)
    : normal_(std::move(normal)), offset_(offset) {
  if (!normal_.allFinite() || !std::isfinite(offset_)) {
    throw InvalidArgument("Halfspace: non-finite data");
  }
  if (normal_.norm() < kDegenerateNormal) {
    throw InvalidArgument("Halfspace: degenerate normal");
  }
}

Vector project_box(const Vector& x, const Vector& lo, const Vector& hi) {
  if (lo.size() != x.size() || hi.size() != x.size()) {
    throw InvalidArgument("project_box: dimension mismatch");
  }
  if ((lo.array() > hi.array()).any()) {
    throw InvalidSet("project_box: lo > hi");
  }
  return x.cwiseMax(lo).cwiseMin(hi);
}

Vector project_ball(const Vector& x, const Vector& center, double radius) {
  if (center.size() != x.size()) {
    throw InvalidArgument("project_ball: dimension mismatch");
  }
  if (!(radius > 0.0)) throw InvalidSet("project_ball: radius must be > 0");
  const Vector d = x - center;
  const double n = d.norm();
  if (n <= radius) return x;
  return center + (radius / n) * d;
}

Vector project_simplex(const Vector& x) {
  const auto n = x.size();
  if (n < 1) throw InvalidArgument("project_simplex: empty point");
  std::vector<double> s(x.data(), x.data() + n);
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumsum += s[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (s[k] - t > 0.0) theta = t;
  }
  return (x.array() - theta).cwiseMax(0.0).matrix();
}

Vector project_halfspace(const Vector& x, const Halfspace& h) {
  if (h.normal().size() != x.size()) {
    throw InvalidArgument("project_halfspace: dimension mismatch");
  }
  const double v = h.violation(x);
  if (v <= 0.0) return x;
  return x - (v / h.normal().squaredNorm()) * h.normal();
}

Cut halfspace_from_bisector(const Vector& near, const Vector& far) {
  if (near.size() != far.size()) {
    throw InvalidArgument("halfspace_from_bisector: dimension mismatch");
  }
  Vector normal = far - near;
  if (normal.norm() < kDegenerateNormal) return std::nullopt;
  const double offset = 0.5 * (far.squaredNorm() - near.squaredNorm());
  return Halfspace(std::move(normal), offset);
}

namespace {

class BoxSet final : public SetImpl {
 public:
  BoxSet(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size() || lo_.size() < 1) {
      throw InvalidSet("box: bounds must have equal positive length");
    }
    if ((lo_.array() > hi_.array()).any()) throw InvalidSet("box: lo > hi");
    if (lo_.hasNaN() || hi_.hasNaN()) throw InvalidSet("box: NaN bound");
  }
  Vector project(const Vector& x) const override { return project_box(x, lo_, hi_); }
  bool contains(const Vector& x, double tol) const override {
    return x.size() == lo_.size() && (x.array() >= lo_.array() - tol).all() &&
           (x.array() <= hi_.array() + tol).all();
  }
  SetKind kind() const override { return SetKind::kBox; }
  Eigen::Index dim() const override { return lo_.size(); }

  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

 private:
  Vector lo_, hi_;
};

class BallSet final : public SetImpl {
 public:
  BallSet(Vector center, double radius)
      : center_(std::move(center)), radius_(radius) {
    if (!(radius_ > 0.0)) throw InvalidSet("ball: radius must be > 0");
  }
  Vector project(const Vector& x) const override {
    return project_ball(x, center_, radius_);
  }
  bool contains(const Vector& x, double tol) const override {
    return (x - center_).norm() <= radius_ + tol;
  }
  SetKind kind() const override { return SetKind::kBall; }
  Eigen::Index dim() const override { return center_.size(); }

 private:
  Vector center_;
  double radius_;
};

class SimplexSet final : public SetImpl {
 public:
  explicit SimplexSet(Eigen::Index dim) : dim_(dim) {
    if (dim_ < 1) throw InvalidSet("simplex: dimension must be >= 1");
  }
  Vector project(const Vector& x) const override { return project_simplex(x); }
  bool contains(const Vector& x, double tol) const override {
    return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
  }
  SetKind kind() const override { return SetKind::kSimplex; }
  Eigen::Index dim() const override { return dim_; }

 private:
  Eigen::Index dim_;
};

class HalfspaceSet final : public SetImpl {
 public:
  explicit HalfspaceSet(Halfspace h) : h_(std::move(h)) {}
  const Halfspace& halfspace() const { return h_; }
  Vector project(const Vector& x) const override { return project_halfspace(x, h_); }
  bool contains(const Vector& x, double tol) const override {
    return h_.contains(x, tol);
  }
  SetKind kind() const override { return SetKind::kHalfspace; }
  Eigen::Index dim() const override { return h_.normal().size(); }

 private:
  Halfspace h_;
};

class WholeSpace final : public SetImpl {
 public:
  explicit WholeSpace(Eigen::Index dim) : dim_(dim) {}
  Vector project(const Vector& x) const override { return x; }
  bool contains(const Vector& x, double) const override {
    return dim_ < 0 || x.size() == dim_;
  }
  SetKind kind() const override { return SetKind::kWholeSpace; }
  Eigen::Index dim() const override { return dim_; }

 private:
  Eigen::Index dim_;
};

class IntersectionSet final : public SetImpl {
 public:
  explicit IntersectionSet(std::vector<ConvexSet> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw InvalidSet("intersection: no parts");
    dim_ = -1;
    for (const auto& p : parts_) {
      if (p.dim() < 0) continue;
      if (dim_ >= 0 && p.dim() != dim_) {
        throw InvalidSet("intersection: parts have different dimensions");
      }
      dim_ = p.dim();
    }
  }
  Vector project(const Vector& x) const override {
    return project_intersection(x, parts_).point;
  }
  bool contains(const Vector& x, double tol) const override {
    return std::all_of(parts_.begin(), parts_.end(),
                       [&](const ConvexSet& p) { return p.contains(x, tol); });
  }
  SetKind kind() const override { return SetKind::kIntersection; }
  Eigen::Index dim() const override { return dim_; }

 private:
  std::vector<ConvexSet> parts_;
  Eigen::Index dim_;
};

// Runs Dykstra over constraints 0..count-1 where `project_k(k, x)` projects
// onto constraint k and `distance_k(k, x)` measures its violation.
template <typename Project, typename Distance>
IntersectionProjection dykstra(const Vector& x0, std::size_t count,
                               const Project& project_k,
                               const Distance& distance_k,
                               const DykstraOptions& options,
                               DykstraState* warm) {
  DykstraState local;
  DykstraState& state = warm ? *warm : local;
  if (state.increments.size() > count) state.increments.resize(count);
  while (state.increments.size() < count) {
    state.increments.push_back(Vector::Zero(x0.size()));
  }

  Vector x = x0;
  for (const auto& p : state.increments) x -= p;

  IntersectionProjection out;
  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double displacement = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      Vector& p = state.increments[k];
      Vector y = x + p;
      Vector projected = project_k(k, y);
      Vector new_p = y - projected;
      displacement += (new_p - p).norm();
      p = std::move(new_p);
      x = std::move(projected);
    }
    out.sweeps = sweep;
    if (displacement <= options.tol) {
      out.converged = true;
      break;
    }
  }

  for (std::size_t k = 0; k < count; ++k) {
    out.max_violation = std::max(out.max_violation, distance_k(k, x));
  }
  out.point = std::move(x);
  return out;
}

}  // namespace

ConvexSet make_box(Vector lo, Vector hi) {
  return ConvexSet(std::make_shared<BoxSet>(std::move(lo), std::move(hi)));
}
ConvexSet make_ball(Vector center, double radius) {
  return ConvexSet(std::make_shared<BallSet>(std::move(center), radius));
}
ConvexSet make_simplex(Eigen::Index dim) {
  return ConvexSet(std::make_shared<SimplexSet>(dim));
}
ConvexSet make_halfspace(Halfspace h) {
  return ConvexSet(std::make_shared<HalfspaceSet>(std::move(h)));
}
ConvexSet make_whole_space(Eigen::Index dim) {
  return ConvexSet(std::make_shared<WholeSpace>(dim));
}
ConvexSet make_intersection(std::vector<ConvexSet> parts) {
  return ConvexSet(std::make_shared<IntersectionSet>(std::move(parts)));
}

BoxBounds box_bounds(const ConvexSet& set) {
  const auto* box = dynamic_cast<const BoxSet*>(&set.impl());
  if (!box) {
    throw InvalidArgument(std::string("expected a box, got ") +
                          to_string(set.kind()));
  }
  return {box->lo(), box->hi()};
}

std::optional<LinearDescription> linear_description(const ConvexSet& set,
                                                    Eigen::Index dim) {
  LinearDescription out;
  switch (set.kind()) {
    case SetKind::kWholeSpace:
      out.g = Matrix(0, dim);
      out.h = Vector(0);
      return out;
    case SetKind::kHalfspace: {
      const auto& h = dynamic_cast<const HalfspaceSet&>(set.impl()).halfspace();
      out.g = h.normal().transpose();
      out.h = Vector::Constant(1, h.offset());
      return out;
    }
    case SetKind::kBox: {
      const BoxBounds b = box_bounds(set);
      std::vector<std::pair<Eigen::Index, double>> rows;
      for (Eigen::Index i = 0; i < b.lo.size(); ++i) {
        if (std::isfinite(b.hi[i])) rows.emplace_back(i, b.hi[i]);
        if (std::isfinite(b.lo[i])) rows.emplace_back(-i - 1, -b.lo[i]);
      }
      out.g = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), b.lo.size());
      out.h = Vector(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto [idx, rhs] = rows[k];
        const auto r = static_cast<Eigen::Index>(k);
        if (idx >= 0) {
          out.g(r, idx) = 1.0;
        } else {
          out.g(r, -idx - 1) = -1.0;
        }
        out.h[r] = rhs;
      }
      return out;
    }
    default:
      return std::nullopt;
  }
}

IntersectionProjection project_intersection(const Vector& x0,
                                            const ConvexSet& base,
                                            const std::vector<Cut>& halfspaces,
                                            const DykstraOptions& options,
                                            DykstraState* warm) {
  if (!x0.allFinite()) throw InvalidArgument("project_intersection: non-finite x0");
  if (options.exact_polyhedral) {
    if (auto lin = linear_description(base, x0.size())) {
      std::size_t cuts = 0;
      for (const Cut& c : halfspaces) cuts += c ? 1 : 0;
      const Eigen::Index rows = lin->g.rows() + static_cast<Eigen::Index>(cuts);
      Matrix g(rows, x0.size());
      Vector h(rows);
      g.topRows(lin->g.rows()) = lin->g;
      h.head(lin->h.size()) = lin->h;
      Eigen::Index r = lin->g.rows();
      for (const Cut& c : halfspaces) {
        if (!c) continue;
        g.row(r) = c->normal().transpose();
        h[r] = c->offset();
        ++r;
      }
      PolyhedralProjection p = project_polyhedron(x0, g, h);
      IntersectionProjection out;
      out.point = std::move(p.point);
      out.sweeps = p.iterations;
      out.converged = p.feasible;
      out.infeasible = !p.feasible;
      out.max_violation = p.max_violation;
      return out;
    }
  }
  // Whole-space cuts are kept in the index space (their increments stay
  // zero) so that warm states line up with the cut list.
  auto project_k = [&](std::size_t k, const Vector& y) -> Vector {
    if (k == 0) return base.project(y);
    const Cut& cut = halfspaces[k - 1];
    return cut ? project_halfspace(y, *cut) : y;
  };
  auto distance_k = [&](std::size_t k, const Vector& y) -> double {
    if (k == 0) return (y - base.project(y)).norm();
    const Cut& cut = halfspaces[k - 1];
    return cut ? std::max(0.0, cut->violation(y)) / cut->normal().norm() : 0.0;
  };
  return dykstra(x0, halfspaces.size() + 1, project_k, distance_k, options, warm);
}

IntersectionProjection project_intersection(const Vector& x0,
                                            const std::vector<ConvexSet>& sets,
                                            const DykstraOptions& options) {
  if (sets.empty()) throw InvalidArgument("project_intersection: no sets");
  auto project_k = [&](std::size_t k, const Vector& y) { return sets[k].project(y); };
  auto distance_k = [&](std::size_t k, const Vector& y) {
    return (y - sets[k].project(y)).norm();
  };
  return dykstra(x0, sets.size(), project_k, distance_k, options, nullptr);
}

}  // namespace spliteq
