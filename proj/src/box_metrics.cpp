#include "pse/box_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace pse {

namespace {

constexpr double kPlaneEps = 1e-9;

Vec3 any_unit_perpendicular(const Vec3& n) {
  const Vec3 trial = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(trial).normalized();
}

void require_valid_pose(const RigidTransform& pose) {
  if (!pose.is_valid(1e-6)) throw std::invalid_argument("invalid pose");
}

Box3 bounds_of_source(const SurfaceSource& source) {
  if (const auto* mesh = std::get_if<TriangleMesh>(&source)) return aabb_of(*mesh);
  return aabb_of(std::get<PointSet>(source));
}

}  // namespace

Box3::Box3(const Vec3& center_, const Vec3& half_extents_)
    : center(center_), half_extents(half_extents_) {
  if (!center.allFinite() || !half_extents.allFinite() ||
      !(half_extents.minCoeff() > 0.0)) {
    throw std::invalid_argument("box half extents must be positive and finite");
  }
}

std::array<Vec3, 8> Box3::corners() const {
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 sign((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
    out[i] = center + sign.cwiseProduct(half_extents);
  }
  return out;
}

ConvexPolytope ConvexPolytope::from_box(const Box3& box) {
  ConvexPolytope p;
  const auto c = box.corners();
  p.vertices.assign(c.begin(), c.end());
  p.faces = {
      {0, 4, 6, 2},  // -x
      {1, 3, 7, 5},  // +x
      {0, 1, 5, 4},  // -y
      {2, 6, 7, 3},  // +y
      {0, 2, 3, 1},  // -z
      {4, 5, 7, 6},  // +z
  };
  return p;
}

double ConvexPolytope::volume() const {
  double six_v = 0.0;
  for (const auto& face : faces) {
    if (face.size() < 3) continue;
    const Vec3& a = vertices[face[0]];
    for (std::size_t i = 1; i + 1 < face.size(); ++i) {
      six_v += a.dot(vertices[face[i]].cross(vertices[face[i + 1]]));
    }
  }
  return six_v / 6.0;
}

ConvexPolytope apply_transform(const RigidTransform& t, const ConvexPolytope& p) {
  ConvexPolytope out = p;
  for (Vec3& v : out.vertices) v = t.apply(v);
  return out;
}

ConvexPolytope clip_polytope(const ConvexPolytope& p, const Halfspace& h) {
  if (p.vertices.empty()) return p;

  std::vector<double> side(p.vertices.size());
  bool any_outside = false;
  bool any_inside = false;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    side[i] = h.normal.dot(p.vertices[i]) - h.offset;
    any_outside |= side[i] > kPlaneEps;
    any_inside |= side[i] < -kPlaneEps;
  }
  if (!any_outside) return p;
  if (!any_inside) return {};

  ConvexPolytope out;
  std::vector<int> remap(p.vertices.size(), -1);
  std::map<std::pair<int, int>, int> edge_cut;

  auto keep_vertex = [&](int i) {
    if (remap[i] < 0) {
      remap[i] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(p.vertices[i]);
    }
    return remap[i];
  };
  auto cut_vertex = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    const auto it = edge_cut.find(key);
    if (it != edge_cut.end()) return it->second;
    const double t = side[a] / (side[a] - side[b]);
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p.vertices[a] + t * (p.vertices[b] - p.vertices[a]));
    edge_cut.emplace(key, id);
    return id;
  };

  for (const auto& face : p.faces) {
    std::vector<int> loop;
    for (std::size_t k = 0; k < face.size(); ++k) {
      const int a = face[k];
      const int b = face[(k + 1) % face.size()];
      if (side[a] <= kPlaneEps) loop.push_back(keep_vertex(a));
      const bool crosses = (side[a] > kPlaneEps && side[b] < -kPlaneEps) ||
                           (side[a] < -kPlaneEps && side[b] > kPlaneEps);
      if (crosses) loop.push_back(cut_vertex(a, b));
    }
    if (loop.size() >= 3) out.faces.push_back(std::move(loop));
  }

  // Close the cut with a cap face, counter-clockwise seen from the halfspace
  // normal so its winding stays outward.
  std::vector<int> cap;
  for (std::size_t i = 0; i < out.vertices.size(); ++i) {
    if (std::abs(h.normal.dot(out.vertices[i]) - h.offset) <= 10.0 * kPlaneEps) {
      cap.push_back(static_cast<int>(i));
    }
  }
  if (cap.size() >= 3) {
    Vec3 centroid = Vec3::Zero();
    for (int i : cap) centroid += out.vertices[i];
    centroid /= static_cast<double>(cap.size());
    const Vec3 u = any_unit_perpendicular(h.normal);
    const Vec3 w = h.normal.normalized().cross(u);
    std::sort(cap.begin(), cap.end(), [&](int lhs, int rhs) {
      const Vec3 dl = out.vertices[lhs] - centroid;
      const Vec3 dr = out.vertices[rhs] - centroid;
      return std::atan2(dl.dot(w), dl.dot(u)) < std::atan2(dr.dot(w), dr.dot(u));
    });
    const auto coincident = [&](int lhs, int rhs) {
      return (out.vertices[lhs] - out.vertices[rhs]).norm() < 1e-12;
    };
    cap.erase(std::unique(cap.begin(), cap.end(), coincident), cap.end());
    while (cap.size() > 1 && coincident(cap.front(), cap.back())) cap.pop_back();
    if (cap.size() >= 3) out.faces.push_back(std::move(cap));
  }

  if (out.empty_region() || out.faces.size() < 4) return {};
  return out;
}

Box3 aabb_of(const PointSet& points) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& p : points) {
    if (!p.allFinite()) throw std::invalid_argument("point is not finite");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  for (int i = 0; i < 3; ++i) {
    if (!(hi[i] > lo[i])) throw std::invalid_argument("degenerate bounds (zero extent)");
  }
  return Box3(0.5 * (lo + hi), 0.5 * (hi - lo));
}

Box3 aabb_of(const TriangleMesh& mesh) { return aabb_of(mesh.vertices); }

double iou_obb(const Box3& box_a, const RigidTransform& pose_a,
               const Box3& box_b, const RigidTransform& pose_b) {
  require_valid_pose(pose_a);
  require_valid_pose(pose_b);

  const RigidTransform rel = pose_a.inverse() * pose_b;
  ConvexPolytope region = apply_transform(rel, ConvexPolytope::from_box(box_b));
  for (int axis = 0; axis < 3 && !region.empty_region(); ++axis) {
    Halfspace upper;
    upper.normal = Vec3::Unit(axis);
    upper.offset = box_a.center[axis] + box_a.half_extents[axis];
    region = clip_polytope(region, upper);
    if (region.empty_region()) break;
    Halfspace lower;
    lower.normal = -Vec3::Unit(axis);
    lower.offset = -(box_a.center[axis] - box_a.half_extents[axis]);
    region = clip_polytope(region, lower);
  }
  const double v_int = region.empty_region() ? 0.0 : std::max(0.0, region.volume());
  const double v_union = box_a.volume() + box_b.volume() - v_int;
  return std::clamp(v_int / v_union, 0.0, 1.0);
}

double iou_aabb_plus(const Box3& bounds_a, const Box3& bounds_b) {
  double v_int = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double overlap = std::min(bounds_a.max()[i], bounds_b.max()[i]) -
                           std::max(bounds_a.min()[i], bounds_b.min()[i]);
    if (overlap <= 0.0) return 0.0;
    v_int *= overlap;
  }
  const double v_union = bounds_a.volume() + bounds_b.volume() - v_int;
  return std::clamp(v_int / v_union, 0.0, 1.0);
}

double iou_aabb_plus(const SurfaceSource& gt_world, const SurfaceSource& pred_world) {
  return iou_aabb_plus(bounds_of_source(gt_world), bounds_of_source(pred_world));
}

double iou_obb_symmetric(const Box3& box_a, const RigidTransform& pose_a,
                         const Box3& box_b, const RigidTransform& pose_b,
                         const Category& category, int azimuth_steps) {
  if (azimuth_steps < 1) throw std::invalid_argument("azimuth steps must be positive");
  if (!category.symmetric) return iou_obb(box_a, pose_a, box_b, pose_b);

  constexpr double two_pi = 6.283185307179586476925286766559;
  const Vec3 axis = category.symmetry_axis.normalized();
  const auto value_at = [&](double angle) {
    return iou_obb(box_a, pose_a, box_b,
                   pose_b * RigidTransform::about_axis(axis, angle));
  };

  double best = 0.0;
  double best_angle = 0.0;
  for (int k = 0; k < azimuth_steps; ++k) {
    const double angle = two_pi * k / azimuth_steps;
    const double v = value_at(angle);
    if (v > best) {
      best = v;
      best_angle = angle;
    }
  }

  // The grid brackets the maximum to within one step; golden-section search
  // tightens it far below metric tolerances.
  const double gr = 0.61803398874989484820;
  double lo = best_angle - two_pi / azimuth_steps;
  double hi = best_angle + two_pi / azimuth_steps;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = value_at(c);
  double fd = value_at(d);
  for (int iter = 0; iter < 60; ++iter) {
    if (fc < fd) {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = value_at(d);
    } else {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = value_at(c);
    }
  }
  best = std::max({best, fc, fd});
  return std::clamp(best, 0.0, 1.0);
}

}  // namespace pse
