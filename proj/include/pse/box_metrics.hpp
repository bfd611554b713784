#pragma once

#include <array>
#include <vector>

#include "pse/geometry.hpp"
#include "pse/shape_metrics.hpp"

namespace pse {

/// Axis-aligned box in its own frame: center plus strictly positive half
/// extents. Degenerate boxes are rejected at construction.
struct Box3 {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();

  Box3() = default;
  Box3(const Vec3& center_, const Vec3& half_extents_);

  Vec3 min() const { return center - half_extents; }
  Vec3 max() const { return center + half_extents; }
  double volume() const { return 8.0 * half_extents.prod(); }
  std::array<Vec3, 8> corners() const;
};

/// Box with a rigid pose mapping its local frame into some outer frame.
struct OrientedBox {
  Box3 box;
  RigidTransform pose;
};

/// Halfspace n . x <= offset.
struct Halfspace {
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;
};

/// Convex polytope as a shared vertex array plus planar face loops, each
/// loop wound counter-clockwise seen from outside.
struct ConvexPolytope {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;

  static ConvexPolytope from_box(const Box3& box);
  bool empty_region() const { return vertices.size() < 4; }
  /// Signed volume by the divergence theorem; correct winding assumed.
  double volume() const;
};

ConvexPolytope apply_transform(const RigidTransform& t, const ConvexPolytope& p);

/// Sutherland-Hodgman clip of a convex polytope against one halfspace.
/// Vertices within 1e-9 of the plane count as inside; clips that cut
/// nothing return the input unchanged, clips that exclude everything
/// return an empty polytope. A new planar cap face closes the cut.
ConvexPolytope clip_polytope(const ConvexPolytope& p, const Halfspace& h);

/// Tight axis-aligned bounds of a point set or of mesh vertices.
/// Throws on empty input or zero extent along any axis.
Box3 aabb_of(const PointSet& points);
Box3 aabb_of(const TriangleMesh& mesh);

/// Exact IoU of two oriented boxes: the second box is expressed in the
/// frame of the first and clipped against its six faces.
double iou_obb(const Box3& box_a, const RigidTransform& pose_a,
               const Box3& box_b, const RigidTransform& pose_b);

/// IoU of the axis-aligned bounds of two surfaces already posed in a
/// common frame (closed form, no clipping).
double iou_aabb_plus(const Box3& bounds_a, const Box3& bounds_b);
double iou_aabb_plus(const SurfaceSource& gt_world, const SurfaceSource& pred_world);

/// For symmetric categories, the best oriented IoU over rotations of the
/// second box about its symmetry axis: a uniform grid of azimuth_steps
/// candidates followed by golden-section refinement around the best grid
/// point (the grid alone leaves errors of ~pi/steps near the peak).
/// Non-symmetric categories fall through to iou_obb.
double iou_obb_symmetric(const Box3& box_a, const RigidTransform& pose_a,
                         const Box3& box_b, const RigidTransform& pose_b,
                         const Category& category, int azimuth_steps = 120);

}  // namespace pse
