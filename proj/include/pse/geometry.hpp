#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace pse {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline double degrees(double radians) { return radians * 180.0 / EIGEN_PI; }
inline double radians(double degrees) { return degrees * EIGEN_PI / 180.0; }

/// Finite set of 3D points in meters. May be empty.
using PointSet = std::vector<Vec3>;

/// Rigid transform mapping x to rotation * x + translation.
/// Rotation must be orthonormal with determinant +1.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  /// Rotation of `angle_rad` about `axis` (normalized internally), no translation.
  static RigidTransform about_axis(const Vec3 &axis, double angle_rad);

  /// From a 4x4 homogeneous matrix; throws if the upper-left block is not a rotation.
  static RigidTransform from_matrix(const Mat4 &m);
  Mat4 to_matrix() const;

  Vec3 apply(const Vec3 &p) const { return rotation * p + translation; }

  RigidTransform inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }

  /// Composition: (a * b).apply(x) == a.apply(b.apply(x)).
  friend RigidTransform operator*(const RigidTransform &a, const RigidTransform &b) {
    return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
  }

  /// Max-norm orthonormality defect ||R^T R - I||_inf below `tol` and det(R) > 0.
  bool is_valid(double tol = 1e-9) const;
};

/// Triangle mesh: vertices in meters, faces as vertex-index triples.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  /// Throws std::invalid_argument on out-of-range indices or repeated
  /// vertices within a face.
  void validate() const;

  double total_area() const;
};

double triangle_area(const Vec3 &a, const Vec3 &b, const Vec3 &c);

/// Object category. Symmetric categories are rotationally symmetric about
/// `symmetry_axis` (object frame, +y by default), making azimuth
/// unidentifiable; bottle, bowl and can are symmetric by default.
struct Category {
  std::string name;
  bool symmetric = false;
  Vec3 symmetry_axis = Vec3::UnitY();

  /// Built-in defaults for {bottle, bowl, camera, can, laptop, mug};
  /// unknown names yield a non-symmetric category of that name.
  static Category defaults(const std::string &name);
};

PointSet apply_transform(const RigidTransform &t, const PointSet &points);
TriangleMesh apply_transform(const RigidTransform &t, const TriangleMesh &mesh);

/// Euclidean distance between the translation parts, in meters.
double translation_error(const RigidTransform &gt, const RigidTransform &est);

/// Geodesic angle between the rotation parts, in degrees, in [0, 180].
double rotation_error(const RigidTransform &gt, const RigidTransform &est);

/// Angle between the transformed symmetry axes for symmetric categories
/// (invariant to rotations of either pose about the axis); delegates to
/// rotation_error for non-symmetric categories. Degrees.
double rotation_error_symmetric(const RigidTransform &gt, const RigidTransform &est,
                                const Category &cat);

}  // namespace pse
