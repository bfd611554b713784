#include "pse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pse {

RigidTransform RigidTransform::about_axis(const Vec3 &axis, double angle_rad) {
  return {Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix(), Vec3::Zero()};
}

RigidTransform RigidTransform::from_matrix(const Mat4 &m) {
  RigidTransform t{m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
  if (!t.is_valid(1e-6)) {
    throw std::invalid_argument("pose matrix is not a rigid transform");
  }
  return t;
}

Mat4 RigidTransform::to_matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

bool RigidTransform::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  Mat3 defect = rotation.transpose() * rotation - Mat3::Identity();
  return defect.cwiseAbs().maxCoeff() < tol && rotation.determinant() > 0.0;
}

void TriangleMesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto &v : vertices) {
    if (!v.allFinite()) throw std::invalid_argument("mesh vertex is not finite");
  }
  for (const auto &f : faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= n) throw std::invalid_argument("face index out of range");
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      throw std::invalid_argument("face with repeated vertices");
    }
  }
}

double triangle_area(const Vec3 &a, const Vec3 &b, const Vec3 &c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

double TriangleMesh::total_area() const {
  double area = 0.0;
  for (const auto &f : faces) {
    area += triangle_area(vertices[f[0]], vertices[f[1]], vertices[f[2]]);
  }
  return area;
}

Category Category::defaults(const std::string &name) {
  Category cat;
  cat.name = name;
  cat.symmetric = (name == "bottle" || name == "bowl" || name == "can");
  return cat;
}

PointSet apply_transform(const RigidTransform &t, const PointSet &points) {
  PointSet out;
  out.reserve(points.size());
  for (const auto &p : points) out.push_back(t.apply(p));
  return out;
}

TriangleMesh apply_transform(const RigidTransform &t, const TriangleMesh &mesh) {
  TriangleMesh out = mesh;
  for (auto &v : out.vertices) v = t.apply(v);
  return out;
}

double translation_error(const RigidTransform &gt, const RigidTransform &est) {
  return (gt.translation - est.translation).norm();
}

double rotation_error(const RigidTransform &gt, const RigidTransform &est) {
  // Identical rotations read exactly zero instead of round-off noise.
  if ((gt.rotation.array() == est.rotation.array()).all()) return 0.0;
  const Mat3 diff = gt.rotation * est.rotation.transpose();
  // atan2 of |sin| and cos stays well-conditioned at both ends of [0, 180],
  // where acos of the clamped cosine loses half the digits.
  const Vec3 skew(diff(2, 1) - diff(1, 2), diff(0, 2) - diff(2, 0),
                  diff(1, 0) - diff(0, 1));
  return degrees(std::atan2(0.5 * skew.norm(), 0.5 * (diff.trace() - 1.0)));
}

double rotation_error_symmetric(const RigidTransform &gt, const RigidTransform &est,
                                const Category &cat) {
  if (!cat.symmetric) return rotation_error(gt, est);
  const Vec3 a = cat.symmetry_axis.normalized();
  const Vec3 ga = gt.rotation * a;
  const Vec3 ea = est.rotation * a;
  if ((ga.array() == ea.array()).all()) return 0.0;
  return degrees(std::atan2(ga.cross(ea).norm(), ga.dot(ea)));
}

}  // namespace pse
