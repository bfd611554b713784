#include "pse/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include <Eigen/SVD>

namespace pse {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Cube corners in ring order and the six-tetrahedron split around the main
// diagonal corner0-corner6. Neighbouring cells pick the same face diagonals
// under this split, which keeps the extracted surface watertight.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kTets[6][4] = {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
                             {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}};

struct Pinhole {
  double fx, fy, cx, cy;
  explicit Pinhole(const Mat3& k)
      : fx(k(0, 0)), fy(k(1, 1)), cx(k(0, 2)), cy(k(1, 2)) {}
};

bool inside_box(const Vec3& p, const Box3& box) {
  return ((p - box.center).cwiseAbs().array() <= box.half_extents.array()).all();
}

PointSet with_symmetry_replicas(PointSet points, const Box3& box,
                                const Category& category, int sym_replicas) {
  if (!category.symmetric || sym_replicas < 1) return points;
  const Vec3 axis = category.symmetry_axis.normalized();
  const Vec3 anchor = box.center;
  const std::size_t base = points.size();
  points.reserve(base * (sym_replicas + 1));
  for (int k = 1; k <= sym_replicas; ++k) {
    const double angle = kTwoPi * k / (sym_replicas + 1);
    const Mat3 rot = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    for (std::size_t i = 0; i < base; ++i) {
      points.push_back(anchor + rot * (points[i] - anchor));
    }
  }
  return points;
}

}  // namespace

void DepthFrame::validate() const {
  if (depth.width < 1 || depth.height < 1 ||
      depth.data.size() != static_cast<std::size_t>(depth.width) * depth.height) {
    throw std::invalid_argument("depth image is empty or inconsistent");
  }
  if (!intrinsics.allFinite() || intrinsics(0, 0) == 0.0 || intrinsics(1, 1) == 0.0) {
    throw std::invalid_argument("invalid intrinsics");
  }
  if (!camera_pose.is_valid(1e-6)) throw std::invalid_argument("invalid camera pose");
  if (mask && (mask->width != depth.width || mask->height != depth.height)) {
    throw std::invalid_argument("mask size does not match depth");
  }
}

PointSet backproject(const DepthFrame& frame) {
  frame.validate();
  const Pinhole cam(frame.intrinsics);
  PointSet out;
  for (int v = 0; v < frame.depth.height; ++v) {
    for (int u = 0; u < frame.depth.width; ++u) {
      const double z = frame.depth.at(v, u);
      if (!(z > 0.0) || !std::isfinite(z)) continue;
      if (frame.mask && frame.mask->at(v, u) == 0) continue;
      out.emplace_back((u - cam.cx) * z / cam.fx, (v - cam.cy) * z / cam.fy, z);
    }
  }
  return out;
}

RigidTransform rigid_alignment(const std::vector<std::pair<Vec3, Vec3>>& pairs) {
  if (pairs.size() < 3) {
    throw std::invalid_argument("degenerate correspondences (need at least 3)");
  }
  Vec3 centroid_src = Vec3::Zero();
  Vec3 centroid_dst = Vec3::Zero();
  for (const auto& [src, dst] : pairs) {
    centroid_src += src;
    centroid_dst += dst;
  }
  centroid_src /= static_cast<double>(pairs.size());
  centroid_dst /= static_cast<double>(pairs.size());

  Mat3 h = Mat3::Zero();
  for (const auto& [src, dst] : pairs) {
    h += (src - centroid_src) * (dst - centroid_dst).transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv(1) > 1e-12 * sv(0))) {
    throw std::invalid_argument("degenerate correspondences (collinear)");
  }
  Mat3 d = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  RigidTransform t;
  t.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  t.translation = centroid_dst - t.rotation * centroid_src;
  return t;
}

IcpResult icp_align(const PointSet& source, const SpatialIndex& target,
                    const RigidTransform& init, const IcpParams& params) {
  if (source.empty()) throw std::invalid_argument("empty point set");
  if (target.empty()) throw std::invalid_argument("empty point set");
  if (params.max_iterations < 1) throw std::invalid_argument("invalid iteration count");

  IcpResult result;
  result.transform = init;
  double prev_residual = std::numeric_limits<double>::infinity();

  std::vector<std::pair<Vec3, Vec3>> pairs;
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    pairs.clear();
    double residual_sum = 0.0;
    for (const Vec3& p : source) {
      const Vec3 moved = result.transform.apply(p);
      const auto nn = target.nearest(moved);
      if (nn.distance <= params.reject_distance_m) {
        pairs.emplace_back(p, target.points()[nn.index]);
        residual_sum += nn.distance;
      }
    }
    if (pairs.empty()) throw std::invalid_argument("no overlap");
    const double residual = residual_sum / static_cast<double>(pairs.size());
    result.residual_history.push_back(residual);
    result.transform = rigid_alignment(pairs);
    result.iterations = iter + 1;
    if (std::abs(prev_residual - residual) < params.convergence_tol) break;
    prev_residual = residual;
  }

  double residual_sum = 0.0;
  std::size_t kept = 0;
  for (const Vec3& p : source) {
    const auto nn = target.nearest(result.transform.apply(p));
    if (nn.distance <= params.reject_distance_m) {
      residual_sum += nn.distance;
      ++kept;
    }
  }
  if (kept == 0) throw std::invalid_argument("no overlap");
  result.mean_residual_m = residual_sum / static_cast<double>(kept);
  result.n_correspondences = kept;
  return result;
}

PointSet accumulate_points(const std::vector<DepthFrame>& frames,
                           const std::vector<RigidTransform>& object_poses,
                           const Box3& box, const Category& category,
                           int sym_replicas) {
  if (frames.empty()) throw std::invalid_argument("no frames");
  if (frames.size() != object_poses.size()) {
    throw std::invalid_argument("pose count does not match frame count");
  }
  PointSet out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const RigidTransform to_object = object_poses[i].inverse() * frames[i].camera_pose;
    for (const Vec3& p : backproject(frames[i])) {
      const Vec3 obj = to_object.apply(p);
      if (inside_box(obj, box)) out.push_back(obj);
    }
  }
  if (out.empty()) throw std::invalid_argument("no points in box");
  return with_symmetry_replicas(std::move(out), box, category, sym_replicas);
}

std::size_t OccupancyGrid::count_occupied() const {
  return static_cast<std::size_t>(
      std::count(occupied.begin(), occupied.end(), std::uint8_t{1}));
}

OccupancyGrid voxel_carve(const Box3& box,
                          const std::vector<RigidTransform>& object_poses,
                          const std::vector<DepthFrame>& frames,
                          double resolution_m, double margin_m) {
  if (!(resolution_m > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (margin_m < 0.0) throw std::invalid_argument("margin must be non-negative");
  if (frames.size() != object_poses.size()) {
    throw std::invalid_argument("pose count does not match frame count");
  }

  OccupancyGrid grid;
  grid.box = box;
  grid.resolution = resolution_m;
  grid.nx = std::max(1, static_cast<int>(std::ceil(2.0 * box.half_extents.x() / resolution_m)));
  grid.ny = std::max(1, static_cast<int>(std::ceil(2.0 * box.half_extents.y() / resolution_m)));
  grid.nz = std::max(1, static_cast<int>(std::ceil(2.0 * box.half_extents.z() / resolution_m)));
  grid.occupied.assign(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz, 1);

  for (std::size_t f = 0; f < frames.size(); ++f) {
    const DepthFrame& frame = frames[f];
    frame.validate();
    const Pinhole cam(frame.intrinsics);
    const RigidTransform to_camera = frame.camera_pose.inverse() * object_poses[f];
    for (int k = 0; k < grid.nz; ++k) {
      for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
          std::uint8_t& occ = grid.occupied[grid.linear(i, j, k)];
          if (!occ) continue;
          const Vec3 p = to_camera.apply(grid.voxel_center(i, j, k));
          if (!(p.z() > 0.0)) continue;
          const int u = static_cast<int>(std::lround(cam.fx * p.x() / p.z() + cam.cx));
          const int v = static_cast<int>(std::lround(cam.fy * p.y() / p.z() + cam.cy));
          if (u < 0 || u >= frame.depth.width || v < 0 || v >= frame.depth.height) continue;
          const double measured = frame.depth.at(v, u);
          if (!(measured > 0.0) || !std::isfinite(measured)) continue;
          if (p.z() < measured - margin_m) occ = 0;
        }
      }
    }
  }
  return grid;
}

TriangleMesh extract_mesh(const OccupancyGrid& grid, int smoothing_iterations,
                          double smoothing_lambda) {
  if (smoothing_iterations < 0) throw std::invalid_argument("invalid iteration count");
  if (smoothing_lambda < 0.0 || smoothing_lambda > 1.0) {
    throw std::invalid_argument("smoothing lambda must be in [0, 1]");
  }
  if (grid.count_occupied() == 0) throw std::invalid_argument("empty occupancy");

  const auto node_value = [&](int i, int j, int k) -> int {
    if (i < 0 || i >= grid.nx || j < 0 || j >= grid.ny || k < 0 || k >= grid.nz) return 0;
    return grid.occupied[grid.linear(i, j, k)];
  };
  const auto node_id = [&](int i, int j, int k) -> std::int64_t {
    return (static_cast<std::int64_t>(k + 1) * (grid.ny + 2) + (j + 1)) *
               (grid.nx + 2) +
           (i + 1);
  };

  TriangleMesh mesh;
  std::map<std::pair<std::int64_t, std::int64_t>, int> edge_vertex;
  const auto midpoint_vertex = [&](int a, int b, const std::int64_t ids[4],
                                   const Vec3 pos[4]) {
    const auto key = std::minmax(ids[a], ids[b]);
    const auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    const int idx = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(0.5 * (pos[a] + pos[b]));
    edge_vertex.emplace(key, idx);
    return idx;
  };
  const auto emit = [&](int v0, int v1, int v2, const Vec3& ref) {
    const Vec3 n = (mesh.vertices[v1] - mesh.vertices[v0])
                       .cross(mesh.vertices[v2] - mesh.vertices[v0]);
    if (n.dot(ref) < 0.0) std::swap(v1, v2);
    mesh.faces.push_back({v0, v1, v2});
  };

  for (int k = -1; k < grid.nz; ++k) {
    for (int j = -1; j < grid.ny; ++j) {
      for (int i = -1; i < grid.nx; ++i) {
        int corner_value[8];
        Vec3 corner_pos[8];
        std::int64_t corner_id[8];
        int cell_sum = 0;
        for (int c = 0; c < 8; ++c) {
          const int ci = i + kCorner[c][0];
          const int cj = j + kCorner[c][1];
          const int ck = k + kCorner[c][2];
          corner_value[c] = node_value(ci, cj, ck);
          corner_pos[c] = grid.voxel_center(ci, cj, ck);
          corner_id[c] = node_id(ci, cj, ck);
          cell_sum += corner_value[c];
        }
        if (cell_sum == 0 || cell_sum == 8) continue;

        for (const auto& tet : kTets) {
          int occ[4], free[4];
          int n_occ = 0, n_free = 0;
          std::int64_t ids[4];
          Vec3 pos[4];
          for (int c = 0; c < 4; ++c) {
            ids[c] = corner_id[tet[c]];
            pos[c] = corner_pos[tet[c]];
            if (corner_value[tet[c]]) {
              occ[n_occ++] = c;
            } else {
              free[n_free++] = c;
            }
          }
          if (n_occ == 0 || n_occ == 4) continue;

          Vec3 occ_centroid = Vec3::Zero();
          Vec3 free_centroid = Vec3::Zero();
          for (int c = 0; c < n_occ; ++c) occ_centroid += pos[occ[c]];
          for (int c = 0; c < n_free; ++c) free_centroid += pos[free[c]];
          const Vec3 ref = free_centroid / n_free - occ_centroid / n_occ;

          if (n_occ == 1) {
            emit(midpoint_vertex(occ[0], free[0], ids, pos),
                 midpoint_vertex(occ[0], free[1], ids, pos),
                 midpoint_vertex(occ[0], free[2], ids, pos), ref);
          } else if (n_occ == 3) {
            emit(midpoint_vertex(occ[0], free[0], ids, pos),
                 midpoint_vertex(occ[1], free[0], ids, pos),
                 midpoint_vertex(occ[2], free[0], ids, pos), ref);
          } else {
            const int m00 = midpoint_vertex(occ[0], free[0], ids, pos);
            const int m01 = midpoint_vertex(occ[0], free[1], ids, pos);
            const int m11 = midpoint_vertex(occ[1], free[1], ids, pos);
            const int m10 = midpoint_vertex(occ[1], free[0], ids, pos);
            emit(m00, m01, m11, ref);
            emit(m00, m11, m10, ref);
          }
        }
      }
    }
  }

  if (smoothing_iterations > 0 && smoothing_lambda > 0.0 && !mesh.vertices.empty()) {
    std::vector<std::set<int>> adjacency(mesh.vertices.size());
    for (const auto& face : mesh.faces) {
      for (int e = 0; e < 3; ++e) {
        const int a = face[e];
        const int b = face[(e + 1) % 3];
        adjacency[a].insert(b);
        adjacency[b].insert(a);
      }
    }
    PointSet next(mesh.vertices.size());
    for (int iter = 0; iter < smoothing_iterations; ++iter) {
      for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        if (adjacency[v].empty()) {
          next[v] = mesh.vertices[v];
          continue;
        }
        Vec3 mean = Vec3::Zero();
        for (int nb : adjacency[v]) mean += mesh.vertices[nb];
        mean /= static_cast<double>(adjacency[v].size());
        next[v] = mesh.vertices[v] + smoothing_lambda * (mean - mesh.vertices[v]);
      }
      mesh.vertices.swap(next);
    }
  }

  mesh.validate();
  return mesh;
}

Box3 tight_bbox(const TriangleMesh& mesh) { return aabb_of(mesh); }

AnnotationResult annotate_sequence(const SequenceData& data, const AnnotateParams& params) {
  if (data.frames.empty()) throw std::invalid_argument("no frames");
  if (data.frames.size() != data.object_poses.size()) {
    throw std::invalid_argument("pose count does not match frame count");
  }

  AnnotationResult result;
  result.refined_poses = data.object_poses;
  result.frame_diagnostics.resize(data.frames.size());

  PointSet accumulated;
  for (std::size_t f = 0; f < data.frames.size(); ++f) {
    FrameDiagnostics& diag = result.frame_diagnostics[f];
    const RigidTransform to_object =
        data.object_poses[f].inverse() * data.frames[f].camera_pose;
    PointSet cropped;
    for (const Vec3& p : backproject(data.frames[f])) {
      const Vec3 obj = to_object.apply(p);
      if (inside_box(obj, data.box)) cropped.push_back(obj);
    }
    diag.n_points = cropped.size();
    if (cropped.empty()) continue;

    if (accumulated.empty()) {
      accumulated = std::move(cropped);
      continue;
    }
    const SpatialIndex target(accumulated);
    const IcpResult icp =
        icp_align(cropped, target, RigidTransform::identity(), params.icp);
    diag.icp_iterations = icp.iterations;
    diag.icp_residual_m = icp.mean_residual_m;
    diag.pose_correction_deg =
        rotation_error(RigidTransform::identity(), icp.transform);
    diag.pose_correction_m = icp.transform.translation.norm();
    result.refined_poses[f] = data.object_poses[f] * icp.transform.inverse();
    for (const Vec3& p : cropped) accumulated.push_back(icp.transform.apply(p));
  }
  if (accumulated.empty()) throw std::invalid_argument("no points in box");

  result.accumulated = with_symmetry_replicas(std::move(accumulated), data.box,
                                              data.category, params.sym_replicas);

  const OccupancyGrid grid = voxel_carve(data.box, result.refined_poses, data.frames,
                                         params.resolution_m, params.margin_m);
  result.voxels_total = grid.occupied.size();
  result.voxels_occupied = grid.count_occupied();

  result.mesh =
      extract_mesh(grid, params.smoothing_iterations, params.smoothing_lambda);

  const Box3 tight = tight_bbox(result.mesh);
  const Vec3 center = tight.center;
  for (Vec3& v : result.mesh.vertices) v -= center;
  for (Vec3& p : result.accumulated) p -= center;
  result.box = Box3(Vec3::Zero(), tight.half_extents);
  RigidTransform recenter;
  recenter.translation = center;
  for (RigidTransform& pose : result.refined_poses) pose = pose * recenter;
  return result;
}

}  // namespace pse
