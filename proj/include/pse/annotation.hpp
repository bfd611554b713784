#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pse/box_metrics.hpp"
#include "pse/geometry.hpp"
#include "pse/sampling.hpp"

namespace pse {

/// Dense row-major raster.
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{})
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  T& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
  const T& at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * width + col];
  }
};

using DepthMap = Image<float>;    // meters, 0 or non-finite marks invalid
using MaskImage = Image<std::uint8_t>;  // nonzero keeps the pixel

/// One RGB-D view. camera_pose maps camera-frame points into the world
/// frame; intrinsics is the usual pinhole matrix with +z in front of the
/// camera and depth stored as z-depth.
struct DepthFrame {
  DepthMap depth;
  Mat3 intrinsics = Mat3::Identity();
  RigidTransform camera_pose;
  std::optional<MaskImage> mask;

  void validate() const;
};

/// Unprojects every valid (and unmasked) pixel into camera-frame points.
PointSet backproject(const DepthFrame& frame);

/// Least-squares rigid motion mapping each pair's first point onto its
/// second (Kabsch with reflection correction, no scale). Needs at least
/// three non-collinear pairs, otherwise throws std::invalid_argument.
RigidTransform rigid_alignment(const std::vector<std::pair<Vec3, Vec3>>& pairs);

struct IcpParams {
  int max_iterations = 50;
  double reject_distance_m = 0.02;
  double convergence_tol = 1e-6;  // on the mean residual decrease
};

struct IcpResult {
  RigidTransform transform;  // maps source points onto the target
  int iterations = 0;
  double mean_residual_m = 0.0;
  std::size_t n_correspondences = 0;
  std::vector<double> residual_history;  // mean residual before each update
};

/// Point-to-point ICP seeded at init. Correspondences beyond the reject
/// distance are dropped each iteration; if none survive the source and
/// target share no overlap and std::invalid_argument is thrown.
IcpResult icp_align(const PointSet& source, const SpatialIndex& target,
                    const RigidTransform& init, const IcpParams& params = {});

/// Merges all frames into one object-frame cloud: backprojects each frame,
/// moves points into the object frame via camera_pose and the object pose,
/// and keeps those inside the box. Symmetric categories additionally get
/// sym_replicas copies rotated uniformly about the symmetry axis.
/// object_poses[i] maps the object frame into the world of frame i.
PointSet accumulate_points(const std::vector<DepthFrame>& frames,
                           const std::vector<RigidTransform>& object_poses,
                           const Box3& box, const Category& category,
                           int sym_replicas = 0);

/// Dense voxel grid over a box in the object frame.
struct OccupancyGrid {
  Box3 box;
  double resolution = 0.0;
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> occupied;  // x-fastest layout

  std::size_t linear(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * ny + j) * nx + i;
  }
  Vec3 voxel_center(int i, int j, int k) const {
    return box.min() + resolution * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  std::size_t count_occupied() const;
};

/// Space carving: the grid starts fully occupied and a voxel is freed as
/// soon as any frame measures depth behind it by more than the margin
/// (i.e. the ray passed through). Voxels projecting outside the image or
/// onto invalid depth are left untouched, so the result is the visual
/// hull of the observed free space and carving order does not matter.
OccupancyGrid voxel_carve(const Box3& box,
                          const std::vector<RigidTransform>& object_poses,
                          const std::vector<DepthFrame>& frames,
                          double resolution_m, double margin_m);

/// Isosurface of the occupied region: each lattice cell is split into six
/// tetrahedra sharing the main diagonal (face diagonals then agree between
/// neighbouring cells, which keeps the surface watertight), with triangle
/// vertices at the midpoints of occupied-to-free lattice edges. The grid
/// is padded by one free layer so the surface always closes. Triangles
/// wind outward (occupied side in). Optional uniform Laplacian smoothing:
/// v <- v + lambda * (mean(neighbours) - v).
TriangleMesh extract_mesh(const OccupancyGrid& grid, int smoothing_iterations = 10,
                          double smoothing_lambda = 0.5);

/// Tight axis-aligned box around a reconstructed mesh.
Box3 tight_bbox(const TriangleMesh& mesh);

/// Everything needed to annotate one recorded sequence: views, per-frame
/// seed poses of the initial box annotation (object frame to the world of
/// that frame), the seed box, and the category.
struct SequenceData {
  std::vector<DepthFrame> frames;
  std::vector<RigidTransform> object_poses;
  Box3 box;
  Category category;
};

struct AnnotateParams {
  double resolution_m = 0.005;
  double margin_m = 0.005;
  int sym_replicas = 3;
  int smoothing_iterations = 10;
  double smoothing_lambda = 0.5;
  IcpParams icp;
};

struct FrameDiagnostics {
  std::size_t n_points = 0;  // cropped object-frame points from this frame
  int icp_iterations = 0;
  double icp_residual_m = 0.0;
  double pose_correction_deg = 0.0;
  double pose_correction_m = 0.0;
};

struct AnnotationResult {
  TriangleMesh mesh;              // object frame, recentered on the tight box
  Box3 box;                       // tight bounds, centered at the origin
  std::vector<RigidTransform> refined_poses;
  PointSet accumulated;           // object-frame cloud incl. symmetry replicas
  std::vector<FrameDiagnostics> frame_diagnostics;
  std::size_t voxels_total = 0;
  std::size_t voxels_occupied = 0;
};

/// Full annotation pass: per-frame pose refinement by ICP against the
/// accumulated cloud (first frame anchors the object frame), symmetry
/// replication, space carving with the refined poses, mesh extraction and
/// smoothing, then recentering of mesh, box and poses on the tight box.
AnnotationResult annotate_sequence(const SequenceData& data,
                                   const AnnotateParams& params = {});

}  // namespace pse
