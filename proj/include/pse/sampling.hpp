#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pse/geometry.hpp"

namespace pse {

/// Exact nearest-neighbour index over a fixed 3D point set (balanced kd-tree
/// with full pruning, so results match a linear scan bit for bit).
class SpatialIndex {
 public:
  struct Result {
    int index = -1;
    double distance = 0.0;
  };

  SpatialIndex() = default;
  explicit SpatialIndex(PointSet points);

  Result nearest(const Vec3& query) const;
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const PointSet& points() const { return points_; }

 private:
  struct Node {
    int axis = -1;       // -1 marks a leaf
    double split = 0.0;  // coordinate separating children
    int left = -1;
    int right = -1;
    int begin = 0;  // leaf range into order_
    int end = 0;
  };

  int build(int begin, int end);
  void search(int node, const Vec3& query, Result& best) const;

  PointSet points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Distance from query to its nearest point in the index.
/// Throws std::invalid_argument on an empty index.
double nearest_distance(const SpatialIndex& index, const Vec3& query);

/// Draws n points uniformly by area from the mesh surface. Faces are chosen
/// by binary search on the cumulative area table; positions use the standard
/// barycentric fold. Deterministic for a fixed seed.
/// Throws std::invalid_argument for n < 1, invalid meshes, or zero total area.
PointSet sample_surface(const TriangleMesh& mesh, std::int64_t n_samples,
                        std::uint64_t seed);

struct ConvergenceRow {
  std::int64_t n_samples = 0;
  double chamfer_m = 0.0;
  double fscore = 0.0;
};

/// Re-evaluates chamfer distance and F-score between two meshes at each
/// sample count. Row i samples the first mesh with substream 2*i and the
/// second with 2*i+1 of the given seed, so the two clouds never share a
/// stream even when the meshes are identical.
std::vector<ConvergenceRow> convergence_study(const TriangleMesh& gt_mesh,
                                              const TriangleMesh& pred_mesh,
                                              const std::vector<std::int64_t>& sample_counts,
                                              double fscore_delta_m,
                                              std::uint64_t seed);

/// CSV with header n_samples,chamfer_m,fscore; doubles at 17 significant
/// digits so files are byte-stable across runs.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace pse
