#pragma once

#include <cstdint>
#include <variant>

#include "pse/geometry.hpp"

namespace pse {

/// Frame in which reconstruction metrics are computed. World composes each
/// shape with its estimated pose, so pose error degrades the score; object
/// compares canonical shapes and isolates reconstruction quality.
enum class MetricFrame { object, world };

/// Shapes enter evaluation either as meshes (sampled on demand) or as
/// ready-made point clouds.
using SurfaceSource = std::variant<TriangleMesh, PointSet>;

struct ReconstructionScore {
  double recall = 0.0;
  double precision = 0.0;
  double fscore = 0.0;
  double delta_m = 0.0;
  MetricFrame frame = MetricFrame::object;
};

/// Symmetric chamfer distance: the average of mean nearest-neighbour
/// distances in both directions, each direction weighted by one half.
/// Distances are not squared. Throws std::invalid_argument on empty input.
double chamfer_distance(const PointSet& s, const PointSet& s_tilde);

/// Recall counts ground-truth points with a reconstruction point strictly
/// closer than delta; precision is the reverse direction. The F-score is
/// their harmonic mean, defined as 0 when both are 0.
ReconstructionScore reconstruction_fscore(const PointSet& gt, const PointSet& pred,
                                          double delta_m,
                                          MetricFrame frame = MetricFrame::object);

struct ShapeEvaluation {
  double chamfer_m = 0.0;
  ReconstructionScore score;
};

/// Samples mesh sources (point-cloud sources pass through), optionally
/// applies the poses (world frame), then computes chamfer and F-score.
/// The ground-truth cloud uses substream 0 of the seed and the predicted
/// cloud substream 1, so identical meshes still yield distinct clouds.
ShapeEvaluation evaluate_reconstruction(const SurfaceSource& gt, const RigidTransform& gt_pose,
                                        const SurfaceSource& pred, const RigidTransform& pred_pose,
                                        double delta_m, MetricFrame frame,
                                        std::int64_t n_samples, std::uint64_t seed);

}  // namespace pse
