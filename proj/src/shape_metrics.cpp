#include "pse/shape_metrics.hpp"

#include <stdexcept>

#include "pse/rng.hpp"
#include "pse/sampling.hpp"

namespace pse {

namespace {

double mean_nearest_distance(const PointSet& from, const SpatialIndex& to) {
  double sum = 0.0;
  for (const Vec3& p : from) sum += to.nearest(p).distance;
  return sum / static_cast<double>(from.size());
}

double covered_fraction(const PointSet& from, const SpatialIndex& to, double delta_m) {
  std::size_t hits = 0;
  for (const Vec3& p : from) {
    if (to.nearest(p).distance < delta_m) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(from.size());
}

PointSet realize_surface(const SurfaceSource& source, std::int64_t n_samples,
                         std::uint64_t seed) {
  if (const auto* mesh = std::get_if<TriangleMesh>(&source)) {
    return sample_surface(*mesh, n_samples, seed);
  }
  const PointSet& points = std::get<PointSet>(source);
  if (points.empty()) throw std::invalid_argument("empty point set");
  return points;
}

}  // namespace

double chamfer_distance(const PointSet& s, const PointSet& s_tilde) {
  if (s.empty() || s_tilde.empty()) throw std::invalid_argument("empty point set");
  const SpatialIndex index_s(s);
  const SpatialIndex index_t(s_tilde);
  return 0.5 * mean_nearest_distance(s, index_t) +
         0.5 * mean_nearest_distance(s_tilde, index_s);
}

ReconstructionScore reconstruction_fscore(const PointSet& gt, const PointSet& pred,
                                          double delta_m, MetricFrame frame) {
  if (!(delta_m > 0.0)) throw std::invalid_argument("invalid threshold");
  if (gt.empty() || pred.empty()) throw std::invalid_argument("empty point set");
  ReconstructionScore score;
  score.delta_m = delta_m;
  score.frame = frame;
  const SpatialIndex gt_index(gt);
  const SpatialIndex pred_index(pred);
  score.recall = covered_fraction(gt, pred_index, delta_m);
  score.precision = covered_fraction(pred, gt_index, delta_m);
  const double sum = score.recall + score.precision;
  score.fscore = sum > 0.0 ? 2.0 * score.recall * score.precision / sum : 0.0;
  return score;
}

ShapeEvaluation evaluate_reconstruction(const SurfaceSource& gt, const RigidTransform& gt_pose,
                                        const SurfaceSource& pred, const RigidTransform& pred_pose,
                                        double delta_m, MetricFrame frame,
                                        std::int64_t n_samples, std::uint64_t seed) {
  PointSet gt_points = realize_surface(gt, n_samples, Rng::derive(seed, 0));
  PointSet pred_points = realize_surface(pred, n_samples, Rng::derive(seed, 1));
  if (frame == MetricFrame::world) {
    gt_points = apply_transform(gt_pose, gt_points);
    pred_points = apply_transform(pred_pose, pred_points);
  }
  ShapeEvaluation eval;
  eval.chamfer_m = chamfer_distance(gt_points, pred_points);
  eval.score = reconstruction_fscore(gt_points, pred_points, delta_m, frame);
  return eval;
}

}  // namespace pse
