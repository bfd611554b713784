#include "pse/sampling.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pse/rng.hpp"
#include "pse/shape_metrics.hpp"

namespace pse {

namespace {

constexpr int kLeafSize = 8;

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SpatialIndex::SpatialIndex(PointSet points) : points_(std::move(points)) {
  for (const Vec3& p : points_) {
    if (!p.allFinite()) throw std::invalid_argument("point is not finite");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 4);
    root_ = build(0, static_cast<int>(points_.size()));
  }
}

int SpatialIndex::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  nodes_[id].axis = axis;
  nodes_[id].split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void SpatialIndex::search(int node, const Vec3& query, Result& best) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      const double d = (points_[order_[i]] - query).norm();
      if (d < best.distance) {
        best.distance = d;
        best.index = order_[i];
      }
    }
    return;
  }
  const double diff = query[n.axis] - n.split;
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  search(near, query, best);
  if (std::abs(diff) < best.distance) search(far, query, best);
}

SpatialIndex::Result SpatialIndex::nearest(const Vec3& query) const {
  if (points_.empty()) throw std::invalid_argument("empty point set");
  Result best;
  best.distance = std::numeric_limits<double>::infinity();
  search(root_, query, best);
  return best;
}

double nearest_distance(const SpatialIndex& index, const Vec3& query) {
  return index.nearest(query).distance;
}

PointSet sample_surface(const TriangleMesh& mesh, std::int64_t n_samples,
                        std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("sample count must be positive");
  mesh.validate();
  if (mesh.faces.empty()) throw std::invalid_argument("mesh has no faces");

  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    total += triangle_area(mesh.vertices[face[0]], mesh.vertices[face[1]],
                           mesh.vertices[face[2]]);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw std::invalid_argument("degenerate mesh (zero surface area)");

  Rng rng(seed);
  PointSet out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double target = rng.uniform01() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t f = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), mesh.faces.size() - 1);
    const auto& face = mesh.faces[f];
    double u = rng.uniform01();
    double v = rng.uniform01();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Vec3& a = mesh.vertices[face[0]];
    const Vec3& b = mesh.vertices[face[1]];
    const Vec3& c = mesh.vertices[face[2]];
    out.push_back(a + u * (b - a) + v * (c - a));
  }
  return out;
}

std::vector<ConvergenceRow> convergence_study(const TriangleMesh& gt_mesh,
                                              const TriangleMesh& pred_mesh,
                                              const std::vector<std::int64_t>& sample_counts,
                                              double fscore_delta_m,
                                              std::uint64_t seed) {
  if (!(fscore_delta_m > 0.0)) throw std::invalid_argument("invalid threshold");
  std::vector<ConvergenceRow> rows;
  rows.reserve(sample_counts.size());
  for (std::size_t i = 0; i < sample_counts.size(); ++i) {
    const std::int64_t n = sample_counts[i];
    const PointSet gt = sample_surface(gt_mesh, n, Rng::derive(seed, 2 * i));
    const PointSet pred = sample_surface(pred_mesh, n, Rng::derive(seed, 2 * i + 1));
    ConvergenceRow row;
    row.n_samples = n;
    row.chamfer_m = chamfer_distance(gt, pred);
    row.fscore = reconstruction_fscore(gt, pred, fscore_delta_m).fscore;
    rows.push_back(row);
  }
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "n_samples,chamfer_m,fscore\n";
  for (const ConvergenceRow& r : rows) {
    out += std::to_string(r.n_samples);
    out += ',';
    out += format_g17(r.chamfer_m);
    out += ',';
    out += format_g17(r.fscore);
    out += '\n';
  }
  return out;
}

}  // namespace pse
