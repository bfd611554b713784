#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pse/aggregation.hpp"
#include "pse/annotation.hpp"
#include "pse/box_metrics.hpp"
#include "pse/geometry.hpp"
#include "pse/sampling.hpp"
#include "pse/shape_metrics.hpp"

namespace pse {

/// One annotated sample: canonical mesh, pose into the evaluation frame,
/// and the oriented box used for IoU (defaults to the mesh bounds).
struct GroundTruthSample {
  std::string sample_id;
  Category category;
  RigidTransform pose;
  TriangleMesh mesh;
  Box3 bbox;
};

struct GroundTruthDataset {
  std::vector<GroundTruthSample> samples;  // sorted by sample_id
  std::map<std::string, Category> categories;
};

struct Hypothesis {
  RigidTransform pose;
  SurfaceSource shape;
  Box3 bbox;
};

/// All hypotheses predicted for one sample; empty means the method failed
/// on that sample and it scores as incorrect everywhere.
struct Prediction {
  std::string sample_id;
  std::vector<Hypothesis> hypotheses;
};

/// Reads a ground-truth manifest (JSON; see README for the schema) and all
/// meshes it references. Manifest "categories" entries override the
/// built-in symmetry table. Duplicate sample ids, unreadable files, and
/// invalid meshes raise std::invalid_argument naming the sample.
GroundTruthDataset load_ground_truth(const std::filesystem::path& manifest);

/// Reads a prediction manifest and joins it against the ground truth.
/// The result is aligned with gt.samples; samples without a prediction get
/// an empty hypothesis list. Predictions for unknown samples and duplicate
/// entries raise std::invalid_argument.
std::vector<Prediction> load_predictions(const std::filesystem::path& manifest,
                                         const GroundTruthDataset& gt);

/// Reads a recorded-sequence manifest (depth images, intrinsics, camera
/// poses, per-frame seed box poses, seed box, category).
SequenceData load_sequence(const std::filesystem::path& manifest);

// Geometry and image files. Meshes are Wavefront OBJ (v/f only, n-gons are
// fan-triangulated); point clouds are whitespace xyz lines; depth images
// are 16-bit binary PGM in millimeters (0 = invalid); masks are 8-bit PGM.
TriangleMesh load_mesh_obj(const std::filesystem::path& path);
void save_mesh_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
PointSet load_points_xyz(const std::filesystem::path& path);
void save_points_xyz(const std::filesystem::path& path, const PointSet& points);
DepthMap load_depth_pgm(const std::filesystem::path& path);
void save_depth_pgm(const std::filesystem::path& path, const DepthMap& depth);
MaskImage load_mask_pgm(const std::filesystem::path& path);
void save_mask_pgm(const std::filesystem::path& path, const MaskImage& mask);

/// Doubles formatted with 17 significant digits ("%.17g", C locale), which
/// round-trips IEEE doubles exactly and keeps output byte-stable.
std::string format_double(double v);

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<EvaluationRecord>& records);
void write_precision_csv(const std::filesystem::path& path,
                         const std::vector<PrecisionReport>& reports);
void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepPoint>& curve);
void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows);

/// Run provenance written next to every report.
struct RunMetadata {
  std::string command;
  std::uint64_t seed = 0;
  std::int64_t n_samples = 0;
  MetricFrame frame = MetricFrame::world;
  double fscore_delta_m = 0.01;
  int n_records = 0;
  int n_failed = 0;
  std::vector<std::string> threshold_names;
  std::vector<std::string> warnings;
};

void write_metadata_json(const std::filesystem::path& path, const RunMetadata& meta);

/// Writers for the manifest formats above (used by the fixture generator
/// and the annotation pipeline).
void save_ground_truth(const std::filesystem::path& manifest, const GroundTruthDataset& gt,
                       const std::filesystem::path& mesh_dir);
void save_predictions(const std::filesystem::path& manifest,
                      const std::vector<Prediction>& predictions,
                      const std::filesystem::path& shape_dir);
void save_sequence(const std::filesystem::path& manifest, const SequenceData& data,
                   const std::filesystem::path& frame_dir);

const char* frame_name(MetricFrame frame);
MetricFrame parse_frame(const std::string& name);

}  // namespace pse
