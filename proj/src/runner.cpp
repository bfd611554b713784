#include "pse/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pse/annotation.hpp"
#include "pse/box_metrics.hpp"
#include "pse/rng.hpp"

namespace pse {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

json pose_rows(const RigidTransform& t) {
  const Mat4 m = t.to_matrix();
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
  }
  return rows;
}

}  // namespace

void RunConfig::validate() const {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be positive");
  if (!(fscore_delta_m > 0.0)) throw std::invalid_argument("fscore_delta_m must be positive");
  if (azimuth_steps < 1) throw std::invalid_argument("azimuth_steps must be positive");
  for (const ThresholdSpec& spec : thresholds) spec.validate();
}

void apply_config_file(const fs::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trimmed(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    }
    const std::string key = trimmed(stripped.substr(0, eq));
    const std::string value = trimmed(stripped.substr(eq + 1));
    try {
      if (key == "seed") {
        config.seed = std::stoull(value);
      } else if (key == "n_samples") {
        config.n_samples = std::stoll(value);
      } else if (key == "frame") {
        config.frame = parse_frame(value);
      } else if (key == "fscore_delta_m") {
        config.fscore_delta_m = std::stod(value);
      } else if (key == "azimuth_steps") {
        config.azimuth_steps = std::stoi(value);
      } else if (key == "preset") {
        if (value != "real275-suite") {
          throw std::invalid_argument("unknown preset '" + value + "'");
        }
        config.thresholds = real275_suite();
      } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": bad value for " + key);
    }
  }
}

EvaluationRecord evaluate_sample(const GroundTruthSample& gt, const Hypothesis& hyp,
                                 std::size_t hypothesis_index, const RunConfig& config) {
  EvaluationRecord record;
  record.sample_id = gt.sample_id;
  record.category = gt.category.name;
  record.frame = config.frame;
  record.n_samples = config.n_samples;
  record.seed =
      Rng::derive(config.seed, Rng::hash(gt.sample_id) + hypothesis_index);

  record.translation_error_m = translation_error(gt.pose, hyp.pose);
  record.rotation_error_deg = gt.category.symmetric
                                  ? rotation_error_symmetric(gt.pose, hyp.pose, gt.category)
                                  : rotation_error(gt.pose, hyp.pose);

  // The ground-truth box is the rotated operand, so the azimuth search is a
  // pure reparametrization for symmetric objects.
  record.iou = gt.category.symmetric
                   ? iou_obb_symmetric(hyp.bbox, hyp.pose, gt.bbox, gt.pose,
                                       gt.category, config.azimuth_steps)
                   : iou_obb(gt.bbox, gt.pose, hyp.bbox, hyp.pose);

  const ShapeEvaluation shape =
      evaluate_reconstruction(gt.mesh, gt.pose, hyp.shape, hyp.pose,
                              config.fscore_delta_m, config.frame,
                              config.n_samples, record.seed);
  record.fscore = shape.score.fscore;
  record.chamfer_m = shape.chamfer_m;
  return record;
}

EvaluationOutputs evaluate_dataset(const GroundTruthDataset& gt,
                                   const std::vector<Prediction>& predictions,
                                   const RunConfig& config) {
  config.validate();
  if (gt.samples.size() != predictions.size()) {
    throw std::invalid_argument("predictions are not aligned with ground truth");
  }

  EvaluationOutputs out;
  bool multi_hypothesis = false;
  for (std::size_t i = 0; i < gt.samples.size(); ++i) {
    const GroundTruthSample& sample = gt.samples[i];
    const Prediction& pred = predictions[i];
    if (pred.hypotheses.empty()) {
      EvaluationRecord failed;
      failed.sample_id = sample.sample_id;
      failed.category = sample.category.name;
      failed.failed = true;
      failed.rotation_error_deg = std::numeric_limits<double>::quiet_NaN();
      failed.translation_error_m = std::numeric_limits<double>::quiet_NaN();
      failed.chamfer_m = std::numeric_limits<double>::quiet_NaN();
      failed.frame = config.frame;
      failed.n_samples = config.n_samples;
      out.records.push_back(failed);
      out.hypothesis_groups.push_back({failed});
      continue;
    }
    std::vector<EvaluationRecord> group;
    for (std::size_t h = 0; h < pred.hypotheses.size(); ++h) {
      group.push_back(evaluate_sample(sample, pred.hypotheses[h], h, config));
    }
    multi_hypothesis |= group.size() > 1;
    out.records.push_back(group.front());
    out.hypothesis_groups.push_back(std::move(group));
  }

  const std::vector<ThresholdSpec> suite =
      config.thresholds.empty() ? real275_suite() : config.thresholds;
  for (const ThresholdSpec& spec : suite) {
    out.reports.push_back(precision(out.records, spec));
    if (multi_hypothesis) {
      out.best_worst.emplace_back(spec.name,
                                  best_worst_of_n(out.hypothesis_groups, spec));
    }
  }
  return out;
}

EvaluationOutputs run_evaluate(const RunConfig& config) {
  config.validate();
  const GroundTruthDataset gt = load_ground_truth(config.gt_manifest);
  const std::vector<Prediction> predictions =
      load_predictions(config.pred_manifest, gt);
  EvaluationOutputs out = evaluate_dataset(gt, predictions, config);

  fs::create_directories(config.out_dir);
  write_records_csv(config.out_dir / "records.csv", out.records);
  write_precision_csv(config.out_dir / "precision.csv", out.reports);
  if (!out.best_worst.empty()) {
    std::ofstream bw(config.out_dir / "best_worst.csv");
    if (!bw) {
      throw std::invalid_argument("cannot write " +
                                  (config.out_dir / "best_worst.csv").string());
    }
    bw << "threshold,best,worst\n";
    for (const auto& [name, value] : out.best_worst) {
      bw << name << ',' << format_double(value.best) << ','
         << format_double(value.worst) << '\n';
    }
  }

  RunMetadata meta;
  meta.command = "evaluate";
  meta.seed = config.seed;
  meta.n_samples = config.n_samples;
  meta.frame = config.frame;
  meta.fscore_delta_m = config.fscore_delta_m;
  meta.n_records = static_cast<int>(out.records.size());
  for (const PrecisionReport& report : out.reports) {
    meta.threshold_names.push_back(report.spec.name);
    meta.n_failed = report.n_failed;
    if (report.n_nan > 0) {
      meta.warnings.push_back("threshold " + report.spec.name + ": " +
                              std::to_string(report.n_nan) +
                              " records with NaN metrics counted incorrect");
    }
  }
  write_metadata_json(config.out_dir / "metadata.json", meta);
  return out;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "rotation") return SweepAxis::rotation;
  if (name == "translation") return SweepAxis::translation;
  if (name == "fscore") return SweepAxis::fscore;
  throw std::invalid_argument("unknown sweep axis '" + name +
                              "' (valid: rotation, translation, fscore)");
}

std::vector<SweepPoint> run_sweep(const RunConfig& config, SweepAxis axis,
                                  const std::vector<double>& grid) {
  config.validate();
  const GroundTruthDataset gt = load_ground_truth(config.gt_manifest);
  const std::vector<Prediction> predictions =
      load_predictions(config.pred_manifest, gt);
  const EvaluationOutputs out = evaluate_dataset(gt, predictions, config);
  const std::vector<SweepPoint> curve = sweep(out.records, axis, grid);

  const char* axis_name = axis == SweepAxis::rotation      ? "rotation"
                          : axis == SweepAxis::translation ? "translation"
                                                           : "fscore";
  fs::create_directories(config.out_dir);
  write_sweep_csv(config.out_dir / (std::string("sweep_") + axis_name + ".csv"), curve);
  return curve;
}

std::vector<ConvergenceRow> run_convergence(const fs::path& gt_mesh,
                                            const fs::path& pred_mesh,
                                            const std::vector<std::int64_t>& counts,
                                            double fscore_delta_m, std::uint64_t seed,
                                            const fs::path& out_csv) {
  const TriangleMesh a = load_mesh_obj(gt_mesh);
  const TriangleMesh b = load_mesh_obj(pred_mesh);
  const std::vector<ConvergenceRow> rows =
      convergence_study(a, b, counts, fscore_delta_m, seed);
  write_convergence_csv(out_csv, rows);
  return rows;
}

AnnotationResult run_annotate(const fs::path& sequence_manifest,
                              const AnnotateParams& params, const fs::path& out_dir) {
  const SequenceData data = load_sequence(sequence_manifest);
  const AnnotationResult result = annotate_sequence(data, params);

  fs::create_directories(out_dir);
  save_mesh_obj(out_dir / "mesh.obj", result.mesh);
  save_points_xyz(out_dir / "points.xyz", result.accumulated);

  json j;
  j["box"] = json{{"center", json::array({result.box.center.x(), result.box.center.y(),
                                          result.box.center.z()})},
                  {"half_extents",
                   json::array({result.box.half_extents.x(), result.box.half_extents.y(),
                                result.box.half_extents.z()})}};
  j["category"] = data.category.name;
  j["params"] = json{{"resolution_m", params.resolution_m},
                     {"margin_m", params.margin_m},
                     {"sym_replicas", params.sym_replicas},
                     {"smoothing_iterations", params.smoothing_iterations},
                     {"smoothing_lambda", params.smoothing_lambda},
                     {"icp_max_iterations", params.icp.max_iterations},
                     {"icp_reject_distance_m", params.icp.reject_distance_m},
                     {"icp_convergence_tol", params.icp.convergence_tol}};
  j["voxels_total"] = result.voxels_total;
  j["voxels_occupied"] = result.voxels_occupied;
  j["replicas_applied"] =
      data.category.symmetric ? params.sym_replicas : 0;
  json poses = json::array();
  for (const RigidTransform& pose : result.refined_poses) poses.push_back(pose_rows(pose));
  j["refined_poses"] = std::move(poses);
  json frames = json::array();
  for (const FrameDiagnostics& d : result.frame_diagnostics) {
    frames.push_back(json{{"n_points", d.n_points},
                          {"icp_iterations", d.icp_iterations},
                          {"icp_residual_m", d.icp_residual_m},
                          {"pose_correction_deg", d.pose_correction_deg},
                          {"pose_correction_m", d.pose_correction_m}});
  }
  j["frames"] = std::move(frames);

  std::ofstream out(out_dir / "annotation.json");
  if (!out) {
    throw std::invalid_argument("cannot write " + (out_dir / "annotation.json").string());
  }
  out << j.dump(2) << '\n';
  return result;
}

}  // namespace pse
