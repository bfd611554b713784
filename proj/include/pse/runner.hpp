#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pse/aggregation.hpp"
#include "pse/dataset_io.hpp"
#include "pse/shape_metrics.hpp"

namespace pse {

/// Fully resolved run configuration; validated up front and echoed into the
/// report metadata so runs are reproducible from their outputs alone.
struct RunConfig {
  std::filesystem::path gt_manifest;
  std::filesystem::path pred_manifest;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  std::int64_t n_samples = 10000;
  double fscore_delta_m = 0.01;
  MetricFrame frame = MetricFrame::world;
  std::vector<ThresholdSpec> thresholds;  // empty = REAL275 preset suite
  int azimuth_steps = 120;

  void validate() const;
};

/// Key=value text config (one pair per line, '#' comments). Recognized
/// keys: seed, n_samples, frame, fscore_delta_m, azimuth_steps, preset.
/// Unknown keys raise std::invalid_argument.
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

struct EvaluationOutputs {
  std::vector<EvaluationRecord> records;  // first hypothesis of each sample
  std::vector<std::vector<EvaluationRecord>> hypothesis_groups;
  std::vector<PrecisionReport> reports;
  std::vector<std::pair<std::string, BestWorstPrecision>> best_worst;  // per threshold
};

/// Scores one hypothesis against its sample. Symmetric categories use the
/// symmetry-axis rotation error and maximize box IoU over ground-truth azimuth;
/// chamfer and F-score follow config.frame. The per-record sampling seed is
/// derived from config.seed and the sample id (stream = FNV-1a of the id,
/// offset by the hypothesis index).
EvaluationRecord evaluate_sample(const GroundTruthSample& gt, const Hypothesis& hyp,
                                 std::size_t hypothesis_index, const RunConfig& config);

/// Evaluates every sample and aggregates all configured thresholds.
/// Samples without hypotheses become failed records. The best/worst table
/// is filled when any sample has more than one hypothesis.
EvaluationOutputs evaluate_dataset(const GroundTruthDataset& gt,
                                   const std::vector<Prediction>& predictions,
                                   const RunConfig& config);

/// Loads, evaluates, and writes records.csv, precision.csv, metadata.json
/// (and best_worst.csv when hypotheses are present) into config.out_dir.
/// Nothing is written until all computation succeeded.
EvaluationOutputs run_evaluate(const RunConfig& config);

/// Single-axis threshold sweep written as sweep_<axis>.csv.
std::vector<SweepPoint> run_sweep(const RunConfig& config, SweepAxis axis,
                                  const std::vector<double>& grid);

SweepAxis parse_sweep_axis(const std::string& name);

/// Convergence study over sample counts, written as convergence.csv.
std::vector<ConvergenceRow> run_convergence(const std::filesystem::path& gt_mesh,
                                            const std::filesystem::path& pred_mesh,
                                            const std::vector<std::int64_t>& counts,
                                            double fscore_delta_m, std::uint64_t seed,
                                            const std::filesystem::path& out_csv);

/// Annotation pipeline over a sequence manifest; writes mesh.obj,
/// points.xyz, and annotation.json (box, refined poses, diagnostics).
AnnotationResult run_annotate(const std::filesystem::path& sequence_manifest,
                              const AnnotateParams& params,
                              const std::filesystem::path& out_dir);

}  // namespace pse
