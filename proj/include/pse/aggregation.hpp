#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pse/geometry.hpp"
#include "pse/shape_metrics.hpp"

namespace pse {

/// Conjunction of per-metric limits: a sample is correct only when every
/// limit that is set holds (all comparisons inclusive). At least one limit
/// must be set.
struct ThresholdSpec {
  std::string name;
  std::optional<double> max_rotation_deg;
  std::optional<double> max_translation_m;
  std::optional<double> min_iou;
  std::optional<double> min_fscore;
  double fscore_delta_m = 0.01;  // records which delta min_fscore refers to

  void validate() const;
};

/// The four REAL275-style reporting columns: 10deg/2cm, 5deg/1cm, and the
/// same pose limits with F@1cm floors of 0.6 and 0.8.
std::vector<ThresholdSpec> real275_suite();

/// Per-sample metric row produced by evaluation. Failed samples (no usable
/// prediction) keep NaN pose errors and empty optional metrics.
struct EvaluationRecord {
  std::string sample_id;
  std::string category;
  double rotation_error_deg = 0.0;
  double translation_error_m = 0.0;
  std::optional<double> iou;
  std::optional<double> fscore;
  bool failed = false;
  std::uint64_t seed = 0;
  std::int64_t n_samples = 0;
  MetricFrame frame = MetricFrame::world;
  double chamfer_m = 0.0;
};

/// True when the record satisfies every limit in the spec. Failed records
/// are always incorrect. NaN metrics compare as incorrect; a limit whose
/// metric was never computed (empty optional) raises std::invalid_argument
/// naming the sample.
bool classify(const EvaluationRecord& record, const ThresholdSpec& spec);

struct PrecisionReport {
  ThresholdSpec spec;
  double overall = 0.0;
  std::vector<std::pair<std::string, double>> per_category;  // sorted by name
  int n_records = 0;
  int n_failed = 0;
  int n_nan = 0;  // records with NaN in a thresholded metric
};

/// Fraction of correct records, overall and per category.
/// Throws std::invalid_argument on an empty record set.
PrecisionReport precision(const std::vector<EvaluationRecord>& records,
                          const ThresholdSpec& spec);

enum class SweepAxis { rotation, translation, fscore };

struct SweepPoint {
  double threshold = 0.0;
  double precision = 0.0;
};

/// Precision as a function of a single threshold; all other metrics are
/// unconstrained. An empty grid yields an empty curve.
std::vector<SweepPoint> sweep(const std::vector<EvaluationRecord>& records,
                              SweepAxis axis, const std::vector<double>& grid);

struct BestWorstPrecision {
  double best = 0.0;
  double worst = 0.0;
};

/// Precision when an oracle may pick, per sample, the hypothesis that
/// classifies best (upper bound) or worst (lower bound). Each inner vector
/// holds all hypothesis records of one sample and must be non-empty.
BestWorstPrecision best_worst_of_n(const std::vector<std::vector<EvaluationRecord>>& groups,
                                   const ThresholdSpec& spec);

}  // namespace pse
