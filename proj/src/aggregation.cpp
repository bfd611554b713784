#include "pse/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pse {

namespace {

bool has_nan_thresholded_metric(const EvaluationRecord& r, const ThresholdSpec& spec) {
  if (spec.max_rotation_deg && std::isnan(r.rotation_error_deg)) return true;
  if (spec.max_translation_m && std::isnan(r.translation_error_m)) return true;
  if (spec.min_iou && r.iou && std::isnan(*r.iou)) return true;
  if (spec.min_fscore && r.fscore && std::isnan(*r.fscore)) return true;
  return false;
}

}  // namespace

void ThresholdSpec::validate() const {
  if (!max_rotation_deg && !max_translation_m && !min_iou && !min_fscore) {
    throw std::invalid_argument("threshold spec sets no limits");
  }
  if (max_rotation_deg && !(*max_rotation_deg >= 0.0)) {
    throw std::invalid_argument("rotation limit must be non-negative");
  }
  if (max_translation_m && !(*max_translation_m >= 0.0)) {
    throw std::invalid_argument("translation limit must be non-negative");
  }
  if (min_iou && (*min_iou < 0.0 || *min_iou > 1.0)) {
    throw std::invalid_argument("iou limit must be in [0, 1]");
  }
  if (min_fscore && (*min_fscore < 0.0 || *min_fscore > 1.0)) {
    throw std::invalid_argument("fscore limit must be in [0, 1]");
  }
  if (!(fscore_delta_m > 0.0)) {
    throw std::invalid_argument("fscore delta must be positive");
  }
}

std::vector<ThresholdSpec> real275_suite() {
  std::vector<ThresholdSpec> suite(4);
  suite[0].name = "10deg_2cm";
  suite[0].max_rotation_deg = 10.0;
  suite[0].max_translation_m = 0.02;
  suite[1].name = "5deg_1cm";
  suite[1].max_rotation_deg = 5.0;
  suite[1].max_translation_m = 0.01;
  suite[2].name = "10deg_2cm_f0.6";
  suite[2].max_rotation_deg = 10.0;
  suite[2].max_translation_m = 0.02;
  suite[2].min_fscore = 0.6;
  suite[3].name = "5deg_1cm_f0.8";
  suite[3].max_rotation_deg = 5.0;
  suite[3].max_translation_m = 0.01;
  suite[3].min_fscore = 0.8;
  return suite;
}

bool classify(const EvaluationRecord& record, const ThresholdSpec& spec) {
  spec.validate();
  if (record.failed) return false;

  const auto require = [&](const std::optional<double>& metric, const char* what) {
    if (!metric) {
      throw std::invalid_argument("incomplete record '" + record.sample_id +
                                  "': threshold needs " + what);
    }
    return *metric;
  };

  // NaN comparisons are false, so NaN metrics drop out as incorrect here.
  if (spec.max_rotation_deg && !(record.rotation_error_deg <= *spec.max_rotation_deg)) {
    return false;
  }
  if (spec.max_translation_m && !(record.translation_error_m <= *spec.max_translation_m)) {
    return false;
  }
  if (spec.min_iou && !(require(record.iou, "iou") >= *spec.min_iou)) return false;
  if (spec.min_fscore && !(require(record.fscore, "fscore") >= *spec.min_fscore)) {
    return false;
  }
  return true;
}

PrecisionReport precision(const std::vector<EvaluationRecord>& records,
                          const ThresholdSpec& spec) {
  spec.validate();
  if (records.empty()) throw std::invalid_argument("empty record set");

  PrecisionReport report;
  report.spec = spec;
  report.n_records = static_cast<int>(records.size());

  std::map<std::string, std::pair<int, int>> per_cat;  // correct, total
  int correct = 0;
  for (const EvaluationRecord& r : records) {
    const bool ok = classify(r, spec);
    correct += ok ? 1 : 0;
    auto& cat = per_cat[r.category];
    cat.first += ok ? 1 : 0;
    cat.second += 1;
    report.n_failed += r.failed ? 1 : 0;
    report.n_nan += (!r.failed && has_nan_thresholded_metric(r, spec)) ? 1 : 0;
  }
  report.overall = static_cast<double>(correct) / static_cast<double>(records.size());
  for (const auto& [name, counts] : per_cat) {
    report.per_category.emplace_back(
        name, static_cast<double>(counts.first) / static_cast<double>(counts.second));
  }
  return report;
}

std::vector<SweepPoint> sweep(const std::vector<EvaluationRecord>& records,
                              SweepAxis axis, const std::vector<double>& grid) {
  std::vector<SweepPoint> curve;
  curve.reserve(grid.size());
  for (double value : grid) {
    ThresholdSpec spec;
    switch (axis) {
      case SweepAxis::rotation:
        spec.name = "rotation_sweep";
        spec.max_rotation_deg = value;
        break;
      case SweepAxis::translation:
        spec.name = "translation_sweep";
        spec.max_translation_m = value;
        break;
      case SweepAxis::fscore:
        spec.name = "fscore_sweep";
        spec.min_fscore = value;
        break;
    }
    curve.push_back({value, precision(records, spec).overall});
  }
  return curve;
}

BestWorstPrecision best_worst_of_n(const std::vector<std::vector<EvaluationRecord>>& groups,
                                   const ThresholdSpec& spec) {
  spec.validate();
  if (groups.empty()) throw std::invalid_argument("empty record set");

  int best_correct = 0;
  int worst_correct = 0;
  for (const auto& group : groups) {
    if (group.empty()) throw std::invalid_argument("sample with no hypotheses");
    bool any = false;
    bool all = true;
    for (const EvaluationRecord& r : group) {
      const bool ok = classify(r, spec);
      any |= ok;
      all &= ok;
    }
    best_correct += any ? 1 : 0;
    worst_correct += all ? 1 : 0;
  }
  BestWorstPrecision out;
  out.best = static_cast<double>(best_correct) / static_cast<double>(groups.size());
  out.worst = static_cast<double>(worst_correct) / static_cast<double>(groups.size());
  return out;
}

}  // namespace pse
