#pragma once

#include <optional>
#include <span>
#include <vector>

namespace censorbias {

struct RocResult {
  double auc;
  double auc_ci_low;
  double auc_ci_high;
  double cutoff;
  double sensitivity;
  double specificity;
  double ppv;
  /// NaN when nothing is classified negative at the cutoff.
  double npv;
  std::size_t positives;
  std::size_t negatives;
};

/// Mann-Whitney AUC (ties count 1/2) of `scores` against `labels` (1 = positive).
/// Throws DomainError on length mismatch or when a class is missing.
double mann_whitney_auc(std::span<const double> scores, std::span<const int> labels);

/// ROC summary of a score against binary labels. Absent scores are dropped together with
/// their label. The cutoff is the smallest observed score maximizing Youden's J under the
/// rule "positive iff score >= cutoff"; the AUC interval is Hanley-McNeil at 95%.
RocResult youden_analysis(std::span<const std::optional<double>> scores, std::span<const int> labels);

RocResult youden_analysis(std::span<const double> scores, std::span<const int> labels);

/// Divides each present value by `cutoff` (> 0).
std::vector<std::optional<double>> rescale_index(std::span<const std::optional<double>> values,
                                                 double cutoff);

}  // namespace censorbias
