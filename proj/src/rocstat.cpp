#include "censorbias/rocstat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "censorbias/errors.hpp"

namespace censorbias {

namespace {

constexpr double kZ975 = 1.959963984540054;

void check_inputs(std::size_t n_scores, std::size_t n_labels) {
  if (n_scores != n_labels) throw DomainError("scores and labels differ in length");
  if (n_scores == 0) throw DomainError("ROC analysis of empty input");
}

void check_labels(std::span<const int> labels) {
  for (int label : labels)
    if (label != 0 && label != 1) throw DomainError("ROC labels must be 0 or 1");
}

}  // namespace

double mann_whitney_auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores.size(), labels.size());
  check_labels(labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the positive-class rank sum with mid-ranks; all quantities stay integral.
  std::uint64_t twice_rank_sum = 0;
  std::uint64_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t twice_mid_rank = (i + 1) + j;  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        twice_rank_sum += twice_mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::uint64_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw DomainError("ROC analysis needs both classes");
  const std::uint64_t twice_u = twice_rank_sum - positives * (positives + 1);
  return static_cast<double>(twice_u) / static_cast<double>(2 * positives * negatives);
}

RocResult youden_analysis(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores.size(), labels.size());
  RocResult result{};
  result.auc = mann_whitney_auc(scores, labels);

  const std::size_t n = scores.size();
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = n - positives;
  result.positives = positives;
  result.negatives = negatives;

  const double a = result.auc;
  const double q1 = a / (2.0 - a);
  const double q2 = 2.0 * a * a / (1.0 + a);
  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(negatives);
  const double var = (a * (1.0 - a) + (np - 1.0) * (q1 - a * a) + (nn - 1.0) * (q2 - a * a)) / (np * nn);
  const double se = std::sqrt(std::max(var, 0.0));
  result.auc_ci_low = std::clamp(a - kZ975 * se, 0.0, 1.0);
  result.auc_ci_high = std::clamp(a + kZ975 * se, 0.0, 1.0);

  // Sweep cutoffs from the largest observed score down; at each distinct value c the
  // predicted positives are exactly the scores >= c.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
  std::size_t tp = 0, fp = 0;
  double best_j = -std::numeric_limits<double>::infinity();
  std::size_t best_tp = 0, best_fp = 0;
  for (std::size_t i = 0; i < n;) {
    const double c = scores[order[i]];
    for (; i < n && scores[order[i]] == c; ++i) (labels[order[i]] == 1 ? tp : fp)++;
    const double j = static_cast<double>(tp) / np + static_cast<double>(negatives - fp) / nn - 1.0;
    // >= so that among equal J the smaller cutoff, reached later, wins.
    if (j >= best_j - 1e-12) {
      best_j = std::max(best_j, j);
      result.cutoff = c;
      best_tp = tp;
      best_fp = fp;
    }
  }
  const std::size_t tn = negatives - best_fp;
  const std::size_t fn = positives - best_tp;
  result.sensitivity = static_cast<double>(best_tp) / np;
  result.specificity = static_cast<double>(tn) / nn;
  result.ppv = static_cast<double>(best_tp) / static_cast<double>(best_tp + best_fp);
  result.npv = tn + fn > 0 ? static_cast<double>(tn) / static_cast<double>(tn + fn)
                           : std::numeric_limits<double>::quiet_NaN();
  return result;
}

RocResult youden_analysis(std::span<const std::optional<double>> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DomainError("scores and labels differ in length");
  std::vector<double> kept_scores;
  std::vector<int> kept_labels;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i] || std::isnan(*scores[i])) continue;
    kept_scores.push_back(*scores[i]);
    kept_labels.push_back(labels[i]);
  }
  return youden_analysis(std::span<const double>(kept_scores), std::span<const int>(kept_labels));
}

std::vector<std::optional<double>> rescale_index(std::span<const std::optional<double>> values,
                                                 double cutoff) {
  if (!(cutoff > 0.0)) throw DomainError("rescale cutoff must be positive");
  std::vector<std::optional<double>> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v ? std::optional<double>(*v / cutoff) : std::nullopt);
  return out;
}

}  // namespace censorbias
