#include "censorbias/bias.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "censorbias/errors.hpp"
#include "censorbias/estimate.hpp"

namespace censorbias {

double quantile_type7(std::span<const double> values, double p) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile probability must be in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size() || frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {

double mean(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

/// Event times and the censored times strictly before the last event.
struct EventSplit {
  std::vector<double> events;
  std::vector<double> early_censored;
  double last_event;
};

EventSplit split(const SurvivalDataset& dataset) {
  EventSplit s{dataset.event_times(), {}, 0.0};
  if (s.events.empty()) throw DomainError("bias index of a dataset without events");
  s.last_event = *std::max_element(s.events.begin(), s.events.end());
  for (double t : dataset.censored_times())
    if (t < s.last_event) s.early_censored.push_back(t);
  return s;
}

std::optional<double> qbi_of(const EventSplit& s) {
  if (s.early_censored.empty()) return std::nullopt;
  return quantile_type7(s.events, 0.95) / quantile_type7(s.early_censored, 0.95);
}

std::optional<double> umbi_of(const EventSplit& s) {
  if (s.early_censored.empty()) return std::nullopt;
  const double mean_event = mean(s.events);
  const auto below = std::count_if(s.early_censored.begin(), s.early_censored.end(),
                                   [&](double t) { return t < mean_event; });
  return static_cast<double>(below) / static_cast<double>(s.early_censored.size());
}

std::optional<double> abi_of(const SurvivalDataset& dataset, const EventSplit& s, AbiSkewness skewness) {
  const auto under_mean = umbi_of(s);
  if (!under_mean) return std::nullopt;
  const std::vector<double>& sample =
      skewness == AbiSkewness::event_times ? s.events : s.early_censored;
  const double skew = mean(sample) / quantile_type7(sample, 0.5);
  const double long_term = km_survival_at(km_fit(dataset), s.last_event);
  return *under_mean * skew * std::exp(long_term);
}

std::optional<double> scaled(std::optional<double> value, double cutoff) {
  if (!value) return std::nullopt;
  return *value / cutoff;
}

}  // namespace

std::optional<double> qbi(const SurvivalDataset& dataset) { return qbi_of(split(dataset)); }

std::optional<double> sqbi(const SurvivalDataset& dataset) { return scaled(qbi(dataset), kQbiCutoff); }

std::optional<double> umbi(const SurvivalDataset& dataset) { return umbi_of(split(dataset)); }

std::optional<double> abi(const SurvivalDataset& dataset, AbiSkewness skewness) {
  return abi_of(dataset, split(dataset), skewness);
}

std::optional<double> sabi(const SurvivalDataset& dataset, AbiSkewness skewness) {
  return scaled(abi(dataset, skewness), kAbiCutoff);
}

BiasReport bias_report(const SurvivalDataset& dataset, AbiSkewness skewness) {
  const EventSplit s = split(dataset);
  BiasReport report;
  report.qbi = qbi_of(s);
  report.sqbi = scaled(report.qbi, kQbiCutoff);
  report.umbi = umbi_of(s);
  report.abi = abi_of(dataset, s, skewness);
  report.sabi = scaled(report.abi, kAbiCutoff);
  return report;
}

AuditRow clinical_bias(const SurvivalDataset& dataset, std::string trial, std::string reference) {
  if (dataset.empty()) throw DomainError("audit of an empty dataset");
  const BiasReport report = bias_report(dataset);
  AuditRow row;
  row.trial = std::move(trial);
  row.n = dataset.size();
  row.p_cens = static_cast<double>(dataset.censored_count()) / static_cast<double>(dataset.size());
  row.sqbi = report.sqbi;
  row.sabi = report.sabi;
  row.reference = std::move(reference);
  return row;
}

}  // namespace censorbias
