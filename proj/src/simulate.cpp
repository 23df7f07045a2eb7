#include "censorbias/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "censorbias/errors.hpp"
#include "censorbias/format.hpp"
#include "censorbias/weibull.hpp"

namespace censorbias {

void validate(const CureModelSpec& spec) {
  if (spec.n_cases < 2) throw DomainError("n_cases must be at least 2");
  if (!(spec.cure_rate >= 0.0 && spec.cure_rate < 1.0))
    throw DomainError("cure_rate must be in [0, 1)");
  if (!(spec.median > 0.0) || !std::isfinite(spec.median))
    throw DomainError("median must be positive");
  if (!(spec.median * (1.0 - spec.cure_rate) < spec.q99) || !std::isfinite(spec.q99))
    throw DomainError("median * (1 - cure_rate) must be below q99");
}

int event_count(const CureModelSpec& spec) {
  return static_cast<int>(spec.n_cases * (1.0 - spec.cure_rate));
}

void sort_by_time(SurvivalDataset& dataset) {
  std::stable_sort(dataset.records.begin(), dataset.records.end(),
                   [](const SurvivalRecord& a, const SurvivalRecord& b) { return a.time < b.time; });
}

SurvivalDataset complete_follow_up(const CureModelSpec& spec, RngHandle handle,
                                   const std::string& label) {
  validate(spec);
  const int n_events = event_count(spec);
  if (n_events < 1) throw DomainError("cure model leaves no events");

  const WeibullParams params = quantiles_to_weibull(spec.median * (1.0 - spec.cure_rate), spec.q99);
  Rng rng(handle);
  std::vector<double> times(static_cast<std::size_t>(n_events));
  for (double& t : times) t = inverse_weibull(params, rng.uniform());
  std::sort(times.begin(), times.end());
  const double t_max = times.back();

  SurvivalDataset out{label, {}};
  out.records.reserve(static_cast<std::size_t>(spec.n_cases));
  for (double t : times) out.records.push_back({t, 1, label});
  for (int i = n_events; i < spec.n_cases; ++i) out.records.push_back({t_max, 0, label});
  return out;
}

SurvivalDataset time_censoring(const SurvivalDataset& uncensored, double median, double q99,
                               double p_censoring, RngHandle handle) {
  if (!(p_censoring >= 0.0 && p_censoring < 1.0))
    throw DomainError("time censoring needs p_censoring in [0, 1)");
  const std::string label = "Time censoring " + format_rounded(100.0 * p_censoring, 1) + " %";
  SurvivalDataset out = uncensored;
  out.name = label;
  for (auto& r : out.records) r.group = label;

  if (p_censoring > 0.0) {
    const WeibullParams params = quantiles_to_weibull(median, q99);
    const double exponent = (1.0 - p_censoring) / p_censoring;
    Rng rng(handle);
    for (auto& r : out.records) {
      // Survival probability u^exponent, evaluated in log space so tiny u^exponent
      // (an infinitely late censoring time) does not underflow to p = 0.
      const double neg_log_p = -exponent * std::log(rng.uniform());
      const double candidate = params.scale * std::pow(neg_log_p, 1.0 / params.shape);
      if (candidate < r.time) {
        r.time = candidate;
        r.status = 0;
      }
    }
  }
  sort_by_time(out);
  return out;
}

SurvivalDataset interim_censoring(const SurvivalDataset& uncensored, double median, double q99,
                                  double p_censoring, RngHandle handle) {
  if (!(p_censoring > 0.0 && p_censoring < 1.0))
    throw DomainError("interim censoring needs p_censoring in (0, 1)");
  const double interim_time = inverse_weibull(quantiles_to_weibull(median, q99), p_censoring) * 2.0;
  const std::string label = "Interim at t = " + format_rounded(interim_time, 1);

  Rng rng(handle);
  SurvivalDataset out{label, {}};
  out.records.reserve(uncensored.size());
  for (const auto& source : uncensored.records) {
    SurvivalRecord r = source;
    r.group = label;
    const double interval = interim_time - rng.uniform(0.0, interim_time);
    if (interval < r.time) {
      r.status = 0;
      r.time = interval;
    }
    if (r.time > 0.0) out.records.push_back(std::move(r));
  }
  sort_by_time(out);
  return out;
}

SurvivalDataset case_censoring(const SurvivalDataset& uncensored, double p_censoring, RngHandle handle) {
  if (!(p_censoring >= 0.0 && p_censoring <= 1.0))
    throw DomainError("case censoring needs p_censoring in [0, 1]");
  const std::size_t n = uncensored.size();
  const auto n_censored = static_cast<std::size_t>(static_cast<double>(n) * p_censoring);
  const std::string label = "Case " + format_rounded(100.0 * (1.0 - p_censoring), 1) + " %";

  SurvivalDataset out = uncensored;
  out.name = label;
  for (auto& r : out.records) r.group = label;

  Rng rng(handle);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < n_censored; ++i) std::swap(order[i], order[i + rng.index(n - i)]);
  for (std::size_t i = 0; i < n_censored; ++i) {
    auto& r = out.records[order[i]];
    r.time *= rng.uniform(0.2, 1.0);
    r.status = 0;
  }
  sort_by_time(out);
  return out;
}

}  // namespace censorbias
