#include "censorbias/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "censorbias/bias.hpp"
#include "censorbias/csv.hpp"
#include "censorbias/errors.hpp"
#include "censorbias/estimate.hpp"
#include "censorbias/format.hpp"
#include "censorbias/simulate.hpp"

namespace censorbias {

std::string_view to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::time:
      return "time";
    case Mechanism::interim:
      return "interim";
    case Mechanism::case_:
      return "case";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view text) {
  if (text == "time") return Mechanism::time;
  if (text == "interim") return Mechanism::interim;
  if (text == "case") return Mechanism::case_;
  throw DomainError("unknown censoring mechanism '" + std::string(text) + "'");
}

namespace {

/// Everything but the Cox fit; the caller decides how a failed fit is reported.
TrialResult trial_metrics(const SurvivalDataset& group1, Mechanism mechanism) {
  const auto events = group1.event_times();
  if (events.empty()) throw DomainError("censored dataset has no events");
  const double last_event = *std::max_element(events.begin(), events.end());

  std::size_t early = 0, early_censored = 0;
  for (const auto& r : group1.records) {
    if (r.time < last_event) {
      ++early;
      if (r.status != 1) ++early_censored;
    }
  }
  TrialResult result;
  result.mechanism = mechanism;
  result.n_cases = static_cast<int>(group1.size());
  result.p_censored = early > 0 ? static_cast<double>(early_censored) / static_cast<double>(early) : 0.0;
  result.p_long_term = 1.0 - static_cast<double>(early) / static_cast<double>(group1.size());
  const BiasReport report = bias_report(group1);
  result.sqbi = report.sqbi;
  result.umbi = report.umbi;
  result.sabi = report.sabi;
  return result;
}

}  // namespace

TrialResult trial_results(const SurvivalDataset& group0, const SurvivalDataset& group1,
                          Mechanism mechanism) {
  TrialResult result = trial_metrics(group1, mechanism);
  const CoxFit fit = cox_two_group(group0, group1);
  result.hr = fit.hr;
  result.p_value = fit.p_value;
  return result;
}

double Sampler::sample(Rng& rng) const { return is_fixed() ? lo : rng.uniform(lo, hi); }

void validate(const ExperimentSpec& spec) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw DomainError(what);
  };
  check(spec.n_trials >= 1, "n_trials must be positive");
  for (const Sampler* s : {&spec.n_cases, &spec.median, &spec.cure_rate, &spec.p_censoring})
    check(s->lo <= s->hi && std::isfinite(s->lo) && std::isfinite(s->hi), "sampler range must satisfy lo <= hi");
  check(spec.n_cases.lo >= 2, "n_cases must be at least 2");
  check(spec.q99 > 0 && std::isfinite(spec.q99), "q99 must be positive");
  check(spec.median.lo > 0 && spec.median.hi < spec.q99, "median range must lie in (0, q99)");
  check(spec.cure_rate.lo >= 0 && spec.cure_rate.hi < 1, "cure-rate range must lie in [0, 1)");
  check(spec.p_censoring.lo > 0 && spec.p_censoring.hi < 1, "p_censoring range must lie in (0, 1)");
  check(std::floor(spec.n_cases.lo) * (1.0 - spec.cure_rate.hi) >= 1.0,
        "cure-rate range leaves trials without events");
}

ExperimentSpec preset_experiment(int id) {
  ExperimentSpec spec;
  spec.n_trials = 1000;
  spec.n_cases = Sampler::fixed(1000);
  spec.q99 = 100;
  spec.p_censoring = Sampler::uniform(0.05, 0.95);
  switch (id) {
    case 1:
      spec.median = Sampler::uniform(5, 50);
      spec.cure_rate = Sampler::fixed(0);
      break;
    case 2:
      spec.median = Sampler::uniform(50, 95);
      spec.cure_rate = Sampler::fixed(0);
      break;
    case 3:
      spec.median = Sampler::uniform(5, 50);
      spec.cure_rate = Sampler::fixed(0.5);
      break;
    case 4:
      spec.median = Sampler::uniform(50, 95);
      spec.cure_rate = Sampler::fixed(0.5);
      break;
    case 5:
      spec.median = Sampler::uniform(5, 95);
      spec.cure_rate = Sampler::uniform(0, 0.8);
      break;
    default:
      throw DomainError("experiment preset must be 1..5, got " + std::to_string(id));
  }
  return spec;
}

namespace {

enum StreamTag : std::uint64_t { kParameters = 1, kComplete, kTime, kInterim, kCase };

RngHandle stream(const ExperimentSpec& spec, std::size_t trial, StreamTag tag) {
  return {spec.master_seed, derive_stream(trial, tag)};
}

struct TrialRows {
  std::array<TrialResult, 3> rows;
  std::size_t failures = 0;
};

TrialResult lenient_result(const SurvivalDataset& group0, const SurvivalDataset& group1,
                           Mechanism mechanism, std::size_t& failures) {
  TrialResult result;
  try {
    result = trial_metrics(group1, mechanism);
  } catch (const DomainError&) {
    result = TrialResult{};
    result.mechanism = mechanism;
    result.n_cases = static_cast<int>(group1.size());
    ++failures;
    return result;
  }
  try {
    const CoxFit fit = cox_two_group(group0, group1);
    result.hr = fit.hr;
    result.p_value = fit.p_value;
  } catch (const NonConvergenceError&) {
    ++failures;
  }
  return result;
}

TrialRows run_trial(const ExperimentSpec& spec, std::size_t trial) {
  const TrialParameters p = sample_trial_parameters(spec, trial);
  const CureModelSpec model{p.n_cases, p.median, spec.q99, p.cure_rate};
  const SurvivalDataset group0 = complete_follow_up(model, stream(spec, trial, kComplete));
  const SurvivalDataset timed =
      time_censoring(group0, p.median, spec.q99, p.p_censoring, stream(spec, trial, kTime));
  const SurvivalDataset interim =
      interim_censoring(group0, p.median, spec.q99, p.p_censoring, stream(spec, trial, kInterim));
  const SurvivalDataset cased = case_censoring(group0, p.p_censoring, stream(spec, trial, kCase));

  TrialRows out;
  out.rows[0] = lenient_result(group0, timed, Mechanism::time, out.failures);
  out.rows[1] = lenient_result(group0, interim, Mechanism::interim, out.failures);
  out.rows[2] = lenient_result(group0, cased, Mechanism::case_, out.failures);
  return out;
}

}  // namespace

TrialParameters sample_trial_parameters(const ExperimentSpec& spec, std::size_t trial_index) {
  Rng rng(stream(spec, trial_index, kParameters));
  TrialParameters p{};
  p.n_cases = static_cast<int>(std::floor(spec.n_cases.sample(rng)));
  p.median = spec.median.sample(rng);
  p.cure_rate = spec.cure_rate.sample(rng);
  p.p_censoring = spec.p_censoring.sample(rng);
  return p;
}

ExperimentTable run_experiment(const ExperimentSpec& spec, unsigned threads) {
  validate(spec);
  const auto n_trials = static_cast<std::size_t>(spec.n_trials);
  std::vector<TrialRows> results(n_trials);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_trials));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n_trials; i = next++) {
      try {
        results[i] = run_trial(spec, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n_trials;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  ExperimentTable table;
  table.rows.reserve(3 * n_trials);
  for (const auto& trial : results) {
    table.rows.insert(table.rows.end(), trial.rows.begin(), trial.rows.end());
    table.non_convergent += trial.failures;
  }
  return table;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("linear fit of unequal-length samples");
  if (x.size() < 3) throw DomainError("linear fit needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const auto constant = [](std::span<const double> v) {
    return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
  };
  if (constant(x) || constant(y) || !(sxx > 0.0) || !(syy > 0.0))
    throw DomainError("linear fit of a zero-variance sample");
  const double slope = sxy / sxx;
  return {sxy / std::sqrt(sxx * syy), slope, my - slope * mx};
}

LinearFit case_censoring_correlation(const ExperimentTable& table) {
  std::vector<double> x, y;
  for (const auto& row : table.rows) {
    if (row.mechanism != Mechanism::case_ || !row.hr) continue;
    x.push_back(row.p_censored);
    y.push_back(*row.hr);
  }
  return linear_fit(x, y);
}

namespace {

const std::vector<std::string> kTableHeader = {"type", "nCases", "pCensored", "pCured", "hr",
                                               "pValue", "SQBI", "UMBI", "SABI"};

std::optional<double> parse_optional(const std::string& cell) {
  if (cell.empty() || cell == "NA") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw ValueError("bad number '" + cell + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw ValueError("bad number '" + cell + "'");
  } catch (const std::out_of_range&) {
    throw ValueError("number out of range '" + cell + "'");
  }
}

double parse_required(const std::string& cell) {
  const auto v = parse_optional(cell);
  if (!v) throw ValueError("missing required value");
  return *v;
}

}  // namespace

void write_table(const ExperimentTable& table, const std::filesystem::path& path) {
  csv::Table out;
  out.header = kTableHeader;
  out.rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    out.rows.push_back({std::string(to_string(r.mechanism)), std::to_string(r.n_cases),
                        format_shortest(r.p_censored), format_shortest(r.p_long_term),
                        format_optional(r.hr), format_optional(r.p_value), format_optional(r.sqbi),
                        format_optional(r.umbi), format_optional(r.sabi)});
  }
  csv::write_file(path, out);
}

ExperimentTable read_table(const std::filesystem::path& path) {
  const csv::Table in = csv::read_file(path);
  std::array<std::size_t, 9> col{};
  for (std::size_t i = 0; i < kTableHeader.size(); ++i) col[i] = in.column(kTableHeader[i]);
  ExperimentTable table;
  for (const auto& row : in.rows) {
    TrialResult r;
    r.mechanism = parse_mechanism(row[col[0]]);
    r.n_cases = static_cast<int>(parse_required(row[col[1]]));
    r.p_censored = parse_required(row[col[2]]);
    r.p_long_term = parse_required(row[col[3]]);
    r.hr = parse_optional(row[col[4]]);
    r.p_value = parse_optional(row[col[5]]);
    r.sqbi = parse_optional(row[col[6]]);
    r.umbi = parse_optional(row[col[7]]);
    r.sabi = parse_optional(row[col[8]]);
    if (!r.hr) ++table.non_convergent;
    table.rows.push_back(r);
  }
  return table;
}

std::vector<std::optional<double>> column(const ExperimentTable& table, std::string_view name) {
  std::vector<std::optional<double>> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    if (name == "SQBI") out.push_back(r.sqbi);
    else if (name == "UMBI") out.push_back(r.umbi);
    else if (name == "SABI") out.push_back(r.sabi);
    else if (name == "hr") out.push_back(r.hr);
    else if (name == "pValue") out.push_back(r.p_value);
    else if (name == "pCensored") out.push_back(r.p_censored);
    else if (name == "pCured") out.push_back(r.p_long_term);
    else throw DomainError("unknown experiment column '" + std::string(name) + "'");
  }
  return out;
}

std::vector<int> significance_labels(const ExperimentTable& table) {
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  for (const auto& r : table.rows) labels.push_back(r.p_value && *r.p_value < 0.05 ? 1 : 0);
  return labels;
}

}  // namespace censorbias
