#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "censorbias/dataset.hpp"
#include "censorbias/rng.hpp"

namespace censorbias {

enum class Mechanism { time, interim, case_ };

std::string_view to_string(Mechanism mechanism);
Mechanism parse_mechanism(std::string_view text);

/// One virtual trial: a censored dataset compared against its complete follow-up.
struct TrialResult {
  Mechanism mechanism = Mechanism::time;
  int n_cases = 0;
  /// Share of censored cases among those observed before the last event.
  double p_censored = 0.0;
  /// 1 - (cases observed before the last event) / n; not the generative cure rate.
  double p_long_term = 0.0;
  std::optional<double> hr;
  std::optional<double> p_value;
  std::optional<double> sqbi;
  std::optional<double> umbi;
  std::optional<double> sabi;
};

/// Metrics of `group1` (censored) against `group0` (complete follow-up).
/// Throws DomainError when group1 has no events and NonConvergenceError from the Cox fit.
TrialResult trial_results(const SurvivalDataset& group0, const SurvivalDataset& group1,
                          Mechanism mechanism);

/// A parameter that is either fixed or drawn uniformly per trial.
struct Sampler {
  double lo = 0.0;
  double hi = 0.0;

  static Sampler fixed(double value) { return {value, value}; }
  static Sampler uniform(double lo, double hi) { return {lo, hi}; }

  bool is_fixed() const { return lo == hi; }
  double sample(Rng& rng) const;
};

struct ExperimentSpec {
  int n_trials = 1000;
  Sampler n_cases = Sampler::fixed(1000);
  Sampler median = Sampler::uniform(5, 95);
  Sampler cure_rate = Sampler::fixed(0);
  Sampler p_censoring = Sampler::uniform(0.05, 0.95);
  double q99 = 100.0;
  std::uint64_t master_seed = 1963;
};

/// Throws DomainError when a sampler range leaves the generators' domains.
void validate(const ExperimentSpec& spec);

/// The five preset configurations (id 1..5).
ExperimentSpec preset_experiment(int id);

struct ExperimentTable {
  std::vector<TrialResult> rows;
  /// Rows whose Cox fit (or whole trial) failed; their hr/p_value are absent.
  std::size_t non_convergent = 0;
};

/// Three rows per trial (time, interim, case), ordered by trial index. Trials run on
/// `threads` workers (0 = hardware concurrency); the table does not depend on it.
ExperimentTable run_experiment(const ExperimentSpec& spec, unsigned threads = 0);

/// Parameters drawn for one trial, exposed for reproducibility checks.
struct TrialParameters {
  int n_cases;
  double median;
  double cure_rate;
  double p_censoring;
};

TrialParameters sample_trial_parameters(const ExperimentSpec& spec, std::size_t trial_index);

struct LinearFit {
  double pearson_r;
  double slope;
  double intercept;
};

/// Pearson r and least-squares line of hr against p_censored over case-mechanism rows
/// with a defined hr. Throws DomainError with fewer than 3 rows or zero variance.
LinearFit case_censoring_correlation(const ExperimentTable& table);

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Header: type,nCases,pCensored,pCured,hr,pValue,SQBI,UMBI,SABI; absent values are empty cells.
void write_table(const ExperimentTable& table, const std::filesystem::path& path);
ExperimentTable read_table(const std::filesystem::path& path);

/// Column accessors by CSV header name ("SQBI", "UMBI", "SABI", "hr", "pValue", "pCensored").
std::vector<std::optional<double>> column(const ExperimentTable& table, std::string_view name);

/// 1 where p_value < 0.05, 0 otherwise (absent p counts as 0).
std::vector<int> significance_labels(const ExperimentTable& table);

}  // namespace censorbias
