#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "censorbias/dataset.hpp"

namespace censorbias {

/// Calibrated cutoffs used to scale the raw indexes so that 1 flags bias.
inline constexpr double kQbiCutoff = 1.2;
inline constexpr double kAbiCutoff = 0.932;

/// Sample quantile with linear interpolation, plotting position h = (n-1)p + 1.
double quantile_type7(std::span<const double> values, double p);

/// Ratio of the 95th percentile of event times to that of censored times strictly
/// before the last event. Absent when no such censored time exists.
std::optional<double> qbi(const SurvivalDataset& dataset);
std::optional<double> sqbi(const SurvivalDataset& dataset);

/// Share of in-interval censored times that fall below the mean event time.
std::optional<double> umbi(const SurvivalDataset& dataset);

/// Which sample supplies the mean/median skewness factor of the ABI.
enum class AbiSkewness {
  event_times,     ///< mean(events) / median(events); reproduces the reference audit table.
  censored_times,  ///< mean / median of in-interval censored times.
};

/// UMBI * skewness factor * exp(S_KM(last event)).
std::optional<double> abi(const SurvivalDataset& dataset,
                          AbiSkewness skewness = AbiSkewness::event_times);
std::optional<double> sabi(const SurvivalDataset& dataset,
                           AbiSkewness skewness = AbiSkewness::event_times);

struct BiasReport {
  std::optional<double> qbi;
  std::optional<double> sqbi;
  std::optional<double> umbi;
  std::optional<double> abi;
  std::optional<double> sabi;
};

/// All five indexes in one pass. Throws DomainError when the dataset has no events.
BiasReport bias_report(const SurvivalDataset& dataset,
                       AbiSkewness skewness = AbiSkewness::event_times);

struct AuditRow {
  std::string trial;
  std::size_t n = 0;
  double p_cens = 0.0;
  std::optional<double> sqbi;
  std::optional<double> sabi;
  std::string reference;
};

AuditRow clinical_bias(const SurvivalDataset& dataset, std::string trial, std::string reference);

}  // namespace censorbias
