#pragma once

#include <string>

#include "censorbias/dataset.hpp"
#include "censorbias/rng.hpp"

namespace censorbias {

/// Weibull mixture cure-rate population: events follow a Weibull with the given
/// median and 99th percentile, a `cure_rate` share never has the event.
struct CureModelSpec {
  int n_cases = 1000;
  double median = 25.0;
  double q99 = 100.0;
  double cure_rate = 0.0;
};

/// Throws DomainError unless n_cases >= 2, 0 <= cure_rate < 1, median > 0 and
/// median * (1 - cure_rate) < q99.
void validate(const CureModelSpec& spec);

/// Number of non-cured cases: floor(n_cases * (1 - cure_rate)).
int event_count(const CureModelSpec& spec);

/// Complete follow-up cohort. Event times come from the Weibull with quantiles
/// (median * (1 - cure_rate), q99), sorted ascending with status 1; cured cases
/// follow with status 0 at the largest event time.
SurvivalDataset complete_follow_up(const CureModelSpec& spec, RngHandle rng,
                                   const std::string& label = "Uncensored");

/// Per-case random censoring times from the (median, q99) Weibull, drawn at survival
/// probability u^((1-p)/p). p = 0 is the identity; p must be in [0, 1).
SurvivalDataset time_censoring(const SurvivalDataset& uncensored, double median, double q99,
                               double p_censoring, RngHandle rng);

/// Single interim analysis at twice the (median, q99) Weibull time for survival p;
/// each case is recruited uniformly before it. Cases left with time <= 0 are dropped.
SurvivalDataset interim_censoring(const SurvivalDataset& uncensored, double median, double q99,
                                  double p_censoring, RngHandle rng);

/// floor(n * p) distinct cases chosen at random, each shortened by a U(0.2, 1) factor and censored.
SurvivalDataset case_censoring(const SurvivalDataset& uncensored, double p_censoring, RngHandle rng);

/// Stable ascending sort by time (ties keep input order).
void sort_by_time(SurvivalDataset& dataset);

}  // namespace censorbias
