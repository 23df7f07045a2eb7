#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "censorbias/dataset.hpp"

namespace censorbias {

/// Product-limit estimate at one distinct observed time.
struct KMStep {
  double time;
  double survival;
  std::size_t at_risk;
  std::size_t events;
  std::size_t censored;
};

/// Right-continuous step survival function. One step per distinct observed time
/// (event or censoring); survival only drops at steps with events.
struct KMCurve {
  std::vector<KMStep> steps;
  std::optional<double> median;
};

/// Kaplan-Meier estimator; ties grouped, censored cases leave the risk set after
/// events at the same time. Throws DomainError on an empty dataset.
KMCurve km_fit(const SurvivalDataset& dataset);

/// S(t): survival of the last step at or before t, 1 before the first step.
double km_survival_at(const KMCurve& curve, double t);

enum class TieMethod { efron, breslow };

struct CoxFit {
  double beta = 0.0;
  double hr = 1.0;
  double se = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  int iterations = 0;
};

/// Two-group Cox model with covariate x = 0 for `reference`, 1 for `comparison`;
/// `hr` is the hazard of the comparison relative to the reference.
///
/// Newton iteration from beta = 0 with step halving. Throws NonConvergenceError
/// when there are no events, the information vanishes, or |beta| exceeds 22
/// (monotone likelihood).
CoxFit cox_two_group(const SurvivalDataset& reference, const SurvivalDataset& comparison,
                     TieMethod ties = TieMethod::efron);

/// Log partial likelihood, score and information of the two-group model at `beta`.
struct PartialLikelihood {
  double loglik;
  double score;
  double information;
};

PartialLikelihood cox_partial_likelihood(const SurvivalDataset& reference,
                                         const SurvivalDataset& comparison, double beta,
                                         TieMethod ties = TieMethod::efron);

}  // namespace censorbias
