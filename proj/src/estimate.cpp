#include "censorbias/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "censorbias/errors.hpp"

namespace censorbias {

namespace {

__extension__ typedef unsigned __int128 u128;

/// Correctly rounded n / d for 128-bit operands (round to nearest, ties to even).
double ratio_to_double(u128 n, u128 d) {
  constexpr u128 k53 = static_cast<u128>(1) << 53;
  if (n == 0) return 0.0;
  if (n < k53 && d < k53) return static_cast<double>(n) / static_cast<double>(d);
  auto bit_length = [](u128 v) {
    int bits = 0;
    for (; v != 0; v >>= 1) ++bits;
    return bits;
  };
  // Long division to 54 significant bits (53 + round bit) plus a sticky flag.
  u128 q = n / d;
  u128 r = n % d;
  int exponent = 0;
  bool sticky = false;
  if (const int bits = bit_length(q); bits > 54) {
    const int drop = bits - 54;
    sticky = (q & ((static_cast<u128>(1) << drop) - 1)) != 0;
    q >>= drop;
    exponent = drop;
  } else {
    while (bit_length(q) < 54) {
      const bool bit = r >= d - r;  // 2r >= d without overflowing
      r = bit ? r - (d - r) : r << 1;
      q = (q << 1) | (bit ? 1u : 0u);
      --exponent;
    }
  }
  sticky = sticky || r != 0;
  auto mantissa = static_cast<std::uint64_t>(q >> 1);
  if ((q & 1) != 0 && (sticky || (mantissa & 1) != 0)) ++mantissa;
  return std::ldexp(static_cast<double>(mantissa), exponent + 1);
}

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Running product of (r - d) / r. Exact as a reduced 128-bit fraction while the
/// products fit, so the reported double is correctly rounded; plain floating-point
/// product once they would overflow (only for large risk sets with censoring).
class SurvivalProduct {
 public:
  void multiply(std::uint64_t numerator, std::uint64_t denominator) {
    if (exact_) {
      u128 n, d;
      if (!__builtin_mul_overflow(num_, static_cast<u128>(numerator), &n) &&
          !__builtin_mul_overflow(den_, static_cast<u128>(denominator), &d)) {
        if (n == 0) {
          num_ = 0;
          den_ = 1;
        } else {
          const u128 g = gcd128(n, d);
          num_ = n / g;
          den_ = d / g;
        }
        return;
      }
      value_ = ratio_to_double(num_, den_);
      exact_ = false;
    }
    value_ = value_ * static_cast<double>(numerator) / static_cast<double>(denominator);
  }

  double value() const { return exact_ ? ratio_to_double(num_, den_) : value_; }

 private:
  bool exact_ = true;
  u128 num_ = 1;
  u128 den_ = 1;
  double value_ = 1.0;
};

}  // namespace

KMCurve km_fit(const SurvivalDataset& dataset) {
  if (dataset.empty()) throw DomainError("Kaplan-Meier fit of an empty dataset");

  std::vector<std::pair<double, int>> obs;
  obs.reserve(dataset.size());
  for (const auto& r : dataset.records) obs.emplace_back(r.time, r.status);
  std::sort(obs.begin(), obs.end());

  KMCurve curve;
  SurvivalProduct survival;
  std::size_t at_risk = obs.size();
  for (std::size_t i = 0; i < obs.size();) {
    const double t = obs[i].first;
    std::size_t events = 0;
    std::size_t censored = 0;
    for (; i < obs.size() && obs[i].first == t; ++i) (obs[i].second == 1 ? events : censored)++;
    if (events > 0) survival.multiply(at_risk - events, at_risk);
    const double s = survival.value();
    curve.steps.push_back({t, s, at_risk, events, censored});
    if (!curve.median && events > 0 && s <= 0.5) curve.median = t;
    at_risk -= events + censored;
  }
  return curve;
}

double km_survival_at(const KMCurve& curve, double t) {
  const auto it = std::upper_bound(curve.steps.begin(), curve.steps.end(), t,
                                   [](double value, const KMStep& step) { return value < step.time; });
  if (it == curve.steps.begin()) return 1.0;
  return std::prev(it)->survival;
}

namespace {

/// At-risk and event counts per group at one distinct event time.
struct RiskRow {
  double at_risk0;
  double at_risk1;
  double events0;
  double events1;
};

std::vector<RiskRow> risk_table(const SurvivalDataset& reference, const SurvivalDataset& comparison) {
  struct Obs {
    double time;
    int status;
    int group;
  };
  std::vector<Obs> obs;
  obs.reserve(reference.size() + comparison.size());
  for (const auto& r : reference.records) obs.push_back({r.time, r.status, 0});
  for (const auto& r : comparison.records) obs.push_back({r.time, r.status, 1});
  std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) { return a.time > b.time; });

  // Sweep from the latest time so risk sets accumulate.
  std::vector<RiskRow> rows;
  double n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < obs.size();) {
    const double t = obs[i].time;
    double d0 = 0, d1 = 0;
    for (; i < obs.size() && obs[i].time == t; ++i) {
      (obs[i].group == 0 ? n0 : n1) += 1;
      if (obs[i].status == 1) (obs[i].group == 0 ? d0 : d1) += 1;
    }
    if (d0 + d1 > 0) rows.push_back({n0, n1, d0, d1});
  }
  return rows;
}

PartialLikelihood evaluate(const std::vector<RiskRow>& rows, double beta, TieMethod ties) {
  const double risk = std::exp(beta);
  PartialLikelihood pl{0.0, 0.0, 0.0};
  for (const auto& row : rows) {
    const double deaths = row.events0 + row.events1;
    const double sum_risk = row.at_risk0 + row.at_risk1 * risk;
    const double sum_dead = row.events0 + row.events1 * risk;
    const double x_risk = row.at_risk1 * risk;
    const double x_dead = row.events1 * risk;
    pl.loglik += row.events1 * beta;
    pl.score += row.events1;
    const int d = static_cast<int>(deaths);
    for (int l = 0; l < d; ++l) {
      const double frac = ties == TieMethod::efron ? l / deaths : 0.0;
      const double denom = sum_risk - frac * sum_dead;
      const double mean_x = (x_risk - frac * x_dead) / denom;
      pl.loglik -= std::log(denom);
      pl.score -= mean_x;
      // Binary covariate: E[x^2] = E[x], so the variance term is m - m^2.
      pl.information += mean_x - mean_x * mean_x;
    }
  }
  return pl;
}

constexpr double kMaxBeta = 22.0;
constexpr int kMaxIterations = 25;
constexpr double kTolerance = 1e-9;

}  // namespace

PartialLikelihood cox_partial_likelihood(const SurvivalDataset& reference,
                                         const SurvivalDataset& comparison, double beta,
                                         TieMethod ties) {
  return evaluate(risk_table(reference, comparison), beta, ties);
}

CoxFit cox_two_group(const SurvivalDataset& reference, const SurvivalDataset& comparison,
                     TieMethod ties) {
  if (reference.empty() || comparison.empty()) throw DomainError("Cox fit needs two non-empty groups");
  const std::vector<RiskRow> rows = risk_table(reference, comparison);
  if (rows.empty()) throw NonConvergenceError("Cox fit without events: flat likelihood");

  CoxFit fit;
  double beta = 0.0;
  PartialLikelihood pl = evaluate(rows, beta, ties);
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    fit.iterations = iter;
    if (!(pl.information > 0.0) || !std::isfinite(pl.information))
      throw NonConvergenceError("Cox fit: information matrix is singular");
    double step = pl.score / pl.information;
    double next = beta + step;
    PartialLikelihood trial = evaluate(rows, next, ties);
    for (int halving = 0; halving < 30 && !(trial.loglik >= pl.loglik - 1e-12); ++halving) {
      step /= 2.0;
      next = beta + step;
      trial = evaluate(rows, next, ties);
    }
    beta = next;
    pl = trial;
    if (!std::isfinite(beta) || std::fabs(beta) > kMaxBeta)
      throw NonConvergenceError("Cox fit: coefficient diverges (monotone likelihood)");
    if (std::fabs(step) < kTolerance) break;
  }
  if (!(pl.information > 0.0))
    throw NonConvergenceError("Cox fit: information vanishes at the solution");

  fit.beta = beta;
  fit.hr = std::exp(beta);
  fit.se = 1.0 / std::sqrt(pl.information);
  fit.z = beta / fit.se;
  fit.p_value = std::erfc(std::fabs(fit.z) / std::sqrt(2.0));
  return fit;
}

}  // namespace censorbias
