#pragma once
// Independent reference computations for the test suites. Nothing here calls the
// library's estimators; they are written directly from the textbook definitions.

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "censorbias/dataset.hpp"

namespace oracle {

inline censorbias::SurvivalDataset make(const std::vector<double>& times, const std::vector<int>& status,
                                        const std::string& group = "g") {
  censorbias::SurvivalDataset ds{group, {}};
  for (std::size_t i = 0; i < times.size(); ++i) ds.records.push_back({times[i], status[i], group});
  return ds;
}

/// Random small dataset: integer-valued times in [1, max_time] (many ties), ~30% censored.
inline censorbias::SurvivalDataset random_small(std::mt19937_64& gen, std::size_t n, int max_time,
                                                double censor_share = 0.3, const std::string& group = "g") {
  std::uniform_int_distribution<int> time(1, max_time);
  std::bernoulli_distribution censored(censor_share);
  censorbias::SurvivalDataset ds{group, {}};
  for (std::size_t i = 0; i < n; ++i) ds.records.push_back({double(time(gen)), censored(gen) ? 0 : 1, group});
  return ds;
}

/// Product-limit survival just after time t, as an exact rational rounded once to double.
inline double km_exact(const censorbias::SurvivalDataset& ds, double t) {
  mpq_t s, factor;
  mpq_init(s);
  mpq_init(factor);
  mpq_set_ui(s, 1, 1);
  std::set<double> event_times;
  for (const auto& r : ds.records)
    if (r.status == 1 && r.time <= t) event_times.insert(r.time);
  for (double u : event_times) {
    unsigned long at_risk = 0, deaths = 0;
    for (const auto& r : ds.records) {
      if (r.time >= u) ++at_risk;
      if (r.time == u && r.status == 1) ++deaths;
    }
    mpq_set_ui(factor, at_risk - deaths, at_risk);
    mpq_canonicalize(factor);
    mpq_mul(s, s, factor);
  }
  mpfr_t f;
  mpfr_init2(f, 53);
  mpfr_set_q(f, s, MPFR_RNDN);
  const double out = mpfr_get_d(f, MPFR_RNDN);
  mpfr_clear(f);
  mpq_clear(factor);
  mpq_clear(s);
  return out;
}

/// Empirical survival share: #{times > t} / n.
inline double one_minus_ecdf(const censorbias::SurvivalDataset& ds, double t) {
  std::size_t above = 0;
  for (const auto& r : ds.records) above += r.time > t ? 1 : 0;
  return double(above) / double(ds.size());
}

/// Efron log partial likelihood of x = 0 (reference) / 1 (comparison), summing over
/// subjects explicitly at every distinct event time.
inline double efron_loglik(const censorbias::SurvivalDataset& ref, const censorbias::SurvivalDataset& cmp,
                           double beta) {
  struct S {
    double t;
    int d;
    double x;
  };
  std::vector<S> all;
  for (const auto& r : ref.records) all.push_back({r.time, r.status, 0.0});
  for (const auto& r : cmp.records) all.push_back({r.time, r.status, 1.0});
  std::set<double> times;
  for (const auto& s : all)
    if (s.d == 1) times.insert(s.t);
  double ll = 0;
  for (double u : times) {
    double risk_sum = 0, tied_sum = 0, tied_lin = 0;
    int m = 0;
    for (const auto& s : all) {
      if (s.t >= u) risk_sum += std::exp(beta * s.x);
      if (s.t == u && s.d == 1) {
        tied_sum += std::exp(beta * s.x);
        tied_lin += beta * s.x;
        ++m;
      }
    }
    ll += tied_lin;
    for (int k = 0; k < m; ++k) ll -= std::log(risk_sum - double(k) / m * tied_sum);
  }
  return ll;
}

/// Maximizer of efron_loglik on a 1e-4 grid (coarse 1e-2 scan, then 1e-4 refinement).
inline double grid_argmax(const censorbias::SurvivalDataset& ref, const censorbias::SurvivalDataset& cmp,
                          double lo = -5.0, double hi = 5.0) {
  double best = lo, best_ll = -INFINITY;
  for (long i = 0; lo + i * 1e-2 <= hi + 1e-12; ++i) {
    const double b = lo + i * 1e-2;
    const double ll = efron_loglik(ref, cmp, b);
    if (ll > best_ll) best_ll = ll, best = b;
  }
  const double center = best;
  for (long i = -200; i <= 200; ++i) {
    const double b = center + i * 1e-4;
    const double ll = efron_loglik(ref, cmp, b);
    if (ll > best_ll) best_ll = ll, best = b;
  }
  return best;
}

/// AUC by counting every positive/negative pair, as an exact ratio of integers.
inline double auc_pairs(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::int64_t twice_wins = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      twice_wins += scores[i] > scores[j] ? 2 : scores[i] == scores[j] ? 1 : 0;
    }
  }
  return double(twice_wins) / double(2 * pairs);
}

}  // namespace oracle
