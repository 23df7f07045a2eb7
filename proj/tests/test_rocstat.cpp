#include <doctest.h>

#include <cmath>
#include <random>

#include "censorbias/errors.hpp"
#include "censorbias/rocstat.hpp"
#include "oracles.hpp"

using namespace censorbias;

namespace {
/// Youden's J of the rule "score >= c", computed directly.
double youden_at(const std::vector<double>& s, const std::vector<int>& y, double c) {
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool pos = s[i] >= c;
    if (y[i] == 1) (pos ? tp : fn) += 1;
    else (pos ? fp : tn) += 1;
  }
  return tp / (tp + fn) + tn / (tn + fp) - 1;
}
}  // namespace

TEST_CASE("perfect separation") {
  const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
  const std::vector<int> y{0, 0, 1, 1};
  const auto r = youden_analysis(s, y);
  CHECK(r.auc == 1.0);
  CHECK(r.cutoff == 0.8);
  CHECK(r.sensitivity == 1.0);
  CHECK(r.specificity == 1.0);
  CHECK(r.ppv == 1.0);
  CHECK(r.npv == 1.0);
  CHECK(r.auc_ci_high <= 1.0);
}

TEST_CASE("small hand-enumerated AUCs") {
  // Positives {1, 3} vs negatives {2, 4}: only (3, 2) is concordant, 1 of 4 pairs.
  const std::vector<double> s{1, 2, 3, 4};
  const std::vector<int> y{1, 0, 1, 0};
  CHECK(mann_whitney_auc(s, y) == 0.25);
  CHECK(mann_whitney_auc(s, y) == oracle::auc_pairs(s, y));
  const std::vector<int> alternating{1, 0, 0, 1};
  CHECK(mann_whitney_auc(s, alternating) == 0.5);
  const std::vector<double> tied{7, 7, 7, 7};
  CHECK(mann_whitney_auc(tied, y) == 0.5);
}

TEST_CASE("Mann-Whitney AUC equals exhaustive pair counting") {
  std::mt19937_64 gen(10);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + gen() % 199;
    std::vector<double> s(n);
    std::vector<int> y(n);
    const int levels = 1 + int(gen() % 30);  // coarse scores: plenty of ties
    for (std::size_t i = 0; i < n; ++i) s[i] = double(gen() % levels) / 7.0, y[i] = int(gen() % 2);
    y[0] = 0, y[1] = 1;
    const double expected = oracle::auc_pairs(s, y);
    REQUIRE(mann_whitney_auc(s, y) == expected);
    REQUIRE(youden_analysis(s, y).auc == expected);
  }
}

TEST_CASE("the cutoff maximizes J and is the smallest maximizer") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 10 + gen() % 90;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = int(gen() % 2);
      s[i] = double(gen() % 20) + (y[i] ? 3.0 : 0.0);
    }
    y[0] = 0, y[1] = 1;
    const auto r = youden_analysis(s, y);
    const double best = youden_at(s, y, r.cutoff);
    for (double c : s) {
      CHECK(youden_at(s, y, c) <= best + 1e-12);
      if (c < r.cutoff) CHECK(youden_at(s, y, c) < best - 1e-12);
    }
    CHECK(r.sensitivity + r.specificity - 1 == doctest::Approx(best));
    CHECK(r.auc_ci_low <= r.auc);
    CHECK(r.auc <= r.auc_ci_high);
  }
}

TEST_CASE("monotone transforms move the cutoff but not the operating point") {
  std::mt19937_64 gen(12);
  std::vector<double> s(150), t(150);
  std::vector<int> y(150);
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = int(gen() % 2);
    s[i] = double(gen() % 1000) / 100.0 + y[i];
    t[i] = std::exp(s[i]);
  }
  const auto a = youden_analysis(s, y), b = youden_analysis(t, y);
  CHECK(b.cutoff == std::exp(a.cutoff));
  CHECK(a.sensitivity == b.sensitivity);
  CHECK(a.specificity == b.specificity);
  CHECK(a.auc == b.auc);
}

TEST_CASE("rescaling by the cutoff moves the cutoff to one") {
  std::mt19937_64 gen(13);
  std::vector<std::optional<double>> s(300);
  std::vector<int> y(300);
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = int(gen() % 2);
    s[i] = double(gen() % 500) / 100.0 + 0.7 * y[i];
  }
  const auto raw = youden_analysis(s, y);
  const auto scaled = youden_analysis(rescale_index(s, raw.cutoff), y);
  CHECK(scaled.cutoff == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(rescale_index(s, 0.0), DomainError);
}

TEST_CASE("absent scores are dropped with their labels") {
  const std::vector<std::optional<double>> s{std::nullopt, 0.2, 0.9, std::nullopt, 0.1};
  const std::vector<int> y{1, 0, 1, 0, 0};
  const auto r = youden_analysis(s, y);
  CHECK(r.positives == 1);
  CHECK(r.negatives == 2);
  CHECK(r.auc == 1.0);
}

TEST_CASE("NPV undefined when nothing is predicted negative") {
  const std::vector<double> s{1, 1, 1, 2};
  const std::vector<int> y{0, 1, 1, 1};
  const auto r = youden_analysis(s, y);
  if (r.cutoff == 1.0) CHECK(std::isnan(r.npv));
  CHECK(std::isfinite(r.ppv));
}

TEST_CASE("invalid ROC inputs") {
  const std::vector<double> s{1, 2};
  CHECK_THROWS_AS(mann_whitney_auc(s, std::vector<int>{1, 1}), DomainError);
  CHECK_THROWS_AS(mann_whitney_auc(s, std::vector<int>{1}), DomainError);
  CHECK_THROWS_AS(mann_whitney_auc(s, std::vector<int>{1, 2}), DomainError);
  CHECK_THROWS_AS(youden_analysis(std::vector<double>{}, std::vector<int>{}), DomainError);
}
