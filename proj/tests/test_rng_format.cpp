#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "censorbias/format.hpp"
#include "censorbias/rng.hpp"

using namespace censorbias;

TEST_CASE("same handle, same draws; different stream, different draws") {
  Rng a({1963, 5}), b({1963, 5}), c({1963, 6}), d({1964, 5});
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("uniform draws stay strictly inside (0, 1) and average one half") {
  Rng rng({42, 0});
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  const double v = rng.uniform(0.2, 1.0);
  CHECK(v > 0.2);
  CHECK(v < 1.0);
}

TEST_CASE("index covers its range without leaving it") {
  Rng rng({3, 3});
  std::set<std::size_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto k = rng.index(7);
    REQUIRE(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("derived streams are distinct across trials and tags") {
  std::set<std::uint64_t> ids;
  for (std::uint64_t trial = 0; trial < 200; ++trial)
    for (std::uint64_t tag = 1; tag <= 5; ++tag) ids.insert(derive_stream(trial, tag));
  CHECK(ids.size() == 1000);
}

TEST_CASE("signif and display formats follow the table conventions") {
  CHECK(signif(0.0657, 2) == doctest::Approx(0.066));
  CHECK(format_signif(0.0657, 2) == "0.066");
  CHECK(format_fixed(signif(0.0657, 2), 2) == "0.07");
  CHECK(format_signif(0.996, 2) == "1");
  CHECK(format_signif(0.2999, 2) == "0.3");
  CHECK(format_signif(1.2345e-5, 3) == "1.23e-05");
  CHECK(format_signif(-0.93517, 3) == "-0.935");
  CHECK(format_rounded(50.0, 1) == "50");
  CHECK(format_rounded(12.34, 1) == "12.3");
  CHECK(format_shortest(0.1) == "0.1");
  CHECK(format_shortest(std::numeric_limits<double>::quiet_NaN()) == "NaN");
  CHECK(format_optional(std::nullopt).empty());
  CHECK(format_optional(2.5) == "2.5");
}
