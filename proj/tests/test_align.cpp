#include <doctest.h>

#include <cmath>
#include <random>

#include "narrative/align.hpp"
#include "narrative/errors.hpp"
#include "oracles.hpp"

using namespace narrative;

namespace {

TimeSeries series(std::int64_t first, const std::vector<double>& values) {
  TimeSeries s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.periods.push_back(first + static_cast<std::int64_t>(i));
    s.values.push_back(values[i]);
  }
  return s;
}

std::vector<double> noise(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

LagResult with_best(std::int64_t lag, double r) {
  LagResult res;
  res.best_lag = lag;
  res.max_corr = r;
  return res;
}

}  // namespace

TEST_CASE("pearson basics") {
  CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(std::isnan(pearson({1, 1, 1}, {1, 2, 3})));
}

TEST_CASE("a series correlates perfectly with itself at lag zero") {
  std::mt19937_64 rng(1);
  const auto x = series(1970, noise(rng, 40));
  const auto r = lag_correlation(x, x, 10, 10);
  CHECK(r.best_lag == 0);
  CHECK(r.max_corr == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.corr_at_zero.has_value());
  CHECK(*r.corr_at_zero == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a shifted copy is recovered at the shift") {
  std::mt19937_64 rng(2);
  const auto v = noise(rng, 40);
  const auto x = series(1970, v);
  const auto y = series(1973, v);  // y_{t+3} = x_t
  const auto r = lag_correlation(x, y, 10, 10);
  CHECK(r.best_lag == 3);
  CHECK(r.max_corr == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(classify_pattern(r) == kPatternTopicLeads);
  const auto back = lag_correlation(y, x, 10, 10);
  CHECK(back.best_lag == -3);
  CHECK(classify_pattern(back) == kPatternCitationsLead);
}

TEST_CASE("lag profile matches direct pairing") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    // Gappy period axes exercise the pairing by period value.
    TimeSeries x, y;
    std::int64_t p = 1960;
    for (int i = 0; i < 45; ++i) {
      p += 1 + static_cast<std::int64_t>(rng() % 2 == 0 && rng() % 5 == 0);
      x.periods.push_back(p);
    }
    x.values = noise(rng, x.periods.size());
    for (std::int64_t q = 1962; q < 2030; ++q)
      if (rng() % 6 != 0) y.periods.push_back(q);
    y.values = noise(rng, y.periods.size());

    const auto r = lag_correlation(x, y, 10, 10);
    std::size_t idx = 0;
    for (std::int64_t lag = -10; lag <= 10; ++lag) {
      const auto [expected, overlap] =
          oracle::lagged_pearson(x.periods, x.values, y.periods, y.values, lag);
      if (overlap < 10) continue;
      REQUIRE(idx < r.profile.size());
      CHECK(r.profile[idx].lag == lag);
      CHECK(r.profile[idx].overlap == overlap);
      CHECK(std::abs(r.profile[idx].r - expected) <= 1e-12);
      CHECK(std::abs(r.profile[idx].r) <= 1.0);
      ++idx;
    }
    CHECK(idx == r.profile.size());
  }
}

TEST_CASE("swapping arguments mirrors the profile") {
  std::mt19937_64 rng(4);
  const auto x = series(1970, noise(rng, 35));
  const auto y = series(1968, noise(rng, 38));
  const auto a = lag_correlation(x, y, 8, 10);
  const auto b = lag_correlation(y, x, 8, 10);
  REQUIRE(a.profile.size() == b.profile.size());
  const auto n = a.profile.size();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(a.profile[i].lag == -b.profile[n - 1 - i].lag);
    CHECK(a.profile[i].r == doctest::Approx(b.profile[n - 1 - i].r).epsilon(1e-12));
  }
}

TEST_CASE("positive affine maps leave the profile unchanged") {
  std::mt19937_64 rng(5);
  const auto x = series(1970, noise(rng, 40));
  auto y = series(1970, noise(rng, 40));
  const auto base = lag_correlation(x, y, 10, 10);
  auto x2 = x;
  for (auto& v : x2.values) v = 3.5 * v + 100.0;
  auto y2 = y;
  for (auto& v : y2.values) v = 0.01 * v - 2.0;
  const auto moved = lag_correlation(x2, y2, 10, 10);
  REQUIRE(base.profile.size() == moved.profile.size());
  for (std::size_t i = 0; i < base.profile.size(); ++i)
    CHECK(base.profile[i].r == doctest::Approx(moved.profile[i].r).epsilon(1e-9));
  CHECK(base.best_lag == moved.best_lag);
}

TEST_CASE("ties prefer the smallest absolute lag, then the negative one") {
  // A period-2 alternating series correlates +1 with itself at every even lag.
  std::vector<double> v;
  for (int i = 0; i < 30; ++i) v.push_back(i % 2 == 0 ? 1.0 : -1.0);
  const auto x = series(1, v);
  CHECK(lag_correlation(x, x, 6, 10).best_lag == 0);

  // Shifting y by one makes lags -1 and +1 both perfect.
  const auto y = series(2, v);
  const auto r = lag_correlation(x, y, 6, 10);
  CHECK(r.max_corr == doctest::Approx(1.0));
  CHECK(r.best_lag == -1);
}

TEST_CASE("lags below the overlap threshold are omitted") {
  std::mt19937_64 rng(6);
  const auto x = series(1, noise(rng, 12));
  const auto y = series(1, noise(rng, 12));
  const auto r = lag_correlation(x, y, 5, 10);
  for (const auto& p : r.profile) {
    CHECK(p.overlap >= 10);
    CHECK(std::llabs(p.lag) <= 2);
  }
  CHECK(r.profile.size() == 5);
}

TEST_CASE("degenerate inputs raise") {
  std::mt19937_64 rng(7);
  const auto shortx = series(1, noise(rng, 5));
  CHECK_THROWS_AS(lag_correlation(shortx, shortx, 3, 10), NoValidLag);
  const auto flat = series(1, std::vector<double>(20, 0.3));
  const auto y = series(1, noise(rng, 20));
  CHECK_THROWS_AS(lag_correlation(flat, y, 3, 10), ZeroVariance);
  CHECK_THROWS_AS(lag_correlation(y, y, -1, 10), InvalidConfig);
}

TEST_CASE("classify_pattern") {
  CHECK(classify_pattern(with_best(0, 0.9)) == kPatternContemporaneous);
  CHECK(classify_pattern(with_best(9, 0.587)) == kPatternTopicLeads);
  CHECK(classify_pattern(with_best(10, -0.636)) == kPatternWeak);
  CHECK(classify_pattern(with_best(2, 0.5)) == kPatternNear);
  CHECK(classify_pattern(with_best(-2, 0.5)) == kPatternNear);
  CHECK(classify_pattern(with_best(-3, 0.5)) == kPatternCitationsLead);
  CHECK(classify_pattern(with_best(0, 0.29)) == kPatternWeak);
  CHECK(classify_pattern(with_best(2, 0.5), 1) == kPatternTopicLeads);
}

TEST_CASE("indicator validation") {
  IndicatorSeries s{"x", {{2000, 1.0}, {2000, 2.0}}};
  CHECK_THROWS_AS(s.validate(), InputError);
  IndicatorSeries neg{"y", {{2000, -1.0}}};
  CHECK_THROWS_AS(neg.validate(), InputError);
}
