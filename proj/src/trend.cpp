#include "narrative/trend.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/normal.hpp>

#include "narrative/errors.hpp"

namespace narrative {

std::vector<double> TopicSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.value);
  return out;
}

std::vector<std::int64_t> TopicSeries::periods() const {
  std::vector<std::int64_t> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.period);
  return out;
}

void TopicSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].period <= points[i - 1].period)
      throw InputError("topic series periods must be strictly increasing");
    if (!(points[i].value >= 0.0 && points[i].value <= 1.0))
      throw InputError("topic series value outside [0, 1]");
    if (points[i].n_docs < 1) throw InputError("topic series point with no documents");
  }
}

Correction parse_correction(const std::string& name) {
  if (name == "none") return Correction::none;
  if (name == "bonferroni") return Correction::bonferroni;
  throw InvalidConfig("unknown multiplicity correction '" + name + "'");
}

std::string to_string(Correction c) { return c == Correction::none ? "none" : "bonferroni"; }

std::vector<TopicSeries> aggregate(const LdaModel& model, const std::vector<std::int64_t>& periods) {
  if (periods.size() != model.num_docs)
    throw InputError("period count does not match the number of modelled documents");
  const std::size_t K = model.num_topics();

  std::map<std::int64_t, std::vector<std::size_t>> by_period;
  for (std::size_t d = 0; d < periods.size(); ++d) by_period[periods[d]].push_back(d);

  std::vector<TopicSeries> series(K);
  for (std::size_t k = 0; k < K; ++k) series[k].topic = k;
  for (const auto& [period, docs] : by_period) {
    const double count = static_cast<double>(docs.size());
    for (std::size_t k = 0; k < K; ++k) {
      double sum = 0.0;
      for (std::size_t d : docs) sum += model.theta[d * K + k];
      series[k].points.push_back({period, sum / count, docs.size()});
    }
  }
  return series;
}

namespace {

int sign(double x) { return (x > 0.0) - (x < 0.0); }

// Sizes of groups of exactly equal values.
std::vector<std::size_t> tie_groups(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::size_t> groups;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i + 1;
    while (j < values.size() && values[j] == values[i]) ++j;
    if (j - i > 1) groups.push_back(j - i);
    i = j;
  }
  return groups;
}

}  // namespace

TrendResult mann_kendall(const TopicSeries& series) {
  const std::size_t n = series.size();
  if (n < 4) throw TooShort("Mann-Kendall needs at least 4 points, got " + std::to_string(n));
  const auto x = series.values();

  TrendResult r;
  r.n = n;
  r.small_sample = n < 10;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) r.S += sign(x[j] - x[i]);

  const double nd = static_cast<double>(n);
  const double pairs = nd * (nd - 1.0) / 2.0;
  double tie_pairs = 0.0;
  double tie_var = 0.0;
  for (std::size_t g : tie_groups(x)) {
    const double t = static_cast<double>(g);
    tie_pairs += t * (t - 1.0) / 2.0;
    tie_var += t * (t - 1.0) * (2.0 * t + 5.0);
  }
  r.var_S = (nd * (nd - 1.0) * (2.0 * nd + 5.0) - tie_var) / 18.0;

  // Periods never tie, so the tau-b denominator only corrects the values.
  const double denom = std::sqrt(pairs * (pairs - tie_pairs));
  if (denom == 0.0 || r.var_S <= 0.0) {
    r.tau = 0.0;
    r.z = 0.0;
    r.p_value = 1.0;
    return r;
  }
  r.tau = static_cast<double>(r.S) / denom;
  const double sd = std::sqrt(r.var_S);
  if (r.S > 0) {
    r.z = (static_cast<double>(r.S) - 1.0) / sd;
  } else if (r.S < 0) {
    r.z = (static_cast<double>(r.S) + 1.0) / sd;
  } else {
    r.z = 0.0;
  }
  r.p_value = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
  return r;
}

SenSlope sen_slope(const TopicSeries& series, double confidence, double var_S) {
  const std::size_t n = series.size();
  if (n < 4) throw TooShort("Sen's slope needs at least 4 points, got " + std::to_string(n));
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidConfig("confidence must lie in (0, 1)");
  if (!(var_S >= 0.0)) throw InvalidConfig("var_S must be non-negative");

  std::vector<double> slopes;
  slopes.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dt =
          static_cast<double>(series.points[j].period - series.points[i].period);
      slopes.push_back((series.points[j].value - series.points[i].value) / dt);
    }
  }
  std::sort(slopes.begin(), slopes.end());
  const std::size_t N = slopes.size();

  SenSlope out;
  out.slope = N % 2 == 1 ? slopes[N / 2] : (slopes[N / 2 - 1] + slopes[N / 2]) / 2.0;

  const boost::math::normal_distribution<double> standard;
  const double c = boost::math::quantile(standard, (1.0 + confidence) / 2.0) * std::sqrt(var_S);
  const double nd = static_cast<double>(N);
  // 1-indexed ranks, clamped into [1, N].
  const double lower_rank = std::floor((nd - c) / 2.0);
  const double upper_rank = std::ceil((nd + c) / 2.0) + 1.0;
  auto at_rank = [&](double rank) {
    const double clamped = std::clamp(rank, 1.0, nd);
    return slopes[static_cast<std::size_t>(clamped) - 1];
  };
  out.ci_low = at_rank(lower_rank);
  out.ci_high = at_rank(upper_rank);
  return out;
}

TrendResult trend_test(const TopicSeries& series, double confidence) {
  TrendResult r = mann_kendall(series);
  const SenSlope s = sen_slope(series, confidence, r.var_S);
  r.sen_slope = s.slope;
  r.ci_low = s.ci_low;
  r.ci_high = s.ci_high;
  return r;
}

double adjusted_p(double p, std::size_t tests, Correction correction) {
  if (correction == Correction::bonferroni) return std::min(1.0, p * static_cast<double>(tests));
  return p;
}

std::vector<std::size_t> detect_emergence(const std::vector<TopicTrend>& results, double alpha,
                                          Correction correction) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("significance level must lie in (0, 1)");
  std::vector<const TopicTrend*> flagged;
  for (const auto& r : results) {
    if (r.result.S > 0 && adjusted_p(r.result.p_value, results.size(), correction) <= alpha)
      flagged.push_back(&r);
  }
  std::stable_sort(flagged.begin(), flagged.end(), [](const TopicTrend* a, const TopicTrend* b) {
    if (a->result.p_value != b->result.p_value) return a->result.p_value < b->result.p_value;
    return a->result.sen_slope > b->result.sen_slope;
  });
  std::vector<std::size_t> out;
  out.reserve(flagged.size());
  for (const auto* r : flagged) out.push_back(r->topic);
  return out;
}

}  // namespace narrative
