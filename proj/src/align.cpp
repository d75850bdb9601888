#include "narrative/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_map>

#include "narrative/errors.hpp"

namespace narrative {

void IndicatorSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].period <= points[i - 1].period)
      throw InputError("indicator '" + name + "' periods must be strictly increasing");
    if (!(points[i].value >= 0.0) || !std::isfinite(points[i].value))
      throw InputError("indicator '" + name + "' has a negative or non-finite value");
  }
}

TimeSeries TimeSeries::from(const TopicSeries& s) { return {s.periods(), s.values()}; }

TimeSeries TimeSeries::from(const IndicatorSeries& s) {
  TimeSeries out;
  for (const auto& p : s.points) {
    out.periods.push_back(p.period);
    out.values.push_back(p.value);
  }
  return out;
}

void AlignConfig::validate() const {
  if (max_lag < 0) throw InvalidConfig("max_lag must be >= 0");
  if (min_overlap < 3) throw InvalidConfig("min_overlap must be >= 3");
  if (near_window < 0) throw InvalidConfig("near_window must be >= 0");
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (n < 2 || constant(x) || constant(y)) return std::nan("");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nan("");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

LagResult lag_correlation(const TimeSeries& x, const TimeSeries& y, std::int64_t max_lag,
                          std::size_t min_overlap) {
  if (max_lag < 0) throw InvalidConfig("max_lag must be >= 0");
  if (min_overlap < 3) throw InvalidConfig("min_overlap must be >= 3");

  std::unordered_map<std::int64_t, double> y_at;
  for (std::size_t i = 0; i < y.periods.size(); ++i) y_at.emplace(y.periods[i], y.values[i]);

  LagResult result;
  bool saw_zero_variance = false;
  std::vector<double> xs, ys;
  for (std::int64_t lag = -max_lag; lag <= max_lag; ++lag) {
    xs.clear();
    ys.clear();
    for (std::size_t i = 0; i < x.periods.size(); ++i) {
      auto it = y_at.find(x.periods[i] + lag);
      if (it == y_at.end()) continue;
      xs.push_back(x.values[i]);
      ys.push_back(it->second);
    }
    if (xs.size() < min_overlap) continue;
    const double r = pearson(xs, ys);
    if (std::isnan(r)) {
      saw_zero_variance = true;
      result.notes.push_back("lag " + std::to_string(lag) + " omitted: zero variance");
      continue;
    }
    result.profile.push_back({lag, r, xs.size()});
  }

  if (result.profile.empty()) {
    if (saw_zero_variance) throw ZeroVariance("every lag with enough overlap has a constant series");
    throw NoValidLag("no lag in [-" + std::to_string(max_lag) + ", " + std::to_string(max_lag) +
                     "] has " + std::to_string(min_overlap) + " overlapping periods");
  }

  const LagPoint* best = &result.profile.front();
  for (const auto& p : result.profile) {
    if (p.r > best->r) {
      best = &p;
    } else if (p.r == best->r) {
      const auto a = std::llabs(p.lag), b = std::llabs(best->lag);
      if (a < b || (a == b && p.lag < best->lag)) best = &p;
    }
    if (p.lag == 0) result.corr_at_zero = p.r;
  }
  result.best_lag = best->lag;
  result.max_corr = best->r;
  result.all_negative = best->r < 0.0;
  if (result.all_negative) result.notes.push_back("all profile correlations are negative");
  return result;
}

LagResult lag_correlation(const TopicSeries& topic, const IndicatorSeries& indicator,
                          std::int64_t max_lag, std::size_t min_overlap) {
  LagResult r = lag_correlation(TimeSeries::from(topic), TimeSeries::from(indicator), max_lag,
                                min_overlap);
  r.topic = topic.topic;
  r.indicator = indicator.name;
  return r;
}

std::string classify_pattern(const LagResult& result, std::int64_t near_window) {
  if (result.max_corr < 0.3) return kPatternWeak;
  if (result.best_lag == 0) return kPatternContemporaneous;
  if (std::llabs(result.best_lag) <= near_window) return kPatternNear;
  return result.best_lag > 0 ? kPatternTopicLeads : kPatternCitationsLead;
}

}  // namespace narrative
