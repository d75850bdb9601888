#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "narrative/trend.hpp"

namespace narrative {

struct IndicatorPoint {
  std::int64_t period = 0;
  double value = 0.0;
};

// External series such as annual citation counts of one contribution.
struct IndicatorSeries {
  std::string name;
  std::vector<IndicatorPoint> points;

  void validate() const;
};

// Plain (period, value) view used by the correlation routine so that either
// argument can be a topic or an indicator series.
struct TimeSeries {
  std::vector<std::int64_t> periods;
  std::vector<double> values;

  static TimeSeries from(const TopicSeries& s);
  static TimeSeries from(const IndicatorSeries& s);
};

struct LagPoint {
  std::int64_t lag = 0;
  double r = 0.0;
  std::size_t overlap = 0;
};

struct LagResult {
  std::size_t topic = 0;
  std::string indicator;
  std::vector<LagPoint> profile;  // ascending lag, valid lags only
  std::int64_t best_lag = 0;
  double max_corr = 0.0;
  std::optional<double> corr_at_zero;
  bool all_negative = false;
  std::vector<std::string> notes;
};

struct AlignConfig {
  std::int64_t max_lag = 10;
  std::size_t min_overlap = 10;
  std::int64_t near_window = 2;

  void validate() const;
};

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Correlates x_t with y_{t+lag} for lag in [-max_lag, max_lag]. Positive lag
// means x leads y. The best lag maximises signed r; ties go to the smallest
// |lag|, then to the more negative lag.
LagResult lag_correlation(const TimeSeries& x, const TimeSeries& y, std::int64_t max_lag,
                          std::size_t min_overlap);

LagResult lag_correlation(const TopicSeries& topic, const IndicatorSeries& indicator,
                          std::int64_t max_lag, std::size_t min_overlap);

inline constexpr const char* kPatternContemporaneous = "contemporaneous";
inline constexpr const char* kPatternNear = "near-contemporaneous";
inline constexpr const char* kPatternTopicLeads = "topic precedes citations";
inline constexpr const char* kPatternCitationsLead = "citations precede topic";
inline constexpr const char* kPatternWeak = "weak / misaligned";

std::string classify_pattern(const LagResult& result, std::int64_t near_window = 2);

}  // namespace narrative
