#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "narrative/lda.hpp"

namespace narrative {

struct SeriesPoint {
  std::int64_t period = 0;
  double value = 0.0;
  std::size_t n_docs = 0;
};

// Mean posterior topic proportion per period. Periods without documents are
// absent rather than zero-filled.
struct TopicSeries {
  std::size_t topic = 0;
  std::vector<SeriesPoint> points;

  std::size_t size() const { return points.size(); }
  std::vector<double> values() const;
  std::vector<std::int64_t> periods() const;
  void validate() const;
};

struct TrendResult {
  std::int64_t S = 0;
  double tau = 0.0;  // Kendall tau-b
  double var_S = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  double sen_slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  // Normal approximation is rough below 10 points.
  bool small_sample = false;
};

struct SenSlope {
  double slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

enum class Correction { none, bonferroni };

Correction parse_correction(const std::string& name);
std::string to_string(Correction c);

// periods[d] is the period of row d of the model's theta.
std::vector<TopicSeries> aggregate(const LdaModel& model, const std::vector<std::int64_t>& periods);

// Fills S, tau, var_S, z, p_value, n. Requires n >= 4. A fully tied series
// gives tau = 0, z = 0, p = 1.
TrendResult mann_kendall(const TopicSeries& series);

// Median pairwise slope over actual period gaps, with the rank-based
// confidence interval derived from var_S.
SenSlope sen_slope(const TopicSeries& series, double confidence, double var_S);

// mann_kendall + sen_slope.
TrendResult trend_test(const TopicSeries& series, double confidence = 0.95);

struct TopicTrend {
  std::size_t topic = 0;
  TrendResult result;
};

// Topics with S > 0 and corrected p <= alpha, ordered by ascending p then
// descending Sen slope.
std::vector<std::size_t> detect_emergence(const std::vector<TopicTrend>& results, double alpha,
                                          Correction correction);

double adjusted_p(double p, std::size_t tests, Correction correction);

}  // namespace narrative
