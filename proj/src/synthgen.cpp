#include "narrative/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "narrative/errors.hpp"
#include "narrative/rng.hpp"

namespace narrative {
namespace {

constexpr std::uint64_t kBetaStream = 0xFFFFFFFFFFFFFFFFULL;

// Dirichlet draw through log-gamma variates: for shape a, log G(a) equals
// log G(a + 1) + log(U) / a, which stays finite for very small a.
std::vector<double> sample_dirichlet(const std::vector<double>& params, Rng& rng) {
  std::vector<double> logs(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::gamma_distribution<double> gamma(params[i] + 1.0, 1.0);
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    logs[i] = std::log(gamma(rng)) + std::log(u) / params[i];
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  for (auto& x : logs) {
    x = std::exp(x - top);
    total += x;
  }
  for (auto& x : logs) x /= total;
  return logs;
}

std::size_t sample_categorical(const std::vector<double>& cumulative, Rng& rng) {
  const double u = uniform01(rng) * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

std::vector<double> cumulative_of(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  return c;
}

std::size_t code_width(std::size_t vocab_size) {
  std::size_t width = 1;
  std::size_t capacity = 26;
  while (capacity < vocab_size) {
    capacity *= 26;
    ++width;
  }
  return width;
}

}  // namespace

SynthSpec SynthSpec::stationary(std::size_t num_topics, std::size_t vocab_size,
                                std::size_t docs_per_period, std::size_t num_periods,
                                std::size_t doc_length, double alpha, double eta,
                                std::uint64_t seed) {
  SynthSpec s;
  s.num_topics = num_topics;
  s.vocab_size = vocab_size;
  s.docs_per_period = docs_per_period;
  s.num_periods = num_periods;
  s.min_doc_length = doc_length;
  s.max_doc_length = doc_length;
  s.alpha_profile.assign(num_periods, std::vector<double>(num_topics, alpha));
  s.eta = eta;
  s.seed = seed;
  return s;
}

void SynthSpec::validate() const {
  if (num_topics < 1) throw InvalidSpec("K must be >= 1");
  if (vocab_size < 1) throw InvalidSpec("V must be >= 1");
  if (docs_per_period < 1) throw InvalidSpec("docs_per_period must be >= 1");
  if (num_periods < 1) throw InvalidSpec("num_periods must be >= 1");
  if (min_doc_length < 1 || max_doc_length < min_doc_length)
    throw InvalidSpec("document length range must satisfy 1 <= min <= max");
  if (alpha_profile.size() != num_periods)
    throw InvalidSpec("alpha_profile needs one row per period");
  for (const auto& row : alpha_profile) {
    if (row.size() != num_topics) throw InvalidSpec("alpha_profile rows need K entries");
    for (double a : row)
      if (!(a > 0.0) || !std::isfinite(a)) throw InvalidSpec("Dirichlet parameters must be > 0");
  }
  if (planted_beta) {
    if (planted_beta->size() != num_topics) throw InvalidSpec("planted beta needs K rows");
    for (const auto& row : *planted_beta) {
      if (row.size() != vocab_size) throw InvalidSpec("planted beta rows need V entries");
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw InvalidSpec("planted beta entries must be non-negative");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw InvalidSpec("planted beta rows must sum to 1");
    }
  } else if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidSpec("eta must be > 0");
  }
}

std::string synth_term(std::size_t v, std::size_t vocab_size) {
  const std::size_t width = code_width(vocab_size);
  std::string code(width, 'a');
  for (std::size_t i = 0; i < width; ++i) {
    code[width - 1 - i] = static_cast<char>('a' + v % 26);
    v /= 26;
  }
  return "qz" + code;
}

std::optional<std::size_t> synth_term_index(const std::string& term, std::size_t vocab_size) {
  const std::size_t width = code_width(vocab_size);
  if (term.size() != width + 2 || term.compare(0, 2, "qz") != 0) return std::nullopt;
  std::size_t v = 0;
  for (std::size_t i = 2; i < term.size(); ++i) {
    if (term[i] < 'a' || term[i] > 'z') return std::nullopt;
    v = v * 26 + static_cast<std::size_t>(term[i] - 'a');
  }
  if (v >= vocab_size) return std::nullopt;
  return v;
}

SynthCorpus generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t K = spec.num_topics;
  const std::size_t V = spec.vocab_size;

  SynthCorpus out;
  SynthTruth& truth = out.truth;
  if (spec.planted_beta) {
    truth.beta = *spec.planted_beta;
  } else {
    const std::vector<double> eta(V, spec.eta);
    for (std::size_t k = 0; k < K; ++k) {
      Rng rng(substream_seed(spec.seed, kBetaStream, k));
      truth.beta.push_back(sample_dirichlet(eta, rng));
    }
  }
  std::vector<std::vector<double>> word_cdf;
  for (const auto& row : truth.beta) word_cdf.push_back(cumulative_of(row));

  std::vector<std::string> terms(V);
  for (std::size_t v = 0; v < V; ++v) terms[v] = synth_term(v, V);

  truth.alpha_profile = spec.alpha_profile;
  for (std::size_t t = 0; t < spec.num_periods; ++t) {
    const auto& a = spec.alpha_profile[t];
    const double total = std::accumulate(a.begin(), a.end(), 0.0);
    std::vector<double> mean(K);
    for (std::size_t k = 0; k < K; ++k) mean[k] = a[k] / total;
    truth.expected_prevalence.push_back(std::move(mean));
    truth.periods.push_back(spec.first_period + static_cast<std::int64_t>(t));
  }

  for (std::size_t t = 0; t < spec.num_periods; ++t) {
    const std::int64_t period = truth.periods[t];
    for (std::size_t i = 0; i < spec.docs_per_period; ++i) {
      Rng rng(substream_seed(spec.seed, t, i));
      std::size_t length = spec.min_doc_length;
      if (spec.max_doc_length > spec.min_doc_length) {
        const std::size_t span = spec.max_doc_length - spec.min_doc_length + 1;
        length += static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span));
      }
      std::vector<double> theta =
          K == 1 ? std::vector<double>{1.0} : sample_dirichlet(spec.alpha_profile[t], rng);
      const auto topic_cdf = cumulative_of(theta);

      RawDocument doc;
      doc.id = "synth-" + std::to_string(period) + "-" + std::to_string(i);
      doc.period = period;
      for (std::size_t n = 0; n < length; ++n) {
        const std::size_t z = sample_categorical(topic_cdf, rng);
        const std::size_t w = sample_categorical(word_cdf[z], rng);
        if (n > 0) doc.text += ' ';
        doc.text += terms[w];
      }
      out.documents.push_back(std::move(doc));
      truth.theta.push_back(std::move(theta));
    }
  }
  return out;
}

TrendShape parse_shape(const std::string& name) {
  if (name == "linear") return TrendShape::linear;
  if (name == "hump") return TrendShape::hump;
  throw InvalidSpec("unknown trend shape '" + name + "'");
}

SynthSpec inject_trend(const SynthSpec& spec, std::size_t topic, double start_share,
                       double end_share, TrendShape shape) {
  spec.validate();
  if (topic >= spec.num_topics) throw InvalidSpec("trend topic out of range");
  if (!(start_share > 0.0 && start_share < 1.0) || !(end_share > 0.0 && end_share < 1.0))
    throw InfeasibleShare("shares must lie strictly between 0 and 1");
  if (spec.num_topics == 1)
    throw InfeasibleShare("a single-topic model has no room for a share below 1");

  SynthSpec out = spec;
  const std::size_t T = spec.num_periods;
  for (std::size_t t = 0; t < T; ++t) {
    const double pos = T > 1 ? static_cast<double>(t) / static_cast<double>(T - 1) : 0.0;
    double share = start_share;
    if (shape == TrendShape::linear) {
      share = start_share + pos * (end_share - start_share);
    } else {
      share = start_share + (end_share - start_share) * (1.0 - std::abs(2.0 * pos - 1.0));
    }
    auto& row = out.alpha_profile[t];
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    const double others = total - row[topic];
    if (!(others > 0.0)) throw InfeasibleShare("other topics carry no concentration");
    const double scale = (1.0 - share) * total / others;
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = k == topic ? share * total : row[k] * scale;
    for (double a : row)
      if (!(a > 0.0)) throw InfeasibleShare("share leaves a non-positive Dirichlet parameter");
  }
  return out;
}

}  // namespace narrative
