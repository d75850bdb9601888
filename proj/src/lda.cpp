#include "narrative/lda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "narrative/errors.hpp"

namespace narrative {

LdaConfig LdaConfig::defaults(std::size_t num_topics, std::uint64_t seed) {
  LdaConfig c;
  c.num_topics = num_topics;
  c.alpha = num_topics > 0 ? 50.0 / static_cast<double>(num_topics) : 0.0;
  c.seed = seed;
  return c;
}

void LdaConfig::validate() const {
  if (num_topics < 1) throw InvalidConfig("K must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidConfig("alpha must be > 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidConfig("eta must be > 0");
  if (samples < 1) throw InvalidConfig("samples must be >= 1");
  if (thin < 1) throw InvalidConfig("thin must be >= 1");
}

GibbsState::GibbsState(const DocTermMatrix& matrix, std::size_t num_topics, Rng& rng)
    : GibbsState(matrix, num_topics, [&] {
        std::vector<std::vector<std::uint32_t>> z(matrix.num_docs());
        for (std::size_t d = 0; d < matrix.num_docs(); ++d) {
          z[d].resize(matrix.doc_length(d));
          for (auto& topic : z[d]) {
            topic = static_cast<std::uint32_t>(uniform01(rng) * static_cast<double>(num_topics));
          }
        }
        return z;
      }()) {}

GibbsState::GibbsState(const DocTermMatrix& matrix, std::size_t num_topics,
                       std::vector<std::vector<std::uint32_t>> z)
    : num_topics_(num_topics), vocab_size_(matrix.vocab_size()), z_(std::move(z)) {
  if (num_topics_ < 1) throw InvalidConfig("K must be >= 1");
  if (z_.size() != matrix.num_docs()) throw InputError("assignment count != document count");
  n_dk_.assign(matrix.num_docs() * num_topics_, 0);
  n_wk_.assign(vocab_size_ * num_topics_, 0);
  n_k_.assign(num_topics_, 0);
  for (std::size_t d = 0; d < z_.size(); ++d) {
    const auto& tokens = matrix.sampling_order(d);
    if (z_[d].size() != tokens.size()) throw InputError("assignment length != document length");
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::uint32_t k = z_[d][i];
      if (k >= num_topics_) throw InputError("topic assignment out of range");
      ++n_dk_[d * num_topics_ + k];
      ++n_wk_[tokens[i] * num_topics_ + k];
      ++n_k_[k];
    }
  }
}

void GibbsState::check_invariants(const DocTermMatrix& matrix) const {
  const std::size_t K = num_topics_;
  std::vector<std::uint64_t> word_sum(K, 0);
  std::uint64_t grand = 0;
  for (std::size_t d = 0; d < z_.size(); ++d) {
    std::uint64_t row = 0;
    std::vector<std::uint32_t> recount(K, 0);
    for (std::uint32_t k : z_[d]) ++recount[k];
    for (std::size_t k = 0; k < K; ++k) {
      if (recount[k] != n_dk_[d * K + k])
        throw InvariantViolation("n_dk disagrees with assignments in document " + std::to_string(d));
      row += n_dk_[d * K + k];
    }
    if (row != matrix.doc_length(d))
      throw InvariantViolation("sum_k n_dk != N_d for document " + std::to_string(d));
  }
  for (std::size_t v = 0; v < vocab_size_; ++v)
    for (std::size_t k = 0; k < K; ++k) word_sum[k] += n_wk_[v * K + k];
  for (std::size_t k = 0; k < K; ++k) {
    if (word_sum[k] != n_k_[k])
      throw InvariantViolation("sum_v n_kv != n_k for topic " + std::to_string(k));
    grand += n_k_[k];
  }
  if (grand != matrix.total_tokens()) throw InvariantViolation("sum_k n_k != total tokens");
}

void gibbs_sweep(GibbsState& state, const DocTermMatrix& matrix, const LdaConfig& config,
                 Rng& rng) {
  const std::size_t K = state.num_topics_;
  const double alpha = config.alpha;
  const double eta = config.eta;
  const double v_eta = static_cast<double>(state.vocab_size_) * eta;
  std::vector<double> cumulative(K);

  for (std::size_t d = 0; d < state.z_.size(); ++d) {
    const auto& tokens = matrix.sampling_order(d);
    auto& z = state.z_[d];
    std::uint32_t* n_d = state.n_dk_.data() + d * K;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      std::uint32_t* n_w = state.n_wk_.data() + tokens[i] * K;
      const std::uint32_t old_topic = z[i];
      --n_d[old_topic];
      --n_w[old_topic];
      --state.n_k_[old_topic];

      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        total += (n_d[k] + alpha) * (n_w[k] + eta) / (static_cast<double>(state.n_k_[k]) + v_eta);
        cumulative[k] = total;
      }
      const double u = uniform01(rng) * total;
      std::uint32_t new_topic = 0;
      while (new_topic + 1 < K && cumulative[new_topic] <= u) ++new_topic;

      z[i] = new_topic;
      ++n_d[new_topic];
      ++n_w[new_topic];
      ++state.n_k_[new_topic];
    }
  }
}

void LdaModel::check_invariants(double tol) const {
  const std::size_t K = num_topics();
  auto check_rows = [tol](const std::vector<double>& m, std::size_t rows, std::size_t cols,
                          const char* name) {
    if (m.size() != rows * cols) throw InvariantViolation(std::string(name) + " has wrong shape");
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        const double x = m[r * cols + c];
        if (!(x > 0.0)) throw InvariantViolation(std::string(name) + " has a non-positive entry");
        sum += x;
      }
      if (std::abs(sum - 1.0) > tol)
        throw InvariantViolation(std::string(name) + " row " + std::to_string(r) +
                                 " does not sum to 1");
    }
  };
  check_rows(theta, num_docs, K, "theta");
  check_rows(beta, K, vocab_size, "beta");
}

LdaModel fit(const DocTermMatrix& matrix, const LdaConfig& config) {
  config.validate();
  if (matrix.num_docs() == 0) throw InputError("cannot fit an empty matrix");

  const std::size_t K = config.num_topics;
  const std::size_t D = matrix.num_docs();
  const std::size_t V = matrix.vocab_size();
  Rng rng(config.seed);
  GibbsState state(matrix, K, rng);

  for (std::size_t s = 0; s < config.burn_in; ++s) gibbs_sweep(state, matrix, config, rng);

  LdaModel model;
  model.config = config;
  model.num_docs = D;
  model.vocab_size = V;
  model.theta.assign(D * K, 0.0);
  model.beta.assign(K * V, 0.0);

  const double k_alpha = static_cast<double>(K) * config.alpha;
  const double v_eta = static_cast<double>(V) * config.eta;
  for (std::size_t s = 0; s < config.samples; ++s) {
    for (std::size_t t = 0; t < config.thin; ++t) gibbs_sweep(state, matrix, config, rng);
    for (std::size_t d = 0; d < D; ++d) {
      const double denom = static_cast<double>(matrix.doc_length(d)) + k_alpha;
      for (std::size_t k = 0; k < K; ++k)
        model.theta[d * K + k] += (state.doc_topic(d, k) + config.alpha) / denom;
    }
    for (std::size_t k = 0; k < K; ++k) {
      const double denom = static_cast<double>(state.topic_total(k)) + v_eta;
      for (std::size_t v = 0; v < V; ++v)
        model.beta[k * V + v] += (state.topic_word(k, v) + config.eta) / denom;
    }
  }
  const double inv = 1.0 / static_cast<double>(config.samples);
  for (auto& x : model.theta) x *= inv;
  for (auto& x : model.beta) x *= inv;
  model.sweeps = config.total_sweeps();
  model.check_invariants();
  return model;
}

std::vector<std::pair<TermId, double>> top_word_ids(const LdaModel& model, std::size_t topic,
                                                    std::size_t n) {
  if (topic >= model.num_topics())
    throw IndexOutOfRange("topic " + std::to_string(topic) + " >= K");
  if (n < 1 || n > model.vocab_size)
    throw IndexOutOfRange("n must lie in [1, V]");
  const auto row = model.beta_row(topic);
  std::vector<TermId> order(row.size());
  std::iota(order.begin(), order.end(), TermId{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](TermId a, TermId b) {
                      if (row[a] != row[b]) return row[a] > row[b];
                      return a < b;
                    });
  std::vector<std::pair<TermId, double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(order[i], row[order[i]]);
  return out;
}

std::vector<std::pair<std::string, double>> top_words(const LdaModel& model,
                                                      const Vocabulary& vocab, std::size_t topic,
                                                      std::size_t n) {
  if (vocab.size() != model.vocab_size)
    throw InputError("vocabulary size does not match the model");
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [id, p] : top_word_ids(model, topic, n)) out.emplace_back(vocab.term(id), p);
  return out;
}

}  // namespace narrative
