#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "narrative/corpus.hpp"
#include "narrative/rng.hpp"

namespace narrative {

struct LdaConfig {
  std::size_t num_topics = 10;
  double alpha = 5.0;   // symmetric Dirichlet on document-topic proportions
  double eta = 0.01;    // symmetric Dirichlet on topic-word distributions
  std::size_t burn_in = 1000;
  std::size_t samples = 20;
  std::size_t thin = 10;
  std::uint64_t seed = 0;

  // alpha = 50 / K, eta = 0.01, 1000 burn-in sweeps, 20 samples 10 sweeps apart.
  static LdaConfig defaults(std::size_t num_topics, std::uint64_t seed = 0);
  void validate() const;
  std::size_t total_sweeps() const { return burn_in + samples * thin; }
};

// Collapsed Gibbs state: one topic per token plus the three count tables.
class GibbsState {
 public:
  // Random uniform initial assignment.
  GibbsState(const DocTermMatrix& matrix, std::size_t num_topics, Rng& rng);
  // Explicit assignment; z[d][i] is the topic of token i of document d.
  GibbsState(const DocTermMatrix& matrix, std::size_t num_topics,
             std::vector<std::vector<std::uint32_t>> z);

  std::size_t num_topics() const { return num_topics_; }
  std::size_t num_docs() const { return z_.size(); }
  std::size_t vocab_size() const { return vocab_size_; }

  const std::vector<std::vector<std::uint32_t>>& assignments() const { return z_; }
  std::uint32_t doc_topic(std::size_t d, std::size_t k) const { return n_dk_[d * num_topics_ + k]; }
  std::uint32_t topic_word(std::size_t k, std::size_t v) const { return n_wk_[v * num_topics_ + k]; }
  std::uint64_t topic_total(std::size_t k) const { return n_k_[k]; }

  // Throws InvariantViolation unless all three count identities hold and
  // the tables agree with the assignments.
  void check_invariants(const DocTermMatrix& matrix) const;

 private:
  friend void gibbs_sweep(GibbsState&, const DocTermMatrix&, const LdaConfig&, Rng&);

  std::size_t num_topics_ = 0;
  std::size_t vocab_size_ = 0;
  std::vector<std::vector<std::uint32_t>> z_;
  std::vector<std::uint32_t> n_dk_;  // D x K
  std::vector<std::uint32_t> n_wk_;  // V x K (word-major for the sampling loop)
  std::vector<std::uint64_t> n_k_;   // K
};

// Resamples every token once in (document, token) order from
//   p(z = k) ∝ (n_dk + alpha) (n_kv + eta) / (n_k + V eta)
// with the token's own assignment removed from the counts.
void gibbs_sweep(GibbsState& state, const DocTermMatrix& matrix, const LdaConfig& config, Rng& rng);

struct LdaModel {
  LdaConfig config;
  std::size_t num_docs = 0;
  std::size_t vocab_size = 0;
  std::vector<double> theta;  // D x K, row-major, posterior mean
  std::vector<double> beta;   // K x V, row-major, posterior mean
  std::size_t sweeps = 0;
  std::uint64_t vocab_fingerprint = 0;

  std::size_t num_topics() const { return config.num_topics; }
  std::span<const double> theta_row(std::size_t d) const {
    return {theta.data() + d * num_topics(), num_topics()};
  }
  std::span<const double> beta_row(std::size_t k) const {
    return {beta.data() + k * vocab_size, vocab_size};
  }
  // Rows strictly positive and summing to 1 within tol.
  void check_invariants(double tol = 1e-12) const;
};

// Single chain: burn_in sweeps, then `samples` snapshots spaced `thin`
// sweeps apart; theta/beta are averages of the smoothed snapshot estimates.
LdaModel fit(const DocTermMatrix& matrix, const LdaConfig& config);

std::vector<std::pair<TermId, double>> top_word_ids(const LdaModel& model, std::size_t topic,
                                                    std::size_t n);

// n highest-probability terms of a topic; ties go to the lower term id.
std::vector<std::pair<std::string, double>> top_words(const LdaModel& model,
                                                      const Vocabulary& vocab, std::size_t topic,
                                                      std::size_t n);

}  // namespace narrative
