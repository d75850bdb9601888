#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "narrative/corpus.hpp"

namespace narrative {

// Parameters of a synthetic LDA corpus. alpha_profile holds one K-vector of
// Dirichlet parameters per period; a constant profile is the stationary null.
struct SynthSpec {
  std::size_t num_topics = 5;
  std::size_t vocab_size = 200;
  std::size_t docs_per_period = 25;
  std::int64_t first_period = 1;
  std::size_t num_periods = 40;
  std::size_t min_doc_length = 100;
  std::size_t max_doc_length = 100;
  std::vector<std::vector<double>> alpha_profile;  // num_periods x K
  double eta = 0.05;
  // Explicit K x V topics; drawn from Dirichlet(eta) when absent.
  std::optional<std::vector<std::vector<double>>> planted_beta;
  std::uint64_t seed = 0;

  // Every period gets the same symmetric alpha.
  static SynthSpec stationary(std::size_t num_topics, std::size_t vocab_size,
                              std::size_t docs_per_period, std::size_t num_periods,
                              std::size_t doc_length, double alpha, double eta,
                              std::uint64_t seed);
  void validate() const;
};

struct SynthTruth {
  std::vector<std::vector<double>> beta;                 // K x V, synthetic term order
  std::vector<std::vector<double>> theta;                // per document
  std::vector<std::vector<double>> alpha_profile;        // per period
  std::vector<std::vector<double>> expected_prevalence;  // per period, alpha_t / sum(alpha_t)
  std::vector<std::int64_t> periods;                     // period of each profile row
};

struct SynthCorpus {
  std::vector<RawDocument> documents;
  SynthTruth truth;
};

// Term string for synthetic word v: "qz" followed by a fixed-width base-26
// letter code ("qzaa", "qzab", ...). The prefix keeps every term clear of
// the stopword list and the letters pass the alphabetic token rule.
std::string synth_term(std::size_t v, std::size_t vocab_size);
// Inverse of synth_term; returns nullopt for foreign strings.
std::optional<std::size_t> synth_term_index(const std::string& term, std::size_t vocab_size);

SynthCorpus generate(const SynthSpec& spec);

enum class TrendShape { linear, hump };

TrendShape parse_shape(const std::string& name);

// Reshapes alpha so topic k's Dirichlet mean moves from start_share to
// end_share (linear) or rises from start_share to a mid-series peak of
// end_share and returns (hump). Each period's total concentration is kept
// and the other topics shrink or grow proportionally.
SynthSpec inject_trend(const SynthSpec& spec, std::size_t topic, double start_share,
                       double end_share, TrendShape shape);

}  // namespace narrative
