#include <doctest.h>

#include <cmath>
#include <numeric>

#include "narrative/corpus.hpp"
#include "narrative/errors.hpp"
#include "narrative/synthgen.hpp"

using namespace narrative;

namespace {

PreprocessConfig no_pruning() {
  PreprocessConfig c;
  c.min_df = 1;
  c.max_df_fraction = 1.0;
  return c;
}

}  // namespace

TEST_CASE("synthetic terms round-trip and survive tokenization") {
  for (std::size_t V : {1u, 26u, 27u, 200u, 1000u}) {
    for (std::size_t v = 0; v < V; ++v) {
      const auto term = synth_term(v, V);
      REQUIRE(synth_term_index(term, V) == v);
      const auto tokens = tokenize(term, PreprocessConfig::with_default_stopwords());
      REQUIRE(tokens == std::vector<std::string>{term});
    }
  }
  CHECK_FALSE(synth_term_index("apple", 200).has_value());
  CHECK_FALSE(synth_term_index(synth_term(199, 200), 100).has_value());
}

TEST_CASE("single-topic generation puts all mass on topic zero") {
  const auto spec = SynthSpec::stationary(1, 30, 10, 3, 20, 1.0, 0.1, 7);
  const auto out = generate(spec);
  CHECK(out.documents.size() == 30);
  for (const auto& row : out.truth.theta) CHECK(row == std::vector<double>{1.0});
  CHECK(out.truth.expected_prevalence[0] == std::vector<double>{1.0});
}

TEST_CASE("document proportions have the Dirichlet mean") {
  SynthSpec spec = SynthSpec::stationary(4, 50, 4000, 1, 5, 1.0, 0.1, 11);
  spec.alpha_profile[0] = {0.5, 1.0, 1.5, 2.0};
  const auto out = generate(spec);
  const double a0 = 5.0;
  const double n = static_cast<double>(out.truth.theta.size());
  for (std::size_t k = 0; k < 4; ++k) {
    const double mean_k = spec.alpha_profile[0][k] / a0;
    const double sd = std::sqrt(mean_k * (1.0 - mean_k) / (a0 + 1.0));
    double sum = 0.0;
    for (const auto& row : out.truth.theta) sum += row[k];
    CHECK(std::abs(sum / n - mean_k) <= 3.0 * sd / std::sqrt(n));
  }
  for (const auto& row : out.truth.theta) {
    CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-12);
  }
  for (const auto& row : out.truth.beta) {
    CHECK(row.size() == 50);
    CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("linear trend injection follows the ramp and keeps concentration") {
  const auto base = SynthSpec::stationary(5, 100, 10, 40, 50, 1.0, 0.05, 3);
  const auto ramp = inject_trend(base, 2, 0.05, 0.30, TrendShape::linear);
  for (std::size_t t = 0; t < 40; ++t) {
    const auto& row = ramp.alpha_profile[t];
    CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(5.0).epsilon(1e-12));
    const double expected = 0.05 + static_cast<double>(t) / 39.0 * 0.25;
    CHECK(row[2] / 5.0 == doctest::Approx(expected).epsilon(1e-12));
    // Remaining topics keep equal shares among themselves.
    CHECK(row[0] == doctest::Approx(row[4]).epsilon(1e-12));
  }
  CHECK(ramp.alpha_profile[19][2] / 5.0 == doctest::Approx(0.05 + 19.0 / 39.0 * 0.25).epsilon(1e-12));

  const auto out = generate(ramp);
  CHECK(out.truth.expected_prevalence[0][2] == doctest::Approx(0.05));
  CHECK(out.truth.expected_prevalence[39][2] == doctest::Approx(0.30));
}

TEST_CASE("realised prevalence tracks the planted ramp") {
  auto spec = SynthSpec::stationary(3, 60, 400, 5, 10, 1.0, 0.1, 21);
  spec = inject_trend(spec, 0, 0.1, 0.7, TrendShape::linear);
  const auto out = generate(spec);
  for (std::size_t t = 0; t < 5; ++t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 400; ++i) sum += out.truth.theta[t * 400 + i][0];
    const double m = out.truth.expected_prevalence[t][0];
    const double sd = std::sqrt(m * (1.0 - m) / 4.0);
    CHECK(std::abs(sum / 400.0 - m) <= 3.0 * sd / 20.0);
  }
}

TEST_CASE("equal shares leave the profile alone and humps peak mid-series") {
  const auto base = SynthSpec::stationary(4, 40, 5, 21, 20, 0.5, 0.1, 1);
  const auto same = inject_trend(base, 1, 0.25, 0.25, TrendShape::linear);
  for (std::size_t t = 0; t < 21; ++t)
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(same.alpha_profile[t][k] == doctest::Approx(0.5).epsilon(1e-12));

  const auto hump = inject_trend(base, 1, 0.1, 0.6, TrendShape::hump);
  CHECK(hump.alpha_profile[10][1] / 2.0 == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(hump.alpha_profile[0][1] / 2.0 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(hump.alpha_profile[20][1] / 2.0 == doctest::Approx(0.1).epsilon(1e-12));
  for (std::size_t t = 0; t < 21; ++t) CHECK(hump.alpha_profile[t][1] <= hump.alpha_profile[10][1]);
}

TEST_CASE("infeasible trends are rejected") {
  const auto base = SynthSpec::stationary(4, 40, 5, 10, 20, 0.5, 0.1, 1);
  CHECK_THROWS_AS(inject_trend(base, 0, 0.0, 0.5, TrendShape::linear), InfeasibleShare);
  CHECK_THROWS_AS(inject_trend(base, 0, 0.2, 1.0, TrendShape::linear), InfeasibleShare);
  const auto single = SynthSpec::stationary(1, 40, 5, 10, 20, 0.5, 0.1, 1);
  CHECK_THROWS_AS(inject_trend(single, 0, 0.2, 0.5, TrendShape::linear), InfeasibleShare);
  CHECK_THROWS_AS(inject_trend(base, 4, 0.2, 0.5, TrendShape::linear), InvalidSpec);
  CHECK_THROWS_AS(parse_shape("sine"), InvalidSpec);
  auto bad = base;
  bad.alpha_profile.pop_back();
  CHECK_THROWS_AS(generate(bad), InvalidSpec);
}

TEST_CASE("generated documents rebuild into the planted counts") {
  auto spec = SynthSpec::stationary(3, 40, 6, 4, 1, 0.8, 0.2, 5);
  spec.min_doc_length = 30;
  spec.max_doc_length = 60;
  const auto out = generate(spec);
  const auto corpus = build_corpus(out.documents, no_pruning());
  CHECK(corpus.dropped.empty());
  REQUIRE(corpus.matrix.num_docs() == 24);
  std::size_t expected_tokens = 0;
  for (std::size_t d = 0; d < out.documents.size(); ++d) {
    std::size_t words = 1;
    for (char c : out.documents[d].text) words += c == ' ';
    CHECK(words >= 30);
    CHECK(words <= 60);
    CHECK(corpus.matrix.doc_length(d) == words);
    expected_tokens += words;
  }
  CHECK(corpus.matrix.total_tokens() == expected_tokens);
  for (std::size_t v = 0; v < corpus.vocabulary.size(); ++v)
    CHECK(synth_term_index(corpus.vocabulary.term(static_cast<TermId>(v)), 40).has_value());
  CHECK(out.documents[0].id == "synth-1-0");
  CHECK(out.documents.back().period == 4);
}

TEST_CASE("generation is a pure function of the spec") {
  const auto spec = SynthSpec::stationary(4, 80, 8, 6, 40, 0.3, 0.05, 99);
  const auto a = generate(spec);
  const auto b = generate(spec);
  REQUIRE(a.documents.size() == b.documents.size());
  for (std::size_t i = 0; i < a.documents.size(); ++i) CHECK(a.documents[i].text == b.documents[i].text);
  CHECK(a.truth.beta == b.truth.beta);
  CHECK(a.truth.theta == b.truth.theta);
  auto other = spec;
  other.seed = 100;
  CHECK(generate(other).documents[0].text != a.documents[0].text);

  // Growing the corpus does not disturb the documents already present.
  auto longer = spec;
  longer.num_periods = 7;
  longer.alpha_profile.push_back(longer.alpha_profile.back());
  const auto c = generate(longer);
  for (std::size_t i = 0; i < a.documents.size(); ++i) CHECK(c.documents[i].text == a.documents[i].text);
}
