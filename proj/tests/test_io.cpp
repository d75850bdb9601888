#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "narrative/errors.hpp"
#include "narrative/io.hpp"

using namespace narrative;
using namespace narrative::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "narrative_test_io";
  fs::create_directories(dir);
  return dir / name;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("document ids survive encoding") {
  for (const std::string id : {"plain", "with space", "tab\there", "100%", "new\nline", "ünï"}) {
    const auto enc = encode_id(id);
    CHECK(enc.find(' ') == std::string::npos);
    CHECK(enc.find('\n') == std::string::npos);
    CHECK(decode_id(enc) == id);
  }
  CHECK(encode_id("a b") == "a%20b");
  CHECK_THROWS_AS(decode_id("bad%2"), InputError);
  CHECK_THROWS_AS(decode_id("bad%zz"), InputError);
}

TEST_CASE("matrix and vocabulary round-trip") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t V = 1 + rng() % 30;
    std::vector<Document> docs;
    const std::size_t D = 1 + rng() % 15;
    for (std::size_t d = 0; d < D; ++d) {
      Document doc{"doc " + std::to_string(d), 1990 + static_cast<std::int64_t>(rng() % 20), {}};
      const std::size_t n = 1 + rng() % 25;
      for (std::size_t i = 0; i < n; ++i) doc.tokens.push_back(static_cast<TermId>(rng() % V));
      docs.push_back(std::move(doc));
    }
    const DocTermMatrix m(docs, V);
    const auto back = parse_matrix(matrix_to_text(m));
    REQUIRE(back.num_docs() == m.num_docs());
    CHECK(back.vocab_size() == V);
    for (std::size_t d = 0; d < D; ++d) {
      CHECK(back.doc(d).id == m.doc(d).id);
      CHECK(back.doc(d).period == m.doc(d).period);
      CHECK(back.row(d) == m.row(d));
      CHECK(back.sampling_order(d) == m.sampling_order(d));
    }
    CHECK(matrix_to_text(back) == matrix_to_text(m));
  }

  const Vocabulary vocab({"topic", "model", "économie"});
  const auto path = scratch("vocab.txt");
  write_atomic(path, vocabulary_to_text(vocab));
  const auto read = read_vocabulary(path);
  CHECK(read.terms() == vocab.terms());
  CHECK(read.fingerprint() == vocab.fingerprint());
}

TEST_CASE("malformed matrices are rejected") {
  CHECK_THROWS_AS(parse_matrix(""), InputError);
  CHECK_THROWS_AS(parse_matrix("3 1\na 2000 1 5:1\n"), InputError);
  CHECK_THROWS_AS(parse_matrix("3 1\na 2000 2 0:1\n"), InputError);
  CHECK_THROWS_AS(parse_matrix("3 2\na 2000 1 0:1\n"), InputError);
  CHECK_THROWS_AS(parse_matrix("3 1\na 2000 1 0:0\n"), InputError);
}

TEST_CASE("model files reproduce every double bit for bit") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(1e-9, 1.0);
  LdaModel model;
  model.config = LdaConfig::defaults(3, 42);
  model.num_docs = 4;
  model.vocab_size = 5;
  model.sweeps = model.config.total_sweeps();
  model.vocab_fingerprint = 0xDEADBEEF01234567ULL;
  for (int i = 0; i < 12; ++i) model.theta.push_back(u(rng));
  for (int i = 0; i < 15; ++i) model.beta.push_back(u(rng) / 3.0);
  model.theta[0] = 1.0 / 3.0;
  model.beta[0] = 5e-324;

  const auto path = scratch("model.json");
  write_atomic(path, model_to_text(model));
  const auto back = read_model(path);
  CHECK(back.config.num_topics == 3);
  CHECK(same_bits(back.config.alpha, model.config.alpha));
  CHECK(back.config.seed == 42);
  CHECK(back.vocab_fingerprint == model.vocab_fingerprint);
  CHECK(back.sweeps == model.sweeps);
  REQUIRE(back.theta.size() == model.theta.size());
  REQUIRE(back.beta.size() == model.beta.size());
  for (std::size_t i = 0; i < model.theta.size(); ++i) CHECK(same_bits(back.theta[i], model.theta[i]));
  for (std::size_t i = 0; i < model.beta.size(); ++i) CHECK(same_bits(back.beta[i], model.beta[i]));
  CHECK(model_to_text(back) == model_to_text(model));

  auto j = model_to_json(model);
  j["theta"].erase(0);
  CHECK_THROWS_AS(model_from_json(j), InputError);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(same_bits(std::stod(format_double(x)), x));
  }
}

TEST_CASE("malformed corpus lines name the line") {
  const auto path = scratch("bad.jsonl");
  write_atomic(path,
               "{\"id\": \"a\", \"year\": 2000, \"text\": \"hello\"}\n"
               "{\"id\": \"b\", \"year\": 2001, \"text\": \"world\"\n");
  try {
    read_corpus_jsonl(path);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("bad.jsonl:2") != std::string::npos);
  }

  write_atomic(path, "{\"id\": \"a\", \"year\": \"2000\", \"text\": \"hello\"}\n");
  CHECK_THROWS_AS(read_corpus_jsonl(path), InputError);
  CHECK_THROWS_AS(read_corpus_jsonl(scratch("missing.jsonl")), InputError);
}

TEST_CASE("corpus JSONL round-trip") {
  std::vector<RawDocument> docs = {{"a", 2000, "Line one\nwith \"quotes\""}, {"b", -5, "ünïcode"}};
  const auto path = scratch("corpus.jsonl");
  write_atomic(path, corpus_to_jsonl(docs));
  const auto back = read_corpus_jsonl(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].text == docs[0].text);
  CHECK(back[1].period == -5);
}

TEST_CASE("indicator CSV") {
  const auto path = scratch("ind.csv");
  write_atomic(path, "name,year,count\n\"Smith, 1990\",2001,3\nother,2000,1\n\"Smith, 1990\",2000,2\n");
  const auto ind = read_indicators_csv(path);
  REQUIRE(ind.size() == 2);
  CHECK(ind[0].name == "Smith, 1990");
  REQUIRE(ind[0].points.size() == 2);
  CHECK(ind[0].points[0].period == 2000);
  CHECK(ind[0].points[1].value == 3.0);
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("plain") == "plain");

  write_atomic(path, "who,when,count\n");
  CHECK_THROWS_AS(read_indicators_csv(path), InputError);
}

TEST_CASE("series CSV round-trip") {
  std::vector<TopicSeries> series(2);
  for (std::size_t k = 0; k < 2; ++k) {
    series[k].topic = k;
    for (std::int64_t t = 0; t < 5; ++t)
      series[k].points.push_back({1990 + t, 0.1 * static_cast<double>(k + 1) + 1e-3 * t, 3});
  }
  const auto path = scratch("series.csv");
  write_atomic(path, series_to_csv(series));
  const auto back = read_series_csv(path);
  REQUIRE(back.size() == 2);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t t = 0; t < 5; ++t) {
      CHECK(back[k].points[t].period == series[k].points[t].period);
      CHECK(same_bits(back[k].points[t].value, series[k].points[t].value));
      CHECK(back[k].points[t].n_docs == 3);
    }
}
