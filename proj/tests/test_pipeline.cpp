#include <doctest.h>

#include <filesystem>
#include <map>

#include "narrative/errors.hpp"
#include "narrative/io.hpp"
#include "narrative/pipeline.hpp"

using namespace narrative;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "narrative_test_pipeline" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PipelineConfig small_config(const fs::path& out) {
  PipelineConfig c;
  c.seed = 17;
  c.paths.output = out;
  c.paths.corpus = out / files::kSynthCorpus;
  c.simulate.num_topics = 3;
  c.simulate.vocab_size = 40;
  c.simulate.docs_per_period = 6;
  c.simulate.num_periods = 14;
  c.simulate.min_doc_length = 30;
  c.simulate.max_doc_length = 30;
  c.simulate.alpha = 0.5;
  c.simulate.trend = PlantedTrend{1, 0.1, 0.6, TrendShape::linear};
  c.preprocess.min_df = 1;
  c.preprocess.max_df_fraction = 1.0;
  c.lda.num_topics = 3;
  c.lda.burn_in = 30;
  c.lda.samples = 4;
  c.lda.thin = 2;
  c.align.max_lag = 3;
  c.align.min_overlap = 8;
  c.top_n = 5;
  return c;
}

void write_indicator(const fs::path& path) {
  std::string csv = "name,year,count\n";
  for (int t = 1; t <= 14; ++t) csv += "Example 2001," + std::to_string(t) + "," + std::to_string(t * t % 7) + "\n";
  io::write_atomic(path, csv);
}

void run_all(const PipelineConfig& c) {
  run_simulate(c);
  run_ingest(c);
  run_fit(c);
  run_topics(c);
  run_trend(c);
  run_align(c);
  run_report(c);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files[e.path().filename().string()] = io::read_text(e.path());
  return files;
}

}  // namespace

TEST_CASE("the full pipeline is byte-identical across runs") {
  const auto a = fresh_dir("a");
  const auto b = fresh_dir("b");
  auto ca = small_config(a);
  auto cb = small_config(b);
  ca.paths.indicators = a / "indicators.csv";
  cb.paths.indicators = b / "indicators.csv";
  write_indicator(ca.paths.indicators);
  write_indicator(cb.paths.indicators);
  run_all(ca);
  run_all(cb);
  const auto sa = snapshot(a);
  const auto sb = snapshot(b);
  CHECK(sa.size() == sb.size());
  for (const auto* name : {files::kVocabulary, files::kMatrix, files::kModel, files::kTopicsJson,
                           files::kTopicsCsv, files::kSeries, files::kTrend, files::kTrendTable,
                           files::kEmergence, files::kLags, files::kLagProfiles, files::kLagTable, files::kReport,
                           files::kFigPrevalence, files::kFigJoint, files::kFigLagProfiles}) {
    INFO(name);
    REQUIRE(sa.count(name) == 1);
    CHECK(sa.at(name) == sb.at(name));
  }

  const auto report = io::json::parse(sa.at(files::kReport));
  CHECK(report.contains("align"));
  CHECK(report["trend"]["results"].size() == 3);
  CHECK(report["corpus"]["documents"] == 84);

  const auto model = io::read_model(a / files::kModel);
  model.check_invariants(1e-12);
  CHECK(model.num_docs == 84);
}

TEST_CASE("in-process trend analysis matches the stage outputs") {
  const auto dir = fresh_dir("inproc");
  auto c = small_config(dir);
  run_simulate(c);
  run_ingest(c);
  const auto model = run_fit(c);
  const auto summary = run_trend(c);
  const auto matrix = io::read_matrix(dir / files::kMatrix);
  const auto direct = analyse_trends(model, matrix.periods(), c.trend);
  REQUIRE(direct.summary.results.size() == summary.results.size());
  for (std::size_t k = 0; k < summary.results.size(); ++k) {
    CHECK(direct.summary.results[k].result.S == summary.results[k].result.S);
    CHECK(direct.summary.results[k].result.p_value == summary.results[k].result.p_value);
    CHECK(direct.summary.results[k].result.sen_slope == summary.results[k].result.sen_slope);
  }
  CHECK(direct.summary.flagged == summary.flagged);
  CHECK(io::read_text(dir / files::kSeries) == io::series_to_csv(direct.series));

  // Refitting from the files on disk reproduces the saved model.
  const auto again = fit(matrix, make_lda_config(c));
  CHECK(again.theta == model.theta);
  CHECK(again.beta == model.beta);
}

TEST_CASE("a single-topic fit gives a unit theta column") {
  const auto dir = fresh_dir("k1");
  auto c = small_config(dir);
  c.lda.num_topics = 1;
  run_simulate(c);
  run_ingest(c);
  const auto model = run_fit(c);
  for (double x : model.theta) CHECK(x == 1.0);
}

TEST_CASE("missing inputs and empty alignments") {
  const auto dir = fresh_dir("missing");
  auto c = small_config(dir);
  run_simulate(c);
  run_ingest(c);
  run_fit(c);
  run_trend(c);
  c.paths.indicators = dir / "nope.csv";
  try {
    run_align(c);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("nope.csv") != std::string::npos);
  }

  // An indicator that never overlaps enough leaves every pair skipped.
  c.paths.indicators = dir / "short.csv";
  io::write_atomic(c.paths.indicators, "name,year,count\nx,1,1\nx,2,3\n");
  const auto results = run_align(c);
  CHECK(results.empty());
  const auto lags = io::json::parse(io::read_text(dir / files::kLags));
  CHECK(lags["skipped"].size() == 3);
  run_report(c);
  const auto report = io::json::parse(io::read_text(dir / files::kReport));
  CHECK_FALSE(report.contains("align"));
  CHECK_FALSE(fs::exists(dir / files::kFigJoint));
}

TEST_CASE("configuration files") {
  const auto dir = fresh_dir("config");
  io::write_atomic(dir / "c.json",
                   "{\"seed\": 5, \"paths\": {\"corpus\": \"data/c.jsonl\", \"output\": \"o\"},"
                   " \"lda\": {\"K\": 4}, \"simulate\": {\"doc_length\": [10, 20]}}");
  const auto c = load_config(dir / "c.json");
  CHECK(c.seed == 5);
  CHECK(c.paths.corpus == dir / "data/c.jsonl");
  CHECK(c.paths.output == dir / "o");
  CHECK(c.lda.num_topics == 4);
  CHECK(c.simulate.min_doc_length == 10);
  CHECK(c.simulate.max_doc_length == 20);
  CHECK(make_lda_config(c).alpha == doctest::Approx(12.5));
  CHECK(make_lda_config(c).seed != make_synth_spec(c).seed);

  io::write_atomic(dir / "bad.json", "{\"sed\": 5}");
  CHECK_THROWS_AS(load_config(dir / "bad.json"), InvalidConfig);
  io::write_atomic(dir / "broken.json", "{\"seed\": ");
  CHECK_THROWS_AS(load_config(dir / "broken.json"), InvalidConfig);
}
