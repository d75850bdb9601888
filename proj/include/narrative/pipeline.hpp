#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "narrative/align.hpp"
#include "narrative/corpus.hpp"
#include "narrative/lda.hpp"
#include "narrative/synthgen.hpp"
#include "narrative/trend.hpp"

namespace narrative {

namespace fs = std::filesystem;

struct PipelinePaths {
  fs::path corpus;
  fs::path stopwords;   // optional extra stopwords
  fs::path exclusions;  // optional generic-term exclusions
  fs::path indicators;
  fs::path output = "out";
};

struct PreprocessSettings {
  bool builtin_stopwords = true;
  std::size_t min_token_length = 2;
  std::size_t min_df = 5;
  double max_df_fraction = 0.5;
};

struct LdaSettings {
  std::size_t num_topics = 10;
  std::optional<double> alpha;  // 50 / K when unset
  double eta = 0.01;
  std::size_t burn_in = 1000;
  std::size_t samples = 20;
  std::size_t thin = 10;
};

struct TrendSettings {
  double alpha = 0.01;
  Correction correction = Correction::bonferroni;
  double confidence = 0.95;
};

struct PlantedTrend {
  std::size_t topic = 0;
  double start_share = 0.05;
  double end_share = 0.30;
  TrendShape shape = TrendShape::linear;
};

struct SimulateSettings {
  std::size_t num_topics = 5;
  std::size_t vocab_size = 200;
  std::size_t docs_per_period = 25;
  std::int64_t first_period = 1;
  std::size_t num_periods = 40;
  std::size_t min_doc_length = 100;
  std::size_t max_doc_length = 100;
  double alpha = 1.0;  // stationary per-topic concentration
  double eta = 0.05;
  std::optional<PlantedTrend> trend;
};

struct PipelineConfig {
  PipelinePaths paths;
  PreprocessSettings preprocess;
  LdaSettings lda;
  TrendSettings trend;
  AlignConfig align;
  SimulateSettings simulate;
  std::size_t top_n = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

// Reads a JSON configuration file. Relative paths inside it resolve against
// the file's directory; unknown keys are rejected.
PipelineConfig load_config(const fs::path& path);

// Resolved stage inputs.
PreprocessConfig make_preprocess_config(const PipelineConfig& config);
LdaConfig make_lda_config(const PipelineConfig& config);
SynthSpec make_synth_spec(const PipelineConfig& config);

// Output file names inside the output directory.
namespace files {
inline constexpr const char* kVocabulary = "vocab.txt";
inline constexpr const char* kMatrix = "matrix.txt";
inline constexpr const char* kDropped = "dropped.txt";
inline constexpr const char* kModel = "model.json";
inline constexpr const char* kTopicsJson = "topics.json";
inline constexpr const char* kTopicsCsv = "topics.csv";
inline constexpr const char* kSeries = "series.csv";
inline constexpr const char* kTrend = "trend.json";
inline constexpr const char* kTrendTable = "trend_table.csv";
inline constexpr const char* kEmergence = "emergence.json";
inline constexpr const char* kLags = "lags.json";
inline constexpr const char* kLagProfiles = "lag_profiles.csv";
inline constexpr const char* kLagTable = "lag_table.csv";
inline constexpr const char* kSynthCorpus = "corpus.jsonl";
inline constexpr const char* kSynthTruth = "truth.json";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kFigPrevalence = "fig_prevalence.csv";
inline constexpr const char* kFigJoint = "fig_joint.csv";
inline constexpr const char* kFigLagProfiles = "fig_lag_profiles.csv";
}  // namespace files

struct IngestSummary {
  std::size_t num_docs = 0;
  std::size_t vocab_size = 0;
  std::size_t dropped = 0;
};

struct TrendSummary {
  std::vector<TopicTrend> results;
  std::vector<std::size_t> flagged;
};

// Each stage reads its inputs from the configured paths / output directory
// and writes its outputs atomically into the output directory.
IngestSummary run_ingest(const PipelineConfig& config);
LdaModel run_fit(const PipelineConfig& config);
void run_topics(const PipelineConfig& config);
TrendSummary run_trend(const PipelineConfig& config);
std::vector<LagResult> run_align(const PipelineConfig& config);
SynthCorpus run_simulate(const PipelineConfig& config);
void run_report(const PipelineConfig& config);

// Pure trend stage: aggregate, test every topic, flag emergence.
struct TrendOutputs {
  std::vector<TopicSeries> series;
  TrendSummary summary;
};
TrendOutputs analyse_trends(const LdaModel& model, const std::vector<std::int64_t>& periods,
                            const TrendSettings& settings);

}  // namespace narrative
