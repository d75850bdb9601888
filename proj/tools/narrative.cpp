// Command-line front end for the narrative-emergence pipeline.
//
//   narrative [--config FILE] [--seed N] [--output DIR] <subcommand> [flags]
//
// Precedence: built-in defaults < config file < command-line flags.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "narrative/errors.hpp"
#include "narrative/io.hpp"
#include "narrative/pipeline.hpp"
#include "narrative/version.hpp"

namespace {

using namespace narrative;

template <typename T>
void apply(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;

  std::optional<std::string> corpus, stopwords, exclusions, indicators;
  std::optional<bool> no_builtin_stopwords;
  std::optional<std::size_t> min_length, min_df;
  std::optional<double> max_df;

  std::optional<std::size_t> K, burn_in, samples, thin;
  std::optional<double> lda_alpha, eta;

  std::optional<std::size_t> top_n;

  std::optional<double> significance, confidence;
  std::optional<std::string> correction;

  std::optional<std::int64_t> max_lag, near_window;
  std::optional<std::size_t> min_overlap;

  std::optional<std::size_t> sim_K, sim_V, sim_docs, sim_periods, sim_length;
  std::optional<std::int64_t> sim_first;
  std::optional<double> sim_alpha, sim_eta;
  std::optional<std::size_t> ramp_topic;
  std::optional<double> ramp_start, ramp_end;
  std::optional<std::string> ramp_shape;
};

PipelineConfig resolve_config(const std::string& config_path, const Overrides& o) {
  PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
  apply(o.seed, c.seed);
  if (o.output) c.paths.output = *o.output;
  if (o.corpus) c.paths.corpus = *o.corpus;
  if (o.stopwords) c.paths.stopwords = *o.stopwords;
  if (o.exclusions) c.paths.exclusions = *o.exclusions;
  if (o.indicators) c.paths.indicators = *o.indicators;
  if (o.no_builtin_stopwords && *o.no_builtin_stopwords) c.preprocess.builtin_stopwords = false;
  apply(o.min_length, c.preprocess.min_token_length);
  apply(o.min_df, c.preprocess.min_df);
  apply(o.max_df, c.preprocess.max_df_fraction);
  apply(o.K, c.lda.num_topics);
  if (o.lda_alpha) c.lda.alpha = *o.lda_alpha;
  apply(o.eta, c.lda.eta);
  apply(o.burn_in, c.lda.burn_in);
  apply(o.samples, c.lda.samples);
  apply(o.thin, c.lda.thin);
  apply(o.top_n, c.top_n);
  apply(o.significance, c.trend.alpha);
  apply(o.confidence, c.trend.confidence);
  if (o.correction) c.trend.correction = parse_correction(*o.correction);
  apply(o.max_lag, c.align.max_lag);
  apply(o.near_window, c.align.near_window);
  apply(o.min_overlap, c.align.min_overlap);
  auto& s = c.simulate;
  apply(o.sim_K, s.num_topics);
  apply(o.sim_V, s.vocab_size);
  apply(o.sim_docs, s.docs_per_period);
  apply(o.sim_periods, s.num_periods);
  if (o.sim_length) s.min_doc_length = s.max_doc_length = *o.sim_length;
  apply(o.sim_first, s.first_period);
  apply(o.sim_alpha, s.alpha);
  apply(o.sim_eta, s.eta);
  if (o.ramp_topic || o.ramp_start || o.ramp_end || o.ramp_shape) {
    PlantedTrend t = s.trend.value_or(PlantedTrend{});
    apply(o.ramp_topic, t.topic);
    apply(o.ramp_start, t.start_share);
    apply(o.ramp_end, t.end_share);
    if (o.ramp_shape) t.shape = parse_shape(*o.ramp_shape);
    s.trend = t;
  }
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect emerging topics in timestamped corpora"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kBuildId));

  std::string config_path;
  Overrides o;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", o.seed, "Master seed; stage seeds are derived from it");
  app.add_option("--output", o.output, "Output directory");

  auto* ingest = app.add_subcommand("ingest", "Tokenize a JSONL corpus into vocab.txt + matrix.txt");
  ingest->add_option("--corpus", o.corpus, "JSONL corpus {id, year, text}");
  ingest->add_option("--stopwords", o.stopwords, "Extra stopword list");
  ingest->add_option("--exclusions", o.exclusions, "Generic terms to exclude");
  ingest->add_flag("--no-builtin-stopwords", o.no_builtin_stopwords, "Skip the built-in list");
  ingest->add_option("--min-length", o.min_length, "Minimum token length");
  ingest->add_option("--min-df", o.min_df, "Minimum document frequency");
  ingest->add_option("--max-df", o.max_df, "Maximum document-frequency fraction");

  auto* fit_cmd = app.add_subcommand("fit", "Fit LDA by collapsed Gibbs sampling");
  fit_cmd->add_option("-K,--topics", o.K, "Number of topics");
  fit_cmd->add_option("--alpha", o.lda_alpha, "Document-topic concentration (default 50/K)");
  fit_cmd->add_option("--eta", o.eta, "Topic-word concentration");
  fit_cmd->add_option("--burn-in", o.burn_in, "Burn-in sweeps");
  fit_cmd->add_option("--samples", o.samples, "Posterior samples");
  fit_cmd->add_option("--thin", o.thin, "Sweeps between samples");

  auto* topics = app.add_subcommand("topics", "Write the top words of every topic");
  topics->add_option("-n,--top", o.top_n, "Words per topic");

  auto* trend = app.add_subcommand("trend", "Aggregate per period and run trend tests");
  trend->add_option("--alpha", o.significance, "Significance level for flagging");
  trend->add_option("--correction", o.correction, "none | bonferroni");
  trend->add_option("--confidence", o.confidence, "Sen slope interval level");

  auto* align = app.add_subcommand("align", "Lagged correlation with indicator series");
  align->add_option("--indicators", o.indicators, "CSV with name,year,count");
  align->add_option("--max-lag", o.max_lag, "Largest lag in either direction");
  align->add_option("--min-overlap", o.min_overlap, "Minimum paired periods per lag");
  align->add_option("--near-window", o.near_window, "Largest |lag| still called near");

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic LDA corpus");
  simulate->add_option("-K,--topics", o.sim_K, "Topics");
  simulate->add_option("-V,--vocab", o.sim_V, "Vocabulary size");
  simulate->add_option("--docs-per-period", o.sim_docs, "Documents per period");
  simulate->add_option("--periods", o.sim_periods, "Number of periods");
  simulate->add_option("--first-period", o.sim_first, "First period label");
  simulate->add_option("--doc-length", o.sim_length, "Tokens per document");
  simulate->add_option("--alpha", o.sim_alpha, "Stationary per-topic concentration");
  simulate->add_option("--eta", o.sim_eta, "Topic-word concentration");
  simulate->add_option("--ramp-topic", o.ramp_topic, "Topic whose share is reshaped");
  simulate->add_option("--ramp-start", o.ramp_start, "Share in the first period");
  simulate->add_option("--ramp-end", o.ramp_end, "Share in the last period (peak for hump)");
  simulate->add_option("--ramp-shape", o.ramp_shape, "linear | hump");

  auto* report = app.add_subcommand("report", "Collect every stage output into report.json");
  (void)report;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const PipelineConfig c = resolve_config(config_path, o);
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "ingest") {
      const auto s = run_ingest(c);
      std::cout << "documents " << s.num_docs << "\nvocabulary " << s.vocab_size << "\ndropped "
                << s.dropped << "\n";
      if (s.dropped > 0)
        std::cerr << "warning: " << s.dropped << " document(s) empty after preprocessing, see "
                  << (c.paths.output / files::kDropped).string() << "\n";
    } else if (name == "fit") {
      const auto m = run_fit(c);
      std::cout << "K " << m.num_topics() << "\ndocuments " << m.num_docs << "\nvocabulary "
                << m.vocab_size << "\nsweeps " << m.sweeps << "\nseed " << m.config.seed << "\n";
    } else if (name == "topics") {
      run_topics(c);
      std::cout << io::read_text(c.paths.output / files::kTopicsCsv);
    } else if (name == "trend") {
      const auto s = run_trend(c);
      std::cout << io::read_text(c.paths.output / files::kTrendTable);
      std::cout << "flagged";
      for (auto k : s.flagged) std::cout << ' ' << k;
      std::cout << "\n";
    } else if (name == "align") {
      const auto results = run_align(c);
      for (const auto& r : results) {
        std::cout << "topic " << r.topic << " vs " << r.indicator << ": best lag " << r.best_lag
                  << ", max corr " << r.max_corr << ", "
                  << classify_pattern(r, c.align.near_window) << "\n";
      }
    } else if (name == "simulate") {
      const auto corpus = run_simulate(c);
      std::cout << "documents " << corpus.documents.size() << "\n";
    } else if (name == "report") {
      run_report(c);
      std::cout << (c.paths.output / files::kReport).string() << "\n";
    }
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
