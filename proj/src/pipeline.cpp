#include "narrative/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "narrative/errors.hpp"
#include "narrative/io.hpp"
#include "narrative/rng.hpp"
#include "narrative/version.hpp"

namespace narrative {

using io::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidConfig("'" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw InvalidConfig("unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

fs::path out_file(const PipelineConfig& c, const char* name) { return c.paths.output / name; }

void require_file(const fs::path& path, const std::string& what) {
  if (path.empty()) throw InputError("no " + what + " path configured");
  if (!fs::exists(path)) throw InputError(what + " file not found: " + path.string());
}

}  // namespace

void PipelineConfig::validate() const {
  make_preprocess_config(*this).validate();
  make_lda_config(*this).validate();
  if (!(trend.alpha > 0.0 && trend.alpha < 1.0))
    throw InvalidConfig("trend.alpha must lie in (0, 1)");
  if (!(trend.confidence > 0.0 && trend.confidence < 1.0))
    throw InvalidConfig("trend.confidence must lie in (0, 1)");
  align.validate();
  if (top_n < 1) throw InvalidConfig("top_n must be >= 1");
}

PipelineConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidConfig(path.string() + ": malformed JSON (" + e.what() + ")");
  }
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  PipelineConfig c;
  try {
    reject_unknown(j, {"seed", "paths", "preprocess", "lda", "trend", "align", "simulate", "topics"},
                   "config");
    read_opt(j, "seed", c.seed);
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      reject_unknown(p, {"corpus", "stopwords", "exclusions", "indicators", "output"}, "paths");
      if (p.contains("corpus")) c.paths.corpus = resolve(base, p["corpus"].get<std::string>());
      if (p.contains("stopwords")) c.paths.stopwords = resolve(base, p["stopwords"].get<std::string>());
      if (p.contains("exclusions"))
        c.paths.exclusions = resolve(base, p["exclusions"].get<std::string>());
      if (p.contains("indicators"))
        c.paths.indicators = resolve(base, p["indicators"].get<std::string>());
      if (p.contains("output")) c.paths.output = resolve(base, p["output"].get<std::string>());
    }
    if (j.contains("preprocess")) {
      const auto& p = j["preprocess"];
      reject_unknown(p, {"builtin_stopwords", "min_token_length", "min_df", "max_df_fraction"},
                     "preprocess");
      read_opt(p, "builtin_stopwords", c.preprocess.builtin_stopwords);
      read_opt(p, "min_token_length", c.preprocess.min_token_length);
      read_opt(p, "min_df", c.preprocess.min_df);
      read_opt(p, "max_df_fraction", c.preprocess.max_df_fraction);
    }
    if (j.contains("lda")) {
      const auto& p = j["lda"];
      reject_unknown(p, {"K", "alpha", "eta", "burn_in", "samples", "thin"}, "lda");
      read_opt(p, "K", c.lda.num_topics);
      if (p.contains("alpha")) c.lda.alpha = p["alpha"].get<double>();
      read_opt(p, "eta", c.lda.eta);
      read_opt(p, "burn_in", c.lda.burn_in);
      read_opt(p, "samples", c.lda.samples);
      read_opt(p, "thin", c.lda.thin);
    }
    if (j.contains("trend")) {
      const auto& p = j["trend"];
      reject_unknown(p, {"alpha", "correction", "confidence"}, "trend");
      read_opt(p, "alpha", c.trend.alpha);
      if (p.contains("correction")) c.trend.correction = parse_correction(p["correction"].get<std::string>());
      read_opt(p, "confidence", c.trend.confidence);
    }
    if (j.contains("align")) {
      const auto& p = j["align"];
      reject_unknown(p, {"max_lag", "min_overlap", "near_window"}, "align");
      read_opt(p, "max_lag", c.align.max_lag);
      read_opt(p, "min_overlap", c.align.min_overlap);
      read_opt(p, "near_window", c.align.near_window);
    }
    if (j.contains("topics")) {
      reject_unknown(j["topics"], {"top_n"}, "topics");
      read_opt(j["topics"], "top_n", c.top_n);
    }
    if (j.contains("simulate")) {
      const auto& p = j["simulate"];
      reject_unknown(p, {"K", "V", "docs_per_period", "first_period", "periods", "doc_length",
                         "alpha", "eta", "trend"},
                     "simulate");
      auto& s = c.simulate;
      read_opt(p, "K", s.num_topics);
      read_opt(p, "V", s.vocab_size);
      read_opt(p, "docs_per_period", s.docs_per_period);
      read_opt(p, "first_period", s.first_period);
      read_opt(p, "periods", s.num_periods);
      if (p.contains("doc_length")) {
        const auto& len = p["doc_length"];
        if (len.is_array()) {
          if (len.size() != 2) throw InvalidConfig("simulate.doc_length range needs [min, max]");
          s.min_doc_length = len[0].get<std::size_t>();
          s.max_doc_length = len[1].get<std::size_t>();
        } else {
          s.min_doc_length = s.max_doc_length = len.get<std::size_t>();
        }
      }
      read_opt(p, "alpha", s.alpha);
      read_opt(p, "eta", s.eta);
      if (p.contains("trend")) {
        const auto& t = p["trend"];
        reject_unknown(t, {"topic", "start_share", "end_share", "shape"}, "simulate.trend");
        PlantedTrend planted;
        read_opt(t, "topic", planted.topic);
        read_opt(t, "start_share", planted.start_share);
        read_opt(t, "end_share", planted.end_share);
        if (t.contains("shape")) planted.shape = parse_shape(t["shape"].get<std::string>());
        s.trend = planted;
      }
    }
  } catch (const json::exception& e) {
    throw InvalidConfig(path.string() + ": " + e.what());
  }
  return c;
}

PreprocessConfig make_preprocess_config(const PipelineConfig& c) {
  PreprocessConfig p = c.preprocess.builtin_stopwords ? PreprocessConfig::with_default_stopwords()
                                                      : PreprocessConfig{};
  p.min_token_length = c.preprocess.min_token_length;
  p.min_df = c.preprocess.min_df;
  p.max_df_fraction = c.preprocess.max_df_fraction;
  return p;
}

LdaConfig make_lda_config(const PipelineConfig& c) {
  LdaConfig l = LdaConfig::defaults(c.lda.num_topics, derive_seed(c.seed, "fit"));
  if (c.lda.alpha) l.alpha = *c.lda.alpha;
  l.eta = c.lda.eta;
  l.burn_in = c.lda.burn_in;
  l.samples = c.lda.samples;
  l.thin = c.lda.thin;
  return l;
}

SynthSpec make_synth_spec(const PipelineConfig& c) {
  const auto& s = c.simulate;
  SynthSpec spec = SynthSpec::stationary(s.num_topics, s.vocab_size, s.docs_per_period,
                                         s.num_periods, s.min_doc_length, s.alpha, s.eta,
                                         derive_seed(c.seed, "simulate"));
  spec.first_period = s.first_period;
  spec.max_doc_length = s.max_doc_length;
  spec.validate();
  if (s.trend)
    spec = inject_trend(spec, s.trend->topic, s.trend->start_share, s.trend->end_share,
                        s.trend->shape);
  return spec;
}

IngestSummary run_ingest(const PipelineConfig& c) {
  require_file(c.paths.corpus, "corpus");
  PreprocessConfig pre = make_preprocess_config(c);
  if (!c.paths.stopwords.empty()) {
    require_file(c.paths.stopwords, "stopwords");
    for (auto& t : io::read_term_list(c.paths.stopwords)) pre.stopwords.insert(t);
  }
  if (!c.paths.exclusions.empty()) {
    require_file(c.paths.exclusions, "exclusions");
    pre.exclusions = io::read_term_list(c.paths.exclusions);
  }
  const auto raw = io::read_corpus_jsonl(c.paths.corpus);
  const Corpus corpus = build_corpus(raw, pre);

  std::string dropped;
  for (const auto& id : corpus.dropped) dropped += id + "\n";
  io::write_atomic(out_file(c, files::kVocabulary), io::vocabulary_to_text(corpus.vocabulary));
  io::write_atomic(out_file(c, files::kMatrix), io::matrix_to_text(corpus.matrix));
  io::write_atomic(out_file(c, files::kDropped), dropped);
  return {corpus.matrix.num_docs(), corpus.vocabulary.size(), corpus.dropped.size()};
}

LdaModel run_fit(const PipelineConfig& c) {
  const auto vocab = io::read_vocabulary(out_file(c, files::kVocabulary));
  const auto matrix = io::read_matrix(out_file(c, files::kMatrix));
  if (matrix.vocab_size() != vocab.size())
    throw InputError("matrix and vocabulary disagree on V");
  LdaModel model = fit(matrix, make_lda_config(c));
  model.vocab_fingerprint = vocab.fingerprint();
  io::write_atomic(out_file(c, files::kModel), io::model_to_text(model));
  return model;
}

namespace {

LdaModel load_model_checked(const PipelineConfig& c, const Vocabulary& vocab) {
  LdaModel model = io::read_model(out_file(c, files::kModel));
  if (model.vocab_fingerprint != vocab.fingerprint())
    throw InputError("model was fitted against a different vocabulary");
  model.check_invariants(1e-9);
  return model;
}

json topics_json(const LdaModel& model, const Vocabulary& vocab, std::size_t top_n) {
  json out = json::array();
  const std::size_t n = std::min(top_n, model.vocab_size);
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    json words = json::array();
    for (const auto& [term, p] : top_words(model, vocab, k, n))
      words.push_back({{"term", term}, {"probability", p}});
    out.push_back({{"topic", k}, {"top_words", std::move(words)}});
  }
  return out;
}

}  // namespace

void run_topics(const PipelineConfig& c) {
  const auto vocab = io::read_vocabulary(out_file(c, files::kVocabulary));
  const auto model = load_model_checked(c, vocab);
  const json topics = topics_json(model, vocab, c.top_n);
  std::string csv = "topic,rank,term,probability\n";
  for (const auto& t : topics) {
    std::size_t rank = 1;
    for (const auto& w : t["top_words"]) {
      csv += std::to_string(t["topic"].get<std::size_t>()) + "," + std::to_string(rank++) + "," +
             w["term"].get<std::string>() + "," + io::format_double(w["probability"].get<double>()) +
             "\n";
    }
  }
  io::write_atomic(out_file(c, files::kTopicsJson), io::to_text(topics));
  io::write_atomic(out_file(c, files::kTopicsCsv), csv);
}

TrendOutputs analyse_trends(const LdaModel& model, const std::vector<std::int64_t>& periods,
                            const TrendSettings& settings) {
  TrendOutputs out;
  out.series = aggregate(model, periods);
  for (const auto& s : out.series)
    out.summary.results.push_back({s.topic, trend_test(s, settings.confidence)});
  out.summary.flagged = detect_emergence(out.summary.results, settings.alpha, settings.correction);
  return out;
}

TrendSummary run_trend(const PipelineConfig& c) {
  const auto vocab = io::read_vocabulary(out_file(c, files::kVocabulary));
  const auto model = load_model_checked(c, vocab);
  const auto matrix = io::read_matrix(out_file(c, files::kMatrix));
  if (matrix.num_docs() != model.num_docs)
    throw InputError("matrix and model disagree on the number of documents");

  const TrendOutputs out = analyse_trends(model, matrix.periods(), c.trend);
  json adjusted = json::array();
  for (const auto& r : out.summary.results) {
    adjusted.push_back(
        {{"topic", r.topic},
         {"p_adjusted", adjusted_p(r.result.p_value, out.summary.results.size(), c.trend.correction)}});
  }
  json emergence;
  emergence["alpha"] = c.trend.alpha;
  emergence["correction"] = to_string(c.trend.correction);
  emergence["confidence"] = c.trend.confidence;
  emergence["tests"] = out.summary.results.size();
  emergence["flagged"] = out.summary.flagged;
  emergence["adjusted"] = std::move(adjusted);

  io::write_atomic(out_file(c, files::kSeries), io::series_to_csv(out.series));
  io::write_atomic(out_file(c, files::kTrend), io::to_text(io::trend_to_json(out.summary.results)));
  io::write_atomic(out_file(c, files::kTrendTable), io::trend_table_csv(out.summary.results));
  io::write_atomic(out_file(c, files::kEmergence), io::to_text(emergence));
  return out.summary;
}

std::vector<LagResult> run_align(const PipelineConfig& c) {
  c.align.validate();
  require_file(c.paths.indicators, "indicators");
  const auto series = io::read_series_csv(out_file(c, files::kSeries));
  const auto indicators = io::read_indicators_csv(c.paths.indicators);

  std::vector<LagResult> results;
  std::vector<std::string> patterns;
  json entries = json::array();
  json skipped = json::array();
  for (const auto& s : series) {
    for (const auto& ind : indicators) {
      try {
        LagResult r = lag_correlation(s, ind, c.align.max_lag, c.align.min_overlap);
        patterns.push_back(classify_pattern(r, c.align.near_window));
        entries.push_back(io::lag_to_json(r, patterns.back()));
        results.push_back(std::move(r));
      } catch (const NoValidLag& e) {
        skipped.push_back({{"topic", s.topic}, {"indicator", ind.name}, {"reason", e.what()}});
      } catch (const ZeroVariance& e) {
        skipped.push_back({{"topic", s.topic}, {"indicator", ind.name}, {"reason", e.what()}});
      }
    }
  }
  json ind_json = json::array();
  for (const auto& ind : indicators) {
    json points = json::array();
    for (const auto& p : ind.points) points.push_back({{"period", p.period}, {"value", p.value}});
    ind_json.push_back({{"name", ind.name}, {"points", std::move(points)}});
  }
  json doc;
  doc["max_lag"] = c.align.max_lag;
  doc["min_overlap"] = c.align.min_overlap;
  doc["near_window"] = c.align.near_window;
  doc["results"] = std::move(entries);
  doc["skipped"] = std::move(skipped);
  doc["indicators"] = std::move(ind_json);
  io::write_atomic(out_file(c, files::kLags), io::to_text(doc));
  io::write_atomic(out_file(c, files::kLagProfiles), io::lag_profiles_csv(results));
  io::write_atomic(out_file(c, files::kLagTable), io::lag_table_csv(results, patterns));
  return results;
}

SynthCorpus run_simulate(const PipelineConfig& c) {
  SynthCorpus corpus = generate(make_synth_spec(c));
  io::write_atomic(out_file(c, files::kSynthCorpus), io::corpus_to_jsonl(corpus.documents));
  io::write_atomic(out_file(c, files::kSynthTruth), io::to_text(io::truth_to_json(corpus)));
  return corpus;
}

void run_report(const PipelineConfig& c) {
  const auto vocab = io::read_vocabulary(out_file(c, files::kVocabulary));
  const auto matrix = io::read_matrix(out_file(c, files::kMatrix));
  const auto model = load_model_checked(c, vocab);
  const auto series = io::read_series_csv(out_file(c, files::kSeries));
  const auto trends = io::trend_from_json(json::parse(io::read_text(out_file(c, files::kTrend))));
  const json emergence = json::parse(io::read_text(out_file(c, files::kEmergence)));

  std::size_t dropped = 0;
  if (fs::exists(out_file(c, files::kDropped))) {
    const std::string text = io::read_text(out_file(c, files::kDropped));
    dropped = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  }

  json report;
  report["build"] = kBuildId;
  report["seed"] = c.seed;
  report["stage_seeds"] = {{"fit", derive_seed(c.seed, "fit")},
                           {"simulate", derive_seed(c.seed, "simulate")}};
  report["corpus"] = {{"documents", matrix.num_docs()},
                      {"vocabulary", vocab.size()},
                      {"tokens", matrix.total_tokens()},
                      {"dropped", dropped}};
  const auto& mc = model.config;
  report["model"] = {{"K", mc.num_topics},       {"alpha", mc.alpha},     {"eta", mc.eta},
                     {"burn_in", mc.burn_in},    {"samples", mc.samples}, {"thin", mc.thin},
                     {"sweeps", model.sweeps},   {"seed", mc.seed},
                     {"vocab_fingerprint", io::model_to_json(model)["vocab_fingerprint"]}};
  report["topics"] = topics_json(model, vocab, c.top_n);

  std::set<std::size_t> flagged_set;
  for (const auto& f : emergence.at("flagged")) flagged_set.insert(f.get<std::size_t>());
  json table = json::array();
  for (const auto& t : trends) {
    const auto& r = t.result;
    table.push_back({{"topic", t.topic},
                     {"tau", r.tau},
                     {"p_value", r.p_value},
                     {"sen_slope", r.sen_slope},
                     {"ci_low", r.ci_low},
                     {"ci_high", r.ci_high},
                     {"S", r.S},
                     {"z", r.z},
                     {"n", r.n},
                     {"p_adjusted", adjusted_p(r.p_value, trends.size(),
                                               parse_correction(emergence.at("correction")))},
                     {"flagged", flagged_set.contains(t.topic)}});
  }
  report["trend"] = {{"alpha", emergence.at("alpha")},
                     {"correction", emergence.at("correction")},
                     {"confidence", emergence.at("confidence")},
                     {"results", std::move(table)},
                     {"flagged", emergence.at("flagged")}};

  std::string prevalence = "topic,period,value,n_docs\n";
  for (const auto& s : series)
    for (const auto& p : s.points)
      prevalence += std::to_string(s.topic) + "," + std::to_string(p.period) + "," +
                    io::format_double(p.value) + "," + std::to_string(p.n_docs) + "\n";

  std::string joint = "topic,indicator,period,prevalence,indicator_value\n";
  std::string profiles = "topic,indicator,lag,r,overlap\n";
  const fs::path lags_path = out_file(c, files::kLags);
  json lags;
  if (fs::exists(lags_path)) lags = json::parse(io::read_text(lags_path));
  const bool has_align = lags.is_object() && !lags.at("results").empty();
  if (has_align) {
    std::map<std::string, std::map<std::int64_t, double>> indicator_values;
    for (const auto& ind : lags.at("indicators"))
      for (const auto& p : ind.at("points"))
        indicator_values[ind.at("name").get<std::string>()][p.at("period").get<std::int64_t>()] =
            p.at("value").get<double>();
    std::map<std::size_t, const TopicSeries*> series_of;
    for (const auto& s : series) series_of[s.topic] = &s;

    json rows = json::array();
    for (const auto& r : lags.at("results")) {
      const auto topic = r.at("topic").get<std::size_t>();
      const auto name = r.at("indicator").get<std::string>();
      rows.push_back({{"topic", topic},
                      {"indicator", name},
                      {"best_lag", r.at("best_lag")},
                      {"max_corr", r.at("max_corr")},
                      {"corr_at_zero", r.at("corr_at_zero")},
                      {"pattern", r.at("pattern")}});
      const std::string quoted = io::csv_field(name);
      if (auto it = series_of.find(topic); it != series_of.end()) {
        const auto& values = indicator_values[name];
        for (const auto& p : it->second->points) {
          auto v = values.find(p.period);
          if (v == values.end()) continue;
          joint += std::to_string(topic) + "," + quoted + "," + std::to_string(p.period) + "," +
                   io::format_double(p.value) + "," + io::format_double(v->second) + "\n";
        }
      }
      for (const auto& p : r.at("profile")) {
        profiles += std::to_string(topic) + "," + quoted + "," +
                    std::to_string(p.at("lag").get<std::int64_t>()) + "," +
                    io::format_double(p.at("r").get<double>()) + "," +
                    std::to_string(p.at("overlap").get<std::size_t>()) + "\n";
      }
    }
    report["align"] = {{"max_lag", lags.at("max_lag")},
                       {"min_overlap", lags.at("min_overlap")},
                       {"near_window", lags.at("near_window")},
                       {"results", std::move(rows)}};
  }

  json figures = {{"prevalence", files::kFigPrevalence}};
  if (has_align) {
    figures["joint"] = files::kFigJoint;
    figures["lag_profiles"] = files::kFigLagProfiles;
  }
  report["figures"] = std::move(figures);

  io::write_atomic(out_file(c, files::kFigPrevalence), prevalence);
  if (has_align) {
    io::write_atomic(out_file(c, files::kFigJoint), joint);
    io::write_atomic(out_file(c, files::kFigLagProfiles), profiles);
  }
  io::write_atomic(out_file(c, files::kReport), io::to_text(report));
}

}  // namespace narrative
