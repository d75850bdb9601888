#pragma once

#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "narrative/align.hpp"
#include "narrative/corpus.hpp"
#include "narrative/lda.hpp"
#include "narrative/synthgen.hpp"
#include "narrative/trend.hpp"

namespace narrative::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string read_text(const fs::path& path);
// Writes to a sibling temp file and renames it over the target.
void write_atomic(const fs::path& path, const std::string& contents);

// Doubles as %.17g so every bit survives a text round trip.
std::string format_double(double x);

// One JSON object per line: {"id": string, "year": integer, "text": string}.
// Errors name the 1-based line number.
std::vector<RawDocument> read_corpus_jsonl(const fs::path& path);
std::string corpus_to_jsonl(const std::vector<RawDocument>& docs);

// One term per line; '#' starts a comment. Entries are normalised with the
// tokenizer's letter rule and lowercasing.
std::unordered_set<std::string> read_term_list(const fs::path& path);

// Vocabulary file: one term per line in index order.
std::string vocabulary_to_text(const Vocabulary& vocab);
Vocabulary read_vocabulary(const fs::path& path);

// Sparse matrix file. First line "V D"; then one line per document:
//   id year nnz term:count term:count ...
// Ids are percent-encoded so they never contain whitespace.
std::string matrix_to_text(const DocTermMatrix& matrix);
DocTermMatrix read_matrix(const fs::path& path);
DocTermMatrix parse_matrix(const std::string& text);

std::string encode_id(const std::string& id);
std::string decode_id(const std::string& encoded);

json model_to_json(const LdaModel& model);
LdaModel model_from_json(const json& j);
std::string model_to_text(const LdaModel& model);
LdaModel read_model(const fs::path& path);

// CSV with columns topic,period,value,n_docs.
std::string series_to_csv(const std::vector<TopicSeries>& series);
std::vector<TopicSeries> read_series_csv(const fs::path& path);

// CSV with columns name,year,count; several indicators may share a file.
std::vector<IndicatorSeries> read_indicators_csv(const fs::path& path);
std::vector<std::string> split_csv_line(const std::string& line);
// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& value);

json trend_to_json(const std::vector<TopicTrend>& results);
std::vector<TopicTrend> trend_from_json(const json& j);
// Table layout: topic,tau,p_value,sen_slope,ci_low,ci_high.
std::string trend_table_csv(const std::vector<TopicTrend>& results);

json lag_to_json(const LagResult& result, const std::string& pattern);
std::string lag_profiles_csv(const std::vector<LagResult>& results);
// One summary row per pair: best lag, peak r, r at lag 0 (empty when lag 0
// was omitted) and the pattern label.
std::string lag_table_csv(const std::vector<LagResult>& results,
                          const std::vector<std::string>& patterns);

json truth_to_json(const SynthCorpus& corpus);

std::string to_text(const json& j);

}  // namespace narrative::io
