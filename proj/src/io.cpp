#include "narrative/io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "narrative/errors.hpp"

namespace narrative::io {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

template <typename T>
T parse_number(const std::string& s, const std::string& context) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) throw InputError(context + ": cannot parse '" + s + "'");
  return value;
}

double parse_double(const std::string& s, const std::string& context) {
  const std::string t = trim(s);
  if (t.empty()) throw InputError(context + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw InputError(context + ": cannot parse '" + t + "'");
  return v;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, x);
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError("bad hexadecimal fingerprint '" + s + "'");
  return v;
}

json matrix_rows(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < cols; ++c) row.push_back(flat[r * cols + c]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> flatten_rows(const json& rows, std::size_t n_rows, std::size_t n_cols,
                                 const char* name) {
  if (!rows.is_array() || rows.size() != n_rows)
    throw InputError(std::string("model field '") + name + "' has the wrong number of rows");
  std::vector<double> flat;
  flat.reserve(n_rows * n_cols);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != n_cols)
      throw InputError(std::string("model field '") + name + "' has a row of the wrong length");
    for (const auto& x : row) flat.push_back(x.get<double>());
  }
  return flat;
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw InputError("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<RawDocument> read_corpus_jsonl(const fs::path& path) {
  const auto lines = lines_of(read_text(path));
  std::vector<RawDocument> docs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    if (trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw InputError(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw InputError(where + ": expected a JSON object");
    if (!j.contains("id") || !j["id"].is_string())
      throw InputError(where + ": field 'id' must be a string");
    if (!j.contains("year") || !j["year"].is_number_integer())
      throw InputError(where + ": field 'year' must be an integer");
    if (!j.contains("text") || !j["text"].is_string())
      throw InputError(where + ": field 'text' must be a string");
    docs.push_back({j["id"].get<std::string>(), j["year"].get<std::int64_t>(),
                    j["text"].get<std::string>()});
    if (docs.back().id.empty()) throw InputError(where + ": empty document id");
  }
  return docs;
}

std::string corpus_to_jsonl(const std::vector<RawDocument>& docs) {
  std::string out;
  for (const auto& d : docs) {
    json j;
    j["id"] = d.id;
    j["year"] = d.period;
    j["text"] = d.text;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::unordered_set<std::string> read_term_list(const fs::path& path) {
  PreprocessConfig bare;
  bare.min_token_length = 1;
  std::unordered_set<std::string> terms;
  for (auto line : lines_of(read_text(path))) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (auto& t : tokenize(line, bare)) terms.insert(std::move(t));
  }
  return terms;
}

std::string vocabulary_to_text(const Vocabulary& vocab) {
  std::string out;
  for (const auto& t : vocab.terms()) {
    out += t;
    out += '\n';
  }
  return out;
}

Vocabulary read_vocabulary(const fs::path& path) {
  std::vector<std::string> terms;
  for (auto& line : lines_of(read_text(path))) {
    if (line.empty()) throw InputError(path.string() + ": blank line in vocabulary");
    terms.push_back(std::move(line));
  }
  return Vocabulary(std::move(terms));
}

std::string encode_id(const std::string& id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    if (c <= 0x20 || c == '%' || c == 0x7F) {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string decode_id(const std::string& encoded) {
  std::string out;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] != '%') {
      out += encoded[i];
      continue;
    }
    if (i + 2 >= encoded.size())
      throw InputError("truncated escape in id '" + encoded + "'");
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(encoded.data() + i + 1, encoded.data() + i + 3, value, 16);
    if (ec != std::errc() || ptr != encoded.data() + i + 3)
      throw InputError("bad escape in id '" + encoded + "'");
    out += static_cast<char>(value);
    i += 2;
  }
  return out;
}

std::string matrix_to_text(const DocTermMatrix& matrix) {
  std::string out = std::to_string(matrix.vocab_size()) + " " + std::to_string(matrix.num_docs()) + "\n";
  for (std::size_t d = 0; d < matrix.num_docs(); ++d) {
    const auto& doc = matrix.doc(d);
    const auto& row = matrix.row(d);
    out += encode_id(doc.id) + " " + std::to_string(doc.period) + " " + std::to_string(row.size());
    for (const auto& [term, count] : row) {
      out += ' ';
      out += std::to_string(term);
      out += ':';
      out += std::to_string(count);
    }
    out += '\n';
  }
  return out;
}

DocTermMatrix parse_matrix(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw InputError("matrix file is empty");
  std::istringstream header(lines[0]);
  std::size_t V = 0, D = 0;
  if (!(header >> V >> D)) throw InputError("matrix line 1: expected 'V D'");

  std::vector<std::string> ids;
  std::vector<std::int64_t> periods;
  std::vector<SparseRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = "matrix line " + std::to_string(i + 1);
    std::istringstream in(lines[i]);
    std::string id, year, nnz_text;
    if (!(in >> id >> year >> nnz_text)) throw InputError(where + ": expected 'id year nnz'");
    const auto nnz = parse_number<std::size_t>(nnz_text, where);
    SparseRow row;
    std::string pair;
    while (in >> pair) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw InputError(where + ": expected term:count");
      const auto term = parse_number<TermId>(pair.substr(0, colon), where);
      const auto count = parse_number<std::uint32_t>(pair.substr(colon + 1), where);
      if (term >= V) throw InputError(where + ": term index out of range");
      if (count == 0) throw InputError(where + ": zero count");
      row.emplace_back(term, count);
    }
    if (row.size() != nnz) throw InputError(where + ": nnz does not match the pair count");
    ids.push_back(decode_id(id));
    periods.push_back(parse_number<std::int64_t>(year, where));
    rows.push_back(std::move(row));
  }
  if (rows.size() != D) throw InputError("matrix header promises " + std::to_string(D) + " documents");
  return DocTermMatrix::from_counts(std::move(ids), std::move(periods), std::move(rows), V);
}

DocTermMatrix read_matrix(const fs::path& path) { return parse_matrix(read_text(path)); }

json model_to_json(const LdaModel& model) {
  const auto& c = model.config;
  json j;
  j["format"] = "narrative-lda-model";
  j["format_version"] = 1;
  j["config"] = {{"K", c.num_topics}, {"alpha", c.alpha},     {"eta", c.eta},
                 {"burn_in", c.burn_in}, {"samples", c.samples}, {"thin", c.thin},
                 {"seed", c.seed}};
  j["sweeps"] = model.sweeps;
  j["num_docs"] = model.num_docs;
  j["vocab_size"] = model.vocab_size;
  j["vocab_fingerprint"] = hex64(model.vocab_fingerprint);
  j["theta"] = matrix_rows(model.theta, model.num_docs, c.num_topics);
  j["beta"] = matrix_rows(model.beta, c.num_topics, model.vocab_size);
  return j;
}

LdaModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "narrative-lda-model")
      throw InputError("not a model file");
    LdaModel m;
    const auto& c = j.at("config");
    m.config.num_topics = c.at("K").get<std::size_t>();
    m.config.alpha = c.at("alpha").get<double>();
    m.config.eta = c.at("eta").get<double>();
    m.config.burn_in = c.at("burn_in").get<std::size_t>();
    m.config.samples = c.at("samples").get<std::size_t>();
    m.config.thin = c.at("thin").get<std::size_t>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.validate();
    m.sweeps = j.at("sweeps").get<std::size_t>();
    m.num_docs = j.at("num_docs").get<std::size_t>();
    m.vocab_size = j.at("vocab_size").get<std::size_t>();
    m.vocab_fingerprint = parse_hex64(j.at("vocab_fingerprint").get<std::string>());
    m.theta = flatten_rows(j.at("theta"), m.num_docs, m.config.num_topics, "theta");
    m.beta = flatten_rows(j.at("beta"), m.config.num_topics, m.vocab_size, "beta");
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

std::string model_to_text(const LdaModel& model) { return to_text(model_to_json(model)); }

LdaModel read_model(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
  return model_from_json(j);
}

std::string series_to_csv(const std::vector<TopicSeries>& series) {
  std::string out = "topic,period,value,n_docs\n";
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out += std::to_string(s.topic) + "," + std::to_string(p.period) + "," +
             format_double(p.value) + "," + std::to_string(p.n_docs) + "\n";
    }
  }
  return out;
}

std::vector<TopicSeries> read_series_csv(const fs::path& path) {
  const auto lines = lines_of(read_text(path));
  if (lines.empty() || trim(lines[0]) != "topic,period,value,n_docs")
    throw InputError(path.string() + ": expected header 'topic,period,value,n_docs'");
  std::map<std::size_t, TopicSeries> by_topic;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 4) throw InputError(where + ": expected 4 fields");
    const auto topic = parse_number<std::size_t>(trim(f[0]), where);
    auto& s = by_topic[topic];
    s.topic = topic;
    s.points.push_back({parse_number<std::int64_t>(trim(f[1]), where), parse_double(f[2], where),
                        parse_number<std::size_t>(trim(f[3]), where)});
  }
  std::vector<TopicSeries> out;
  for (auto& [topic, s] : by_topic) {
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw InputError("unterminated quote in CSV line");
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<IndicatorSeries> read_indicators_csv(const fs::path& path) {
  const auto lines = lines_of(read_text(path));
  if (lines.empty() || trim(lines[0]) != "name,year,count")
    throw InputError(path.string() + ": expected header 'name,year,count'");
  std::vector<IndicatorSeries> out;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 3) throw InputError(where + ": expected 3 fields");
    const std::string name = trim(f[0]);
    if (name.empty()) throw InputError(where + ": empty indicator name");
    auto [it, inserted] = slot.emplace(name, out.size());
    if (inserted) out.push_back({name, {}});
    out[it->second].points.push_back(
        {parse_number<std::int64_t>(trim(f[1]), where), parse_double(f[2], where)});
  }
  for (auto& s : out) {
    std::stable_sort(s.points.begin(), s.points.end(),
                     [](const auto& a, const auto& b) { return a.period < b.period; });
    s.validate();
  }
  return out;
}

json trend_to_json(const std::vector<TopicTrend>& results) {
  json arr = json::array();
  for (const auto& [topic, r] : results) {
    arr.push_back({{"topic", topic},       {"n", r.n},
                   {"S", r.S},             {"tau", r.tau},
                   {"var_S", r.var_S},     {"z", r.z},
                   {"p_value", r.p_value}, {"sen_slope", r.sen_slope},
                   {"ci_low", r.ci_low},   {"ci_high", r.ci_high},
                   {"small_sample", r.small_sample}});
  }
  return arr;
}

std::vector<TopicTrend> trend_from_json(const json& j) {
  std::vector<TopicTrend> out;
  try {
    for (const auto& e : j) {
      TopicTrend t;
      t.topic = e.at("topic").get<std::size_t>();
      auto& r = t.result;
      r.n = e.at("n").get<std::size_t>();
      r.S = e.at("S").get<std::int64_t>();
      r.tau = e.at("tau").get<double>();
      r.var_S = e.at("var_S").get<double>();
      r.z = e.at("z").get<double>();
      r.p_value = e.at("p_value").get<double>();
      r.sen_slope = e.at("sen_slope").get<double>();
      r.ci_low = e.at("ci_low").get<double>();
      r.ci_high = e.at("ci_high").get<double>();
      r.small_sample = e.at("small_sample").get<bool>();
      out.push_back(t);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed trend file: ") + e.what());
  }
  return out;
}

std::string trend_table_csv(const std::vector<TopicTrend>& results) {
  std::string out = "topic,tau,p_value,sen_slope,ci_low,ci_high\n";
  for (const auto& [topic, r] : results) {
    out += std::to_string(topic) + "," + format_double(r.tau) + "," + format_double(r.p_value) +
           "," + format_double(r.sen_slope) + "," + format_double(r.ci_low) + "," +
           format_double(r.ci_high) + "\n";
  }
  return out;
}

json lag_to_json(const LagResult& result, const std::string& pattern) {
  json profile = json::array();
  for (const auto& p : result.profile)
    profile.push_back({{"lag", p.lag}, {"r", p.r}, {"overlap", p.overlap}});
  json j;
  j["topic"] = result.topic;
  j["indicator"] = result.indicator;
  j["best_lag"] = result.best_lag;
  j["max_corr"] = result.max_corr;
  j["corr_at_zero"] = result.corr_at_zero ? json(*result.corr_at_zero) : json(nullptr);
  j["pattern"] = pattern;
  j["all_negative"] = result.all_negative;
  j["notes"] = result.notes;
  j["profile"] = std::move(profile);
  return j;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string lag_profiles_csv(const std::vector<LagResult>& results) {
  std::string out = "topic,indicator,lag,r,overlap\n";
  for (const auto& r : results) {
    for (const auto& p : r.profile) {
      out += std::to_string(r.topic) + "," + csv_field(r.indicator) + "," + std::to_string(p.lag) +
             "," + format_double(p.r) + "," + std::to_string(p.overlap) + "\n";
    }
  }
  return out;
}

std::string lag_table_csv(const std::vector<LagResult>& results,
                          const std::vector<std::string>& patterns) {
  std::string out = "topic,indicator,best_lag,max_corr,corr_at_zero,pattern\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out += std::to_string(r.topic) + "," + csv_field(r.indicator) + "," + std::to_string(r.best_lag) +
           "," + format_double(r.max_corr) + "," +
           (r.corr_at_zero ? format_double(*r.corr_at_zero) : std::string()) + "," +
           csv_field(patterns.at(i)) + "\n";
  }
  return out;
}

json truth_to_json(const SynthCorpus& corpus) {
  const auto& t = corpus.truth;
  json j;
  j["format"] = "narrative-synth-truth";
  j["beta"] = t.beta;
  json periods = json::array();
  for (std::size_t i = 0; i < t.periods.size(); ++i) {
    periods.push_back({{"period", t.periods[i]},
                       {"alpha", t.alpha_profile[i]},
                       {"expected_prevalence", t.expected_prevalence[i]}});
  }
  j["periods"] = std::move(periods);
  json docs = json::array();
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    docs.push_back({{"id", corpus.documents[d].id},
                    {"year", corpus.documents[d].period},
                    {"theta", t.theta[d]}});
  }
  j["documents"] = std::move(docs);
  return j;
}

std::string to_text(const json& j) { return j.dump(1) + "\n"; }

}  // namespace narrative::io
