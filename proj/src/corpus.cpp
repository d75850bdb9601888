#include "narrative/corpus.hpp"

#include <algorithm>
#include <clocale>
#include <cwctype>
#include <locale.h>
#include <map>
#include <numeric>

#include "narrative/errors.hpp"
#include "narrative/rng.hpp"

namespace narrative {
namespace {

// Unicode character classes come from the C.UTF-8 ctype tables, looked up
// through a private locale handle so the global locale is never touched.
class UnicodeClassifier {
 public:
  UnicodeClassifier() {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      loc_ = newlocale(LC_CTYPE_MASK, name, static_cast<locale_t>(nullptr));
      if (loc_ != static_cast<locale_t>(nullptr)) break;
    }
  }
  ~UnicodeClassifier() {
    if (loc_ != static_cast<locale_t>(nullptr)) freelocale(loc_);
  }
  UnicodeClassifier(const UnicodeClassifier&) = delete;
  UnicodeClassifier& operator=(const UnicodeClassifier&) = delete;

  bool is_alpha(char32_t c) const {
    if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (loc_ == static_cast<locale_t>(nullptr)) return false;
    return iswalpha_l(static_cast<wint_t>(c), loc_) != 0;
  }

  char32_t to_lower(char32_t c) const {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
    if (loc_ == static_cast<locale_t>(nullptr)) return c;
    return static_cast<char32_t>(towlower_l(static_cast<wint_t>(c), loc_));
  }

 private:
  locale_t loc_ = static_cast<locale_t>(nullptr);
};

const UnicodeClassifier& classifier() {
  static const UnicodeClassifier instance;
  return instance;
}

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at text[i]; advances i. Malformed
// sequences yield kInvalid and consume a single byte.
char32_t decode_utf8(std::string_view text, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kInvalid;
  }
  if (i + len > text.size()) {
    ++i;
    return kInvalid;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return kInvalid;
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

PreprocessConfig PreprocessConfig::with_default_stopwords() {
  PreprocessConfig config;
  const auto& words = default_stopwords();
  config.stopwords.insert(words.begin(), words.end());
  return config;
}

void PreprocessConfig::validate() const {
  if (min_token_length < 1) throw InvalidConfig("min_token_length must be >= 1");
  if (min_df < 1) throw InvalidConfig("min_df must be >= 1");
  if (!(max_df_fraction > 0.0 && max_df_fraction <= 1.0))
    throw InvalidConfig("max_df_fraction must lie in (0, 1]");
}

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  index_.reserve(terms_.size());
  for (TermId i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second)
      throw InputError("duplicate vocabulary term '" + terms_[i] + "'");
  }
}

TermId Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? static_cast<TermId>(terms_.size()) : it->second;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::string joined;
  for (const auto& t : terms_) {
    joined += t;
    joined += '\n';
  }
  return fnv1a64(joined);
}

DocTermMatrix::DocTermMatrix(std::vector<Document> docs, std::size_t vocab_size)
    : docs_(std::move(docs)), vocab_size_(vocab_size) {
  rows_.reserve(docs_.size());
  expanded_.reserve(docs_.size());
  for (const auto& doc : docs_) {
    if (doc.tokens.empty()) throw InputError("document '" + doc.id + "' has no tokens");
    std::map<TermId, std::uint32_t> counts;
    for (TermId t : doc.tokens) {
      if (t >= vocab_size_)
        throw InputError("document '" + doc.id + "' has a token outside the vocabulary");
      ++counts[t];
    }
    rows_.emplace_back(counts.begin(), counts.end());
    auto& expanded = expanded_.emplace_back();
    expanded.reserve(doc.tokens.size());
    for (const auto& [term, count] : counts) expanded.insert(expanded.end(), count, term);
  }
}

DocTermMatrix DocTermMatrix::from_counts(std::vector<std::string> ids,
                                         std::vector<std::int64_t> periods,
                                         std::vector<SparseRow> rows, std::size_t vocab_size) {
  if (ids.size() != rows.size() || periods.size() != rows.size())
    throw InputError("matrix metadata and rows disagree in length");
  std::vector<Document> docs(rows.size());
  for (std::size_t d = 0; d < rows.size(); ++d) {
    auto& row = rows[d];
    std::sort(row.begin(), row.end());
    docs[d].id = std::move(ids[d]);
    docs[d].period = periods[d];
    for (const auto& [term, count] : row) {
      if (count == 0) throw InputError("zero count in row of document '" + docs[d].id + "'");
      docs[d].tokens.insert(docs[d].tokens.end(), count, term);
    }
  }
  return DocTermMatrix(std::move(docs), vocab_size);
}

std::size_t DocTermMatrix::total_tokens() const {
  return std::accumulate(docs_.begin(), docs_.end(), std::size_t{0},
                         [](std::size_t acc, const Document& d) { return acc + d.tokens.size(); });
}

std::vector<std::int64_t> DocTermMatrix::periods() const {
  std::vector<std::int64_t> out;
  out.reserve(docs_.size());
  for (const auto& d : docs_) out.push_back(d.period);
  return out;
}

std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config) {
  const auto& cls = classifier();
  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;

  auto flush = [&] {
    if (current_len >= config.min_token_length && !config.stopwords.contains(current) &&
        !config.exclusions.contains(current)) {
      tokens.push_back(current);
    }
    current.clear();
    current_len = 0;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = decode_utf8(text, i);
    if (cp != kInvalid && cls.is_alpha(cp)) {
      append_utf8(current, cls.to_lower(cp));
      ++current_len;
    } else if (current_len > 0) {
      flush();
    }
  }
  if (current_len > 0) flush();
  return tokens;
}

Corpus build_corpus(const std::vector<RawDocument>& raw, const PreprocessConfig& config) {
  config.validate();
  {
    std::unordered_set<std::string> seen;
    for (const auto& doc : raw) {
      if (!seen.insert(doc.id).second) throw InputError("duplicate document id '" + doc.id + "'");
    }
  }

  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(raw.size());
  for (const auto& doc : raw) tokenized.push_back(tokenize(doc.text, config));

  std::unordered_map<std::string, std::size_t> doc_freq;
  std::unordered_map<std::string, std::size_t> corpus_freq;
  std::size_t nonempty = 0;
  for (const auto& toks : tokenized) {
    if (toks.empty()) continue;
    ++nonempty;
    std::unordered_set<std::string_view> distinct;
    for (const auto& t : toks) {
      ++corpus_freq[t];
      if (distinct.insert(t).second) ++doc_freq[t];
    }
  }

  const double max_df = config.max_df_fraction * static_cast<double>(nonempty);
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [term, df] : doc_freq) {
    if (df >= config.min_df && static_cast<double>(df) <= max_df)
      kept.emplace_back(term, corpus_freq.at(term));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> terms;
  terms.reserve(kept.size());
  for (auto& [term, freq] : kept) terms.push_back(std::move(term));
  Vocabulary vocab(std::move(terms));

  std::vector<Document> docs;
  std::vector<std::string> dropped;
  for (std::size_t d = 0; d < raw.size(); ++d) {
    Document doc{raw[d].id, raw[d].period, {}};
    for (const auto& t : tokenized[d]) {
      const TermId id = vocab.find(t);
      if (id != vocab.size()) doc.tokens.push_back(id);
    }
    if (doc.tokens.empty()) {
      dropped.push_back(raw[d].id);
    } else {
      docs.push_back(std::move(doc));
    }
  }
  if (docs.empty()) throw AllDocumentsEmpty();

  const std::size_t v = vocab.size();
  return Corpus{std::move(vocab), DocTermMatrix(std::move(docs), v), std::move(dropped)};
}

}  // namespace narrative
