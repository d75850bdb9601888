#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace narrative {

using TermId = std::uint32_t;

struct RawDocument {
  std::string id;
  std::int64_t period = 0;
  std::string text;
};

struct PreprocessConfig {
  std::unordered_set<std::string> stopwords;
  // Extra corpus-specific terms to drop (e.g. generic academic vocabulary).
  std::unordered_set<std::string> exclusions;
  std::size_t min_token_length = 2;
  // A term survives pruning when min_df <= df <= max_df_fraction * D, where
  // D counts documents that still had tokens after tokenization.
  std::size_t min_df = 5;
  double max_df_fraction = 0.5;

  // Built-in English stopword list, no pruning overrides.
  static PreprocessConfig with_default_stopwords();
  void validate() const;
};

const std::vector<std::string>& default_stopwords();

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> terms);

  std::size_t size() const { return terms_.size(); }
  const std::string& term(TermId id) const { return terms_.at(id); }
  const std::vector<std::string>& terms() const { return terms_; }
  // Returns size() when the term is unknown.
  TermId find(std::string_view term) const;
  bool contains(std::string_view term) const { return find(term) != size(); }

  // FNV-1a over the newline-joined terms; ties a model file to its vocabulary.
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> index_;
};

struct Document {
  std::string id;
  std::int64_t period = 0;
  std::vector<TermId> tokens;
};

// Sparse counts for one document, sorted by ascending term id.
using SparseRow = std::vector<std::pair<TermId, std::uint32_t>>;

class DocTermMatrix {
 public:
  DocTermMatrix() = default;
  DocTermMatrix(std::vector<Document> docs, std::size_t vocab_size);
  // Rebuild from counts alone (deserialized form). Token sequences are the
  // counts expanded in ascending term order.
  static DocTermMatrix from_counts(std::vector<std::string> ids, std::vector<std::int64_t> periods,
                                   std::vector<SparseRow> rows, std::size_t vocab_size);

  std::size_t num_docs() const { return docs_.size(); }
  std::size_t vocab_size() const { return vocab_size_; }
  const std::vector<Document>& docs() const { return docs_; }
  const Document& doc(std::size_t d) const { return docs_.at(d); }
  const SparseRow& row(std::size_t d) const { return rows_.at(d); }
  // Tokens of row d expanded from the counts in ascending term order. The
  // sampler walks this order, so a matrix read back from disk samples
  // identically to the one built in memory.
  const std::vector<TermId>& sampling_order(std::size_t d) const { return expanded_.at(d); }
  std::size_t doc_length(std::size_t d) const { return docs_.at(d).tokens.size(); }
  std::size_t total_tokens() const;
  std::vector<std::int64_t> periods() const;

 private:
  std::vector<Document> docs_;
  std::vector<SparseRow> rows_;
  std::vector<std::vector<TermId>> expanded_;
  std::size_t vocab_size_ = 0;
};

struct Corpus {
  Vocabulary vocabulary;
  DocTermMatrix matrix;
  std::vector<std::string> dropped;
};

// Maximal runs of Unicode letters, lowercased; stopwords, exclusions and
// short tokens removed. No stemming.
std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config);

Corpus build_corpus(const std::vector<RawDocument>& raw, const PreprocessConfig& config);

}  // namespace narrative
