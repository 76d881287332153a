#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace sentimix {

struct NGramConfig {
  int n_low = 1;
  int n_high = 1;
  int min_df = 1;  // the minimum occurrence frequency f

  // Enforces 1 <= n_low <= n_high <= 3 and min_df >= 1.
  void validate() const;
  bool operator==(const NGramConfig&) const = default;
};

enum class VectorizerKind : int { Count = 0, OneHot = 1, TfIdf = 2 };
VectorizerKind parse_vectorizer_kind(const std::string& s);
std::string to_string(VectorizerKind kind);

// How min_df counts: per containing document (the default reading) or per
// total occurrence across the corpus.
enum class FreqMode : int { Document = 0, Corpus = 1 };
FreqMode parse_freq_mode(const std::string& s);
std::string to_string(FreqMode mode);

// Column indices 0..size-1 assigned in lexicographic n-gram order.
struct Vocabulary {
  std::vector<std::string> terms;                    // sorted
  std::unordered_map<std::string, std::int32_t> index;

  std::int32_t size() const { return static_cast<std::int32_t>(terms.size()); }
  bool operator==(const Vocabulary& o) const { return terms == o.terms; }
};

struct SparseVector {
  struct Entry {
    std::int32_t col;
    double value;
    bool operator==(const Entry&) const = default;
  };
  // strictly increasing columns, no stored zeros
  std::vector<Entry> entries;

  bool operator==(const SparseVector&) const = default;
};

struct DocTermMatrix {
  std::vector<SparseVector> rows;
  std::int32_t n_cols = 0;

  bool operator==(const DocTermMatrix&) const = default;
};

using TokenDoc = std::vector<std::string>;

// All contiguous n-token windows for each n in [n_low, n_high], in n-major
// position order, words joined by single spaces.
std::vector<std::string> extract_ngrams(const TokenDoc& tokens, const NGramConfig& config);

// N-grams whose document (or corpus, per mode) frequency reaches min_df,
// indexed lexicographically.
Vocabulary fit_vocabulary(const std::vector<TokenDoc>& docs, const NGramConfig& config,
                          FreqMode mode = FreqMode::Document);

// Smoothed idf: ln((1 + N) / (1 + df_t)) + 1. Document frequency regardless
// of the vocabulary's FreqMode.
std::vector<double> fit_idf(const std::vector<TokenDoc>& docs, const Vocabulary& vocab,
                            const NGramConfig& config);

struct FittedVectorizer {
  VectorizerKind kind = VectorizerKind::Count;
  NGramConfig config;
  Vocabulary vocab;
  std::vector<double> idf;  // tfidf only, one weight per column

  nlohmann::json to_json() const;
  static FittedVectorizer from_json(const nlohmann::json& j);
  bool operator==(const FittedVectorizer&) const = default;
};

FittedVectorizer fit_vectorizer(VectorizerKind kind, const std::vector<TokenDoc>& docs,
                                const NGramConfig& config,
                                FreqMode mode = FreqMode::Document);

// count: raw n-gram counts; onehot: presence as 1.0; tfidf: count times idf,
// then the row scaled to unit Euclidean norm (empty rows stay empty).
// N-grams outside the vocabulary are ignored.
SparseVector transform(const FittedVectorizer& fitted, const TokenDoc& tokens);

DocTermMatrix transform_all(const FittedVectorizer& fitted, const std::vector<TokenDoc>& docs);

}  // namespace sentimix
