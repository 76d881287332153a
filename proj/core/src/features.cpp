#include "sentimix/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sentimix/error.hpp"

namespace sentimix {

void NGramConfig::validate() const {
  if (n_low < 1 || n_low > n_high || n_high > 3)
    throw ValueError("n-gram range must satisfy 1 <= low <= high <= 3, got " +
                     std::to_string(n_low) + "," + std::to_string(n_high));
  if (min_df < 1)
    throw ValueError("min_df must be >= 1, got " + std::to_string(min_df));
}

VectorizerKind parse_vectorizer_kind(const std::string& s) {
  if (s == "count") return VectorizerKind::Count;
  if (s == "onehot") return VectorizerKind::OneHot;
  if (s == "tfidf") return VectorizerKind::TfIdf;
  throw ValueError("unknown vectorizer '" + s + "' (count, onehot, tfidf)");
}

std::string to_string(VectorizerKind kind) {
  switch (kind) {
    case VectorizerKind::Count: return "count";
    case VectorizerKind::OneHot: return "onehot";
    case VectorizerKind::TfIdf: return "tfidf";
  }
  throw ValueError("bad vectorizer kind");
}

FreqMode parse_freq_mode(const std::string& s) {
  if (s == "document") return FreqMode::Document;
  if (s == "corpus") return FreqMode::Corpus;
  throw ValueError("unknown frequency mode '" + s + "' (document, corpus)");
}

std::string to_string(FreqMode mode) {
  return mode == FreqMode::Document ? "document" : "corpus";
}

std::vector<std::string> extract_ngrams(const TokenDoc& tokens, const NGramConfig& config) {
  config.validate();
  std::vector<std::string> out;
  const size_t len = tokens.size();
  for (int n = config.n_low; n <= config.n_high; ++n) {
    if (len < static_cast<size_t>(n)) continue;
    for (size_t start = 0; start + static_cast<size_t>(n) <= len; ++start) {
      std::string gram = tokens[start];
      for (size_t k = 1; k < static_cast<size_t>(n); ++k) {
        gram += ' ';
        gram += tokens[start + k];
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

Vocabulary fit_vocabulary(const std::vector<TokenDoc>& docs, const NGramConfig& config,
                          FreqMode mode) {
  config.validate();
  std::map<std::string, std::int64_t> freq;
  for (const auto& doc : docs) {
    auto grams = extract_ngrams(doc, config);
    if (mode == FreqMode::Document) {
      std::sort(grams.begin(), grams.end());
      grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    }
    for (auto& g : grams) ++freq[std::move(g)];
  }
  Vocabulary vocab;
  for (auto& [gram, count] : freq)
    if (count >= config.min_df) vocab.terms.push_back(gram);
  vocab.index.reserve(vocab.terms.size());
  for (size_t i = 0; i < vocab.terms.size(); ++i)
    vocab.index.emplace(vocab.terms[i], static_cast<std::int32_t>(i));
  return vocab;
}

std::vector<double> fit_idf(const std::vector<TokenDoc>& docs, const Vocabulary& vocab,
                            const NGramConfig& config) {
  std::vector<std::int64_t> df(vocab.terms.size(), 0);
  for (const auto& doc : docs) {
    auto grams = extract_ngrams(doc, config);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (const auto& g : grams) {
      auto it = vocab.index.find(g);
      if (it != vocab.index.end()) ++df[static_cast<size_t>(it->second)];
    }
  }
  const double n = static_cast<double>(docs.size());
  std::vector<double> idf(vocab.terms.size());
  for (size_t t = 0; t < idf.size(); ++t)
    idf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
  return idf;
}

FittedVectorizer fit_vectorizer(VectorizerKind kind, const std::vector<TokenDoc>& docs,
                                const NGramConfig& config, FreqMode mode) {
  FittedVectorizer out;
  out.kind = kind;
  out.config = config;
  out.vocab = fit_vocabulary(docs, config, mode);
  if (kind == VectorizerKind::TfIdf) out.idf = fit_idf(docs, out.vocab, config);
  return out;
}

SparseVector transform(const FittedVectorizer& fitted, const TokenDoc& tokens) {
  std::map<std::int32_t, double> counts;
  for (const auto& g : extract_ngrams(tokens, fitted.config)) {
    auto it = fitted.vocab.index.find(g);
    if (it != fitted.vocab.index.end()) counts[it->second] += 1.0;
  }
  SparseVector out;
  out.entries.reserve(counts.size());
  switch (fitted.kind) {
    case VectorizerKind::Count:
      for (const auto& [col, c] : counts) out.entries.push_back({col, c});
      break;
    case VectorizerKind::OneHot:
      for (const auto& [col, c] : counts) {
        (void)c;
        out.entries.push_back({col, 1.0});
      }
      break;
    case VectorizerKind::TfIdf: {
      double sq = 0.0;
      for (const auto& [col, c] : counts) {
        double v = c * fitted.idf[static_cast<size_t>(col)];
        sq += v * v;
        out.entries.push_back({col, v});
      }
      if (sq > 0.0) {
        double inv = 1.0 / std::sqrt(sq);
        for (auto& e : out.entries) e.value *= inv;
      }
      break;
    }
  }
  return out;
}

DocTermMatrix transform_all(const FittedVectorizer& fitted, const std::vector<TokenDoc>& docs) {
  DocTermMatrix out;
  out.n_cols = fitted.vocab.size();
  out.rows.reserve(docs.size());
  for (const auto& doc : docs) out.rows.push_back(transform(fitted, doc));
  return out;
}

nlohmann::json FittedVectorizer::to_json() const {
  nlohmann::json j;
  j["format"] = "sentimix.vectorizer";
  j["version"] = 1;
  j["kind"] = sentimix::to_string(kind);
  j["ngrams"] = {config.n_low, config.n_high};
  j["min_df"] = config.min_df;
  j["vocab"] = vocab.terms;
  if (kind == VectorizerKind::TfIdf) j["idf"] = idf;
  return j;
}

FittedVectorizer FittedVectorizer::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "sentimix.vectorizer")
    throw FormatError("not a vectorizer file");
  if (j.value("version", 0) != 1)
    throw FormatError("unsupported vectorizer version");
  FittedVectorizer out;
  out.kind = parse_vectorizer_kind(j.at("kind").get<std::string>());
  out.config.n_low = j.at("ngrams").at(0).get<int>();
  out.config.n_high = j.at("ngrams").at(1).get<int>();
  out.config.min_df = j.at("min_df").get<int>();
  out.config.validate();
  out.vocab.terms = j.at("vocab").get<std::vector<std::string>>();
  for (size_t i = 0; i < out.vocab.terms.size(); ++i)
    out.vocab.index.emplace(out.vocab.terms[i], static_cast<std::int32_t>(i));
  if (out.kind == VectorizerKind::TfIdf) {
    out.idf = j.at("idf").get<std::vector<double>>();
    if (out.idf.size() != out.vocab.terms.size())
      throw FormatError("idf length does not match vocabulary");
  }
  return out;
}

}  // namespace sentimix
