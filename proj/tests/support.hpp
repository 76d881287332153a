// Shared test helpers: fixture paths, an independent dense vectorizer used as
// the oracle for the sparse implementation, and small builders for matrices
// and corpora.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sentimix/corpus.hpp"
#include "sentimix/features.hpp"
#include "sentimix/models.hpp"

#ifndef SENTIMIX_FIXTURE_DIR
#define SENTIMIX_FIXTURE_DIR "tests/fixtures"
#endif
#ifndef SENTIMIX_REPO_DATA_DIR
#define SENTIMIX_REPO_DATA_DIR "data"
#endif

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(SENTIMIX_FIXTURE_DIR) + "/" + name;
}

inline std::string data_path(const std::string& name) {
  return std::string(SENTIMIX_REPO_DATA_DIR) + "/" + name;
}

// ------------------------------------------------------------------ oracle --
// Deliberately naive dense re-implementation of the vectorizer family. Shares
// no code with the library: n-grams via nested loops, vocabulary via std::set,
// dense rows, textbook idf and norm.

struct DenseFit {
  std::vector<std::string> terms;  // sorted
  std::vector<double> idf;         // tfidf only
  std::vector<std::vector<double>> rows;
};

inline std::vector<std::string> dense_ngrams(const std::vector<std::string>& doc,
                                             int n_low, int n_high) {
  std::vector<std::string> out;
  for (int n = n_low; n <= n_high; ++n) {
    if (doc.size() < static_cast<size_t>(n)) continue;
    for (size_t i = 0; i + n <= doc.size(); ++i) {
      std::string g = doc[i];
      for (int j = 1; j < n; ++j) {
        g += ' ';
        g += doc[i + j];
      }
      out.push_back(g);
    }
  }
  return out;
}

inline DenseFit dense_vectorize(const std::vector<std::vector<std::string>>& docs,
                                sentimix::VectorizerKind kind, int n_low, int n_high,
                                int min_df, sentimix::FreqMode mode) {
  using sentimix::FreqMode;
  using sentimix::VectorizerKind;
  std::map<std::string, int> doc_freq;
  std::map<std::string, int> corpus_freq;
  for (const auto& d : docs) {
    std::set<std::string> seen;
    for (const auto& g : dense_ngrams(d, n_low, n_high)) {
      ++corpus_freq[g];
      seen.insert(g);
    }
    for (const auto& g : seen) ++doc_freq[g];
  }
  DenseFit fit;
  const auto& gate = mode == FreqMode::Document ? doc_freq : corpus_freq;
  for (const auto& [term, freq] : gate)
    if (freq >= min_df) fit.terms.push_back(term);
  std::sort(fit.terms.begin(), fit.terms.end());

  if (kind == VectorizerKind::TfIdf) {
    const double n_docs = static_cast<double>(docs.size());
    for (const auto& term : fit.terms) {
      const auto it = doc_freq.find(term);
      const double df = it == doc_freq.end() ? 0.0 : static_cast<double>(it->second);
      fit.idf.push_back(std::log((1.0 + n_docs) / (1.0 + df)) + 1.0);
    }
  }

  for (const auto& d : docs) {
    std::vector<double> row(fit.terms.size(), 0.0);
    for (const auto& g : dense_ngrams(d, n_low, n_high)) {
      const auto it = std::lower_bound(fit.terms.begin(), fit.terms.end(), g);
      if (it == fit.terms.end() || *it != g) continue;
      row[static_cast<size_t>(it - fit.terms.begin())] += 1.0;
    }
    if (kind == VectorizerKind::OneHot) {
      for (double& v : row) v = v > 0.0 ? 1.0 : 0.0;
    } else if (kind == VectorizerKind::TfIdf) {
      double sq = 0.0;
      for (size_t c = 0; c < row.size(); ++c) {
        row[c] *= fit.idf[c];
        sq += row[c] * row[c];
      }
      if (sq > 0.0)
        for (double& v : row) v /= std::sqrt(sq);
    }
    fit.rows.push_back(std::move(row));
  }
  return fit;
}

inline std::vector<double> to_dense(const sentimix::SparseVector& v, size_t n_cols) {
  std::vector<double> out(n_cols, 0.0);
  for (const auto& e : v.entries) out[static_cast<size_t>(e.col)] = e.value;
  return out;
}

// ---------------------------------------------------------------- builders --

inline sentimix::SparseVector sv(std::initializer_list<std::pair<int, double>> entries) {
  sentimix::SparseVector v;
  for (const auto& [col, value] : entries) v.entries.push_back({col, value});
  return v;
}

// Dense row-major literal to DocTermMatrix; zeros are not stored.
inline sentimix::DocTermMatrix matrix(const std::vector<std::vector<double>>& rows) {
  sentimix::DocTermMatrix m;
  for (const auto& r : rows) {
    sentimix::SparseVector v;
    for (size_t c = 0; c < r.size(); ++c)
      if (r[c] != 0.0) v.entries.push_back({static_cast<std::int32_t>(c), r[c]});
    m.rows.push_back(std::move(v));
    m.n_cols = std::max(m.n_cols, static_cast<std::int32_t>(r.size()));
  }
  return m;
}

inline std::vector<sentimix::Sentiment> labels(std::initializer_list<int> ys) {
  std::vector<sentimix::Sentiment> out;
  for (int y : ys) out.push_back(static_cast<sentimix::Sentiment>(y));
  return out;
}

inline sentimix::Tweet tweet(const std::string& uid,
                             std::initializer_list<std::pair<const char*, sentimix::LangTag>> toks,
                             std::optional<sentimix::Sentiment> label = std::nullopt) {
  sentimix::Tweet t;
  t.uid = uid;
  t.label = label;
  for (const auto& [surface, tag] : toks) t.tokens.push_back({surface, tag});
  return t;
}

}  // namespace testsupport
