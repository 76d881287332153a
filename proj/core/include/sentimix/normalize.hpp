#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentimix/corpus.hpp"

namespace sentimix {

// Canonical key under which spelling variants of a romanized word collide:
// letter substitutions q->k, z->j, u->o, w->v, then every maximal run of an
// identical letter collapsed to one. Idempotent.
std::string equiv_key(std::string_view word);

// equiv_key plus vowel elision: a, e, i, o removed except word-initial
// (u is already o by then). Words typed with and without vowels collide here.
std::string elision_key(std::string_view word);

// One row of a curated dictionary file: first word is the canonical spelling,
// the rest are variants.
struct CuratedRow {
  std::string canonical;
  std::vector<std::string> variants;  // excludes canonical, deduplicated
};

// Parses curated rows: one cluster per line, words separated by tabs or
// spaces, '#' lines and blank lines skipped. Throws ValueError on words that
// are not lowercase ASCII letters.
std::vector<CuratedRow> parse_curated(const std::string& text);

struct NormalizationDictionary {
  // canonical -> every member of the cluster, canonical included
  std::map<std::string, std::set<std::string>> clusters;
  // variant -> canonical, for every member of every cluster
  std::unordered_map<std::string, std::string> lookup;

  bool operator==(const NormalizationDictionary&) const = default;
};

// Clusters the frequency table's words by equiv_key, merges key groups whose
// elision_key matches when at least one group averages <= 4 letters, and
// picks the most frequent member as canonical (ties: lexicographically
// smallest). Curated rows override the algorithmic clustering for every word
// they mention; a word mentioned in two curated rows is a ValueError.
NormalizationDictionary build_norm_dict(const FreqTable& freq,
                                        const std::vector<CuratedRow>& curated = {});

// Dictionary consisting of exactly the given rows (the on-disk form).
NormalizationDictionary norm_dict_from_rows(const std::vector<CuratedRow>& rows);

// One cluster per line: canonical first, then the remaining members sorted.
std::string serialize_norm_dict(const NormalizationDictionary& dict);

// lookup(word) if present, else word unchanged. Idempotent.
std::string normalize_token(const std::string& word,
                            const NormalizationDictionary& dict);

struct StopwordList {
  std::set<std::string> words;
  bool contains(const std::string& w) const { return words.count(w) != 0; }
  bool operator==(const StopwordList&) const = default;
};

struct Whitelist {
  std::set<std::string> words;
  bool contains(const std::string& w) const { return words.count(w) != 0; }
};

// Short-word stopword candidates: every vocabulary word of 1 to 3 letters
// that is not whitelisted. vocab is expected to be a stage-I3-cleaned
// training vocabulary.
StopwordList derive_stopwords(const std::set<std::string>& vocab,
                              const Whitelist& whitelist);

}  // namespace sentimix
