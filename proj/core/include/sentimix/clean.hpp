#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sentimix/corpus.hpp"
#include "sentimix/normalize.hpp"

namespace sentimix {

// Cumulative cleaning iterations: In applies everything In-1 applies, plus
// its own rules.
enum class CleanStage : int { I1 = 1, I2 = 2, I3 = 3, I4 = 4, I5 = 5 };

// Accepts "I3" or "3" (case-insensitive prefix). Throws ValueError otherwise.
CleanStage parse_clean_stage(const std::string& s);
std::string to_string(CleanStage stage);

// Emoji byte sequence -> space-separated lowercase word phrase.
struct EmojiMap {
  std::map<std::string, std::string> mapping;
  size_t max_key_bytes = 0;

  // One entry per line: <emoji><TAB><phrase>. Phrases must be ASCII letters
  // and spaces. '#' lines and blank lines skipped.
  static EmojiMap parse(const std::string& text);
};

// Resources are borrowed, not owned; they are shared across threads and must
// outlive the config. Fields may stay null for stages that do not need them.
struct CleanConfig {
  CleanStage stage = CleanStage::I1;
  const NormalizationDictionary* norm_dict = nullptr;   // stage >= I3
  const std::set<std::string>* english_stopwords = nullptr;  // stage >= I3
  const StopwordList* hindi_stopwords = nullptr;        // stage >= I4
  const EmojiMap* emoji_map = nullptr;                  // stage == I5

  // Throws ConfigError when a resource required by the stage is missing.
  void validate() const;
};

// Pattern removal in fixed order: (1) @-mentions; (2) markup tags, then
// character entities decoded once; (3) stage >= I2: link patterns, the
// space-broken form first, then scheme plus URL characters; (4) every
// non-ASCII-letter byte becomes a space; (5) stage >= I2: standalone RT and
// nan dropped, case-sensitively. Whitespace is not collapsed; tokenization
// takes care of that.
std::string strip_patterns(const std::string& text, CleanStage stage);

// Replaces each mapped emoji with its phrase, spaces around it, the word
// "face" dropped from the phrase. Longest byte sequence wins; unmapped bytes
// pass through.
std::string demojize(const std::string& text, const EmojiMap& emoji_map);

// Full per-tweet pipeline. I5 runs demojize on the consolidated text before
// strip_patterns. At stage >= I3 tokens are lowercased, normalized through
// the dictionary (all tags), filtered against the English stopword set, and
// Porter-stemmed when the token's original LangTag is Eng and the dictionary
// did not rewrite it; stemmer output goes through the dictionary and the
// stopword filter once more so the pipeline is a fixpoint. Stage >= I4 drops
// Hindi stopwords. Output may legitimately be empty.
std::vector<std::string> clean_tweet(const Tweet& tweet, const CleanConfig& config);

struct CleanedDoc {
  std::string uid;
  std::optional<Sentiment> label;
  std::vector<std::string> tokens;

  bool operator==(const CleanedDoc&) const = default;
};

std::vector<CleanedDoc> clean_corpus(const Corpus& corpus, const CleanConfig& config);

}  // namespace sentimix
