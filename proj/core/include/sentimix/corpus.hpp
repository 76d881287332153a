#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentimix {

enum class Sentiment : int { Negative = 0, Neutral = 1, Positive = 2 };
constexpr int kNumClasses = 3;
constexpr std::array<Sentiment, 3> kAllSentiments = {
    Sentiment::Negative, Sentiment::Neutral, Sentiment::Positive};

// Parse is case-insensitive, serialization is lowercase.
Sentiment parse_sentiment(std::string_view s);
std::string_view to_string(Sentiment s);

enum class LangTag : int { Hin = 0, Eng = 1, Other = 2 };
constexpr int kNumLangTags = 3;

std::string_view to_string(LangTag t);

enum class Split { Train, Validation, Test };
Split parse_split(std::string_view s);
std::string_view to_string(Split s);

struct TaggedToken {
    std::string surface; // non-empty, no tab or newline
    LangTag tag = LangTag::Other;

    bool operator==(const TaggedToken&) const = default;
};

struct Tweet {
    std::string uid;
    std::vector<TaggedToken> tokens;
    std::optional<Sentiment> label;

    bool operator==(const Tweet&) const = default;
};

struct Corpus {
    Split split = Split::Train;
    std::vector<Tweet> tweets;
};

struct CorpusStats {
    std::size_t total_tweets = 0;
    std::array<std::size_t, kNumClasses> per_label{};      // labeled tweets only
    std::array<std::size_t, kNumLangTags> token_count{};   // per LangTag
    std::array<std::size_t, kNumLangTags> unique_words{};  // case-sensitive surfaces
};

// word -> occurrence count; no zero-count entries. Ordered so that every
// iteration over it is deterministic.
using FreqTable = std::map<std::string, std::uint64_t>;

// Maps the tag strings found in corpus files onto LangTag. Lookup is
// case-insensitive; strings not in the map become LangTag::Other.
struct TagAliasMap {
    std::map<std::string, LangTag> aliases; // keys stored lowercase

    static TagAliasMap defaults();
    LangTag resolve(std::string_view raw) const;
};

// Removes every double-quote character (straight and curly forms);
// all other bytes pass through. Throws DecodeError (naming the byte
// offset) if the input is not valid UTF-8.
std::string sanitize_raw(std::string_view raw);

// Tab-separated tweet-per-block format: a tweet starts at a line whose
// first field is "meta" (meta<TAB>uid<TAB>sentiment for labeled splits,
// meta<TAB>uid for test; test also accepts the labeled form) followed by
// one token line (surface<TAB>tag) per token. Blank lines are skipped and
// a leading UTF-8 BOM is stripped.
Corpus parse_corpus(std::string_view text, Split split,
                    const TagAliasMap& tags = TagAliasMap::defaults());

// Canonical serialization of the same format; parse_corpus on the output
// reproduces an equal corpus.
std::string serialize_corpus(const Corpus& corpus);

// Token surfaces joined by single spaces.
std::string consolidate(const Tweet& tweet);

CorpusStats corpus_stats(const Corpus& corpus);

// Per-tag occurrence counts over raw token surfaces.
struct LangFreqTables {
    FreqTable hin;
    FreqTable eng;
};
LangFreqTables lang_freq_tables(const Corpus& corpus);

} // namespace sentimix
