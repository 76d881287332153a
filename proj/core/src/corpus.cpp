#include "sentimix/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "sentimix/error.hpp"

namespace sentimix {

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Validates UTF-8 well-formedness (continuation structure, no overlongs,
// no surrogates, max U+10FFFF). Returns the byte offset of the first bad
// byte, or npos if clean.
std::size_t find_invalid_utf8(std::string_view s) {
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    std::size_t i = 0, n = s.size();
    while (i < n) {
        unsigned char b = p[i];
        if (b < 0x80) {
            ++i;
            continue;
        }
        std::size_t len;
        std::uint32_t cp, min_cp;
        if ((b & 0xE0) == 0xC0) {
            len = 2; cp = b & 0x1F; min_cp = 0x80;
        } else if ((b & 0xF0) == 0xE0) {
            len = 3; cp = b & 0x0F; min_cp = 0x800;
        } else if ((b & 0xF8) == 0xF0) {
            len = 4; cp = b & 0x07; min_cp = 0x10000;
        } else {
            return i;
        }
        if (i + len > n) return i;
        for (std::size_t k = 1; k < len; ++k) {
            if ((p[i + k] & 0xC0) != 0x80) return i;
            cp = (cp << 6) | (p[i + k] & 0x3F);
        }
        if (cp < min_cp) return i;                    // overlong
        if (cp >= 0xD800 && cp <= 0xDFFF) return i;   // surrogate
        if (cp > 0x10FFFF) return i;
        i += len;
    }
    return std::string_view::npos;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

} // namespace

Sentiment parse_sentiment(std::string_view s) {
    std::string t = lower_ascii(s);
    if (t == "negative") return Sentiment::Negative;
    if (t == "neutral") return Sentiment::Neutral;
    if (t == "positive") return Sentiment::Positive;
    throw ValueError("unrecognized sentiment: '" + std::string(s) + "'");
}

std::string_view to_string(Sentiment s) {
    switch (s) {
        case Sentiment::Negative: return "negative";
        case Sentiment::Neutral: return "neutral";
        case Sentiment::Positive: return "positive";
    }
    return "?";
}

std::string_view to_string(LangTag t) {
    switch (t) {
        case LangTag::Hin: return "Hin";
        case LangTag::Eng: return "Eng";
        case LangTag::Other: return "O";
    }
    return "?";
}

Split parse_split(std::string_view s) {
    std::string t = lower_ascii(s);
    if (t == "train") return Split::Train;
    if (t == "validation" || t == "dev") return Split::Validation;
    if (t == "test") return Split::Test;
    throw ValueError("unrecognized split: '" + std::string(s) + "'");
}

std::string_view to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "?";
}

TagAliasMap TagAliasMap::defaults() {
    TagAliasMap m;
    m.aliases = {
        {"hin", LangTag::Hin},  {"hi", LangTag::Hin},  {"hindi", LangTag::Hin},
        {"eng", LangTag::Eng},  {"en", LangTag::Eng},  {"english", LangTag::Eng},
        {"o", LangTag::Other},  {"other", LangTag::Other},
        {"univ", LangTag::Other},
    };
    return m;
}

LangTag TagAliasMap::resolve(std::string_view raw) const {
    auto it = aliases.find(lower_ascii(raw));
    return it == aliases.end() ? LangTag::Other : it->second;
}

std::string sanitize_raw(std::string_view raw) {
    std::size_t bad = find_invalid_utf8(raw);
    if (bad != std::string_view::npos)
        throw DecodeError("invalid UTF-8 at byte offset " + std::to_string(bad));

    // U+0022 plus the curly double quotes U+201C..U+201F.
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] == '"') {
            ++i;
            continue;
        }
        if (i + 2 < raw.size() && static_cast<unsigned char>(raw[i]) == 0xE2 &&
            static_cast<unsigned char>(raw[i + 1]) == 0x80) {
            unsigned char b3 = static_cast<unsigned char>(raw[i + 2]);
            if (b3 >= 0x9C && b3 <= 0x9F) { // " " „ ‟
                i += 3;
                continue;
            }
        }
        out.push_back(raw[i]);
        ++i;
    }
    return out;
}

Corpus parse_corpus(std::string_view text, Split split, const TagAliasMap& tags) {
    // Leading BOM.
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB &&
        static_cast<unsigned char>(text[2]) == 0xBF)
        text.remove_prefix(3);

    Corpus corpus;
    corpus.split = split;
    const bool labeled_split = split != Split::Test;

    std::set<std::string> seen_uids;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool in_tweet = false;

    while (pos <= text.size()) {
        if (pos == text.size()) break;
        std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        auto fields = split_tabs(line);
        if (fields[0] == "meta") {
            bool ok = labeled_split ? fields.size() == 3
                                    : (fields.size() == 2 || fields.size() == 3);
            if (!ok)
                throw FormatError("line " + std::to_string(line_no) +
                                  ": meta line has " + std::to_string(fields.size()) +
                                  " fields, unexpected for split '" +
                                  std::string(to_string(split)) + "'");
            if (fields[1].empty())
                throw FormatError("line " + std::to_string(line_no) + ": empty uid");
            Tweet tweet;
            tweet.uid = std::string(fields[1]);
            if (fields.size() == 3) tweet.label = parse_sentiment(fields[2]);
            if (!seen_uids.insert(tweet.uid).second)
                throw FormatError("line " + std::to_string(line_no) +
                                  ": duplicate uid '" + tweet.uid + "'");
            corpus.tweets.push_back(std::move(tweet));
            in_tweet = true;
        } else {
            if (!in_tweet)
                throw FormatError("line " + std::to_string(line_no) +
                                  ": token line before any meta line");
            if (fields[0].empty()) continue; // stray tab-only line
            TaggedToken tok;
            tok.surface = std::string(fields[0]);
            tok.tag = fields.size() >= 2 ? tags.resolve(fields[1]) : LangTag::Other;
            corpus.tweets.back().tokens.push_back(std::move(tok));
        }
    }
    return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    for (const Tweet& t : corpus.tweets) {
        out += "meta\t";
        out += t.uid;
        if (t.label) {
            out += '\t';
            out += to_string(*t.label);
        }
        out += '\n';
        for (const TaggedToken& tok : t.tokens) {
            out += tok.surface;
            out += '\t';
            out += to_string(tok.tag);
            out += '\n';
        }
    }
    return out;
}

std::string consolidate(const Tweet& tweet) {
    std::string out;
    for (std::size_t i = 0; i < tweet.tokens.size(); ++i) {
        if (i) out += ' ';
        out += tweet.tokens[i].surface;
    }
    return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats stats;
    stats.total_tweets = corpus.tweets.size();
    std::array<std::set<std::string_view>, kNumLangTags> uniq;
    for (const Tweet& t : corpus.tweets) {
        if (t.label) ++stats.per_label[static_cast<int>(*t.label)];
        for (const TaggedToken& tok : t.tokens) {
            int tag = static_cast<int>(tok.tag);
            ++stats.token_count[tag];
            uniq[tag].insert(tok.surface);
        }
    }
    for (int i = 0; i < kNumLangTags; ++i) stats.unique_words[i] = uniq[i].size();
    return stats;
}

LangFreqTables lang_freq_tables(const Corpus& corpus) {
    LangFreqTables tables;
    for (const Tweet& t : corpus.tweets) {
        for (const TaggedToken& tok : t.tokens) {
            if (tok.tag == LangTag::Hin)
                ++tables.hin[tok.surface];
            else if (tok.tag == LangTag::Eng)
                ++tables.eng[tok.surface];
        }
    }
    return tables;
}

} // namespace sentimix
