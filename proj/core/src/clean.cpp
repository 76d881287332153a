#include "sentimix/clean.hpp"

#include <algorithm>
#include <cctype>

#include "sentimix/error.hpp"
#include "sentimix/porter.hpp"

namespace sentimix {
namespace {

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_alnum(char c) { return is_ascii_letter(c) || (c >= '0' && c <= '9'); }

// The byte form of the text plus, per byte, the index of the tweet token it
// came from (-1 when unknown). Inserted or decoded bytes inherit the source
// of the byte that produced them, so token tags survive the text rewrites.
struct TaggedText {
  std::string text;
  std::vector<std::int32_t> src;

  void push(char c, std::int32_t s) {
    text.push_back(c);
    src.push_back(s);
  }
  void append(std::string_view sv, std::int32_t s) {
    for (char c : sv) push(c, s);
  }
};

TaggedText from_plain(const std::string& text) {
  TaggedText out;
  out.text = text;
  out.src.assign(text.size(), -1);
  return out;
}

TaggedText consolidate_tagged(const Tweet& tweet) {
  TaggedText out;
  for (size_t i = 0; i < tweet.tokens.size(); ++i) {
    if (i > 0) out.push(' ', -1);
    out.append(tweet.tokens[i].surface, static_cast<std::int32_t>(i));
  }
  return out;
}

// Rule 1: @ followed by one or more of [A-Za-z0-9_'] is deleted.
TaggedText remove_mentions(const TaggedText& in) {
  TaggedText out;
  size_t i = 0;
  const std::string& t = in.text;
  while (i < t.size()) {
    if (t[i] == '@') {
      size_t j = i + 1;
      while (j < t.size() && (is_ascii_alnum(t[j]) || t[j] == '_' || t[j] == '\'')) ++j;
      if (j > i + 1) {
        i = j;
        continue;
      }
    }
    out.push(t[i], in.src[i]);
    ++i;
  }
  return out;
}

// Rule 2a: <...> spans are dropped; an unterminated < stays.
TaggedText strip_tags(const TaggedText& in) {
  TaggedText out;
  size_t i = 0;
  const std::string& t = in.text;
  while (i < t.size()) {
    if (t[i] == '<') {
      size_t close = t.find('>', i + 1);
      if (close != std::string::npos) {
        i = close + 1;
        continue;
      }
    }
    out.push(t[i], in.src[i]);
    ++i;
  }
  return out;
}

void encode_utf8(TaggedText& out, std::uint32_t cp, std::int32_t src) {
  if (cp < 0x80) {
    out.push(static_cast<char>(cp), src);
  } else if (cp < 0x800) {
    out.push(static_cast<char>(0xC0 | (cp >> 6)), src);
    out.push(static_cast<char>(0x80 | (cp & 0x3F)), src);
  } else if (cp < 0x10000) {
    out.push(static_cast<char>(0xE0 | (cp >> 12)), src);
    out.push(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)), src);
    out.push(static_cast<char>(0x80 | (cp & 0x3F)), src);
  } else {
    out.push(static_cast<char>(0xF0 | (cp >> 18)), src);
    out.push(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)), src);
    out.push(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)), src);
    out.push(static_cast<char>(0x80 | (cp & 0x3F)), src);
  }
}

// Rule 2b: one left-to-right pass of entity decoding; decoded text is not
// rescanned, so &amp;quot; becomes the literal &quot;.
TaggedText decode_entities(const TaggedText& in) {
  static const std::pair<std::string_view, std::string_view> kNamed[] = {
      {"quot", "\""}, {"amp", "&"}, {"lt", "<"},
      {"gt", ">"},    {"apos", "'"}, {"nbsp", " "},
  };
  TaggedText out;
  size_t i = 0;
  const std::string& t = in.text;
  while (i < t.size()) {
    if (t[i] == '&') {
      size_t semi = t.find(';', i + 1);
      if (semi != std::string::npos && semi > i + 1 && semi - i <= 12) {
        std::string_view body(t.data() + i + 1, semi - i - 1);
        std::int32_t src = in.src[i];
        bool decoded = false;
        for (const auto& [name, rep] : kNamed) {
          if (body == name) {
            out.append(rep, src);
            decoded = true;
            break;
          }
        }
        if (!decoded && body.size() >= 2 && body[0] == '#') {
          std::uint32_t cp = 0;
          bool ok = true;
          if (body[1] == 'x' || body[1] == 'X') {
            ok = body.size() > 2;
            for (size_t p = 2; p < body.size() && ok; ++p) {
              char c = body[p];
              std::uint32_t d;
              if (c >= '0' && c <= '9') d = static_cast<std::uint32_t>(c - '0');
              else if (c >= 'a' && c <= 'f') d = static_cast<std::uint32_t>(c - 'a' + 10);
              else if (c >= 'A' && c <= 'F') d = static_cast<std::uint32_t>(c - 'A' + 10);
              else { ok = false; break; }
              cp = cp * 16 + d;
            }
          } else {
            for (size_t p = 1; p < body.size() && ok; ++p) {
              char c = body[p];
              if (c < '0' || c > '9') { ok = false; break; }
              cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
            }
          }
          if (ok && cp > 0 && cp <= 0x10FFFF) {
            encode_utf8(out, cp, src);
            decoded = true;
          }
        }
        if (decoded) {
          i = semi + 1;
          continue;
        }
      }
    }
    out.push(t[i], in.src[i]);
    ++i;
  }
  return out;
}

// Rule 3a, the space-broken link shape: http, optional s, a run over
// [A-Za-z0-9. ] (spaces included), then '/' and at least one alphanumeric.
TaggedText remove_broken_links(const TaggedText& in) {
  TaggedText out;
  size_t i = 0;
  const std::string& t = in.text;
  auto in_run_class = [](char c) {
    return is_ascii_alnum(c) || c == '.' || c == ' ';
  };
  while (i < t.size()) {
    if (t[i] == 'h' && t.compare(i, 4, "http") == 0) {
      size_t j = i + 4;
      if (j < t.size() && t[j] == 's') ++j;
      size_t run = j;
      while (run < t.size() && in_run_class(t[run])) ++run;
      if (run < t.size() && t[run] == '/') {
        size_t tail = run + 1;
        while (tail < t.size() && is_ascii_alnum(t[tail])) ++tail;
        if (tail > run + 1) {
          i = tail;
          continue;
        }
      }
    }
    out.push(t[i], in.src[i]);
    ++i;
  }
  return out;
}

// Rule 3b, the plain link shape: scheme plus any run of URL characters.
TaggedText remove_links(const TaggedText& in) {
  TaggedText out;
  size_t i = 0;
  const std::string& t = in.text;
  auto is_url_char = [](char c) {
    if (is_ascii_alnum(c)) return true;
    switch (c) {
      case ':': case '/': case '.': case '-': case '_': case '?':
      case '=': case '&': case '%': case '#': case '~': case '+':
        return true;
      default:
        return false;
    }
  };
  while (i < t.size()) {
    if (t[i] == 'h' && t.compare(i, 4, "http") == 0) {
      size_t j = i + 4;
      if (j < t.size() && t[j] == 's') ++j;
      while (j < t.size() && is_url_char(t[j])) ++j;
      i = j;
      continue;
    }
    out.push(t[i], in.src[i]);
    ++i;
  }
  return out;
}

// Rule 4: every byte that is not an ASCII letter becomes a space.
TaggedText letters_only(const TaggedText& in) {
  TaggedText out = in;
  for (char& c : out.text)
    if (!is_ascii_letter(c)) c = ' ';
  return out;
}

// Rule 5: standalone RT and nan dropped, case-sensitively. Runs after rule 4,
// so every token is a pure letter run.
TaggedText drop_marker_words(const TaggedText& in) {
  TaggedText out;
  size_t i = 0;
  const std::string& t = in.text;
  while (i < t.size()) {
    if (t[i] == ' ') {
      out.push(' ', in.src[i]);
      ++i;
      continue;
    }
    size_t j = i;
    while (j < t.size() && t[j] != ' ') ++j;
    std::string_view word(t.data() + i, j - i);
    if (word != "RT" && word != "nan")
      for (size_t p = i; p < j; ++p) out.push(t[p], in.src[p]);
    i = j;
  }
  return out;
}

TaggedText strip_patterns_tagged(TaggedText tt, CleanStage stage) {
  tt = remove_mentions(tt);
  tt = strip_tags(tt);
  tt = decode_entities(tt);
  if (stage >= CleanStage::I2) {
    tt = remove_broken_links(tt);
    tt = remove_links(tt);
  }
  tt = letters_only(tt);
  if (stage >= CleanStage::I2) tt = drop_marker_words(tt);
  return tt;
}

TaggedText demojize_tagged(const TaggedText& in, const EmojiMap& emoji_map) {
  TaggedText out;
  size_t i = 0;
  const std::string& t = in.text;
  while (i < t.size()) {
    size_t longest = 0;
    const std::string* phrase = nullptr;
    size_t cap = std::min(emoji_map.max_key_bytes, t.size() - i);
    for (size_t len = cap; len >= 1; --len) {
      auto it = emoji_map.mapping.find(t.substr(i, len));
      if (it != emoji_map.mapping.end()) {
        longest = len;
        phrase = &it->second;
        break;
      }
    }
    if (phrase) {
      std::int32_t src = in.src[i];
      out.push(' ', src);
      // "face" is dropped from the phrase here, per the stopword treatment
      // of emoji names.
      size_t p = 0;
      bool first = true;
      while (p < phrase->size()) {
        size_t q = phrase->find(' ', p);
        if (q == std::string::npos) q = phrase->size();
        std::string_view word(phrase->data() + p, q - p);
        if (!word.empty() && word != "face") {
          if (!first) out.push(' ', src);
          out.append(word, src);
          first = false;
        }
        p = q + 1;
      }
      out.push(' ', src);
      i += longest;
      continue;
    }
    out.push(t[i], in.src[i]);
    ++i;
  }
  return out;
}

struct TaggedWord {
  std::string word;
  std::int32_t src;
};

std::vector<TaggedWord> tokenize_tagged(const TaggedText& in) {
  std::vector<TaggedWord> out;
  size_t i = 0;
  const std::string& t = in.text;
  while (i < t.size()) {
    if (std::isspace(static_cast<unsigned char>(t[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < t.size() && !std::isspace(static_cast<unsigned char>(t[j]))) ++j;
    out.push_back({t.substr(i, j - i), in.src[i]});
    i = j;
  }
  return out;
}

std::string lower_ascii_word(std::string w) {
  for (char& c : w)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return w;
}

}  // namespace

CleanStage parse_clean_stage(const std::string& s) {
  std::string v = lower_ascii_word(s);
  if (!v.empty() && v[0] == 'i') v.erase(0, 1);
  if (v.size() == 1 && v[0] >= '1' && v[0] <= '5')
    return static_cast<CleanStage>(v[0] - '0');
  throw ValueError("unknown cleaning stage '" + s + "' (expected I1..I5)");
}

std::string to_string(CleanStage stage) {
  return "I" + std::to_string(static_cast<int>(stage));
}

EmojiMap EmojiMap::parse(const std::string& text) {
  EmojiMap out;
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw ValueError("emoji map line " + std::to_string(line_no) +
                       ": expected <emoji><TAB><phrase>");
    std::string key = line.substr(0, tab);
    std::string phrase = line.substr(tab + 1);
    for (char c : phrase)
      if (!(c == ' ' || (c >= 'a' && c <= 'z')))
        throw ValueError("emoji map line " + std::to_string(line_no) +
                         ": phrase must be lowercase ASCII words");
    out.max_key_bytes = std::max(out.max_key_bytes, key.size());
    out.mapping[std::move(key)] = std::move(phrase);
  }
  return out;
}

void CleanConfig::validate() const {
  if (stage >= CleanStage::I3) {
    if (!norm_dict)
      throw ConfigError("stage " + to_string(stage) + " needs a normalization dictionary");
    if (!english_stopwords)
      throw ConfigError("stage " + to_string(stage) + " needs an English stopword set");
  }
  if (stage >= CleanStage::I4 && !hindi_stopwords)
    throw ConfigError("stage " + to_string(stage) + " needs a Hindi stopword list");
  if (stage == CleanStage::I5 && !emoji_map)
    throw ConfigError("stage I5 needs an emoji map");
}

std::string strip_patterns(const std::string& text, CleanStage stage) {
  return strip_patterns_tagged(from_plain(text), stage).text;
}

std::string demojize(const std::string& text, const EmojiMap& emoji_map) {
  return demojize_tagged(from_plain(text), emoji_map).text;
}

std::vector<std::string> clean_tweet(const Tweet& tweet, const CleanConfig& config) {
  config.validate();
  TaggedText tt = consolidate_tagged(tweet);
  if (config.stage == CleanStage::I5) tt = demojize_tagged(tt, *config.emoji_map);
  tt = strip_patterns_tagged(std::move(tt), config.stage);
  std::vector<TaggedWord> words = tokenize_tagged(tt);

  std::vector<std::string> out;
  out.reserve(words.size());
  if (config.stage < CleanStage::I3) {
    for (auto& tw : words)
      if (!tw.word.empty()) out.push_back(std::move(tw.word));
    return out;
  }

  const auto& dict = *config.norm_dict;
  const auto& eng_stop = *config.english_stopwords;
  for (auto& tw : words) {
    std::string w = lower_ascii_word(std::move(tw.word));
    LangTag tag = LangTag::Other;
    if (tw.src >= 0 && static_cast<size_t>(tw.src) < tweet.tokens.size())
      tag = tweet.tokens[static_cast<size_t>(tw.src)].tag;

    std::string normalized = normalize_token(w, dict);
    bool rewritten = normalized != w;
    w = std::move(normalized);
    if (eng_stop.count(w)) continue;
    if (tag == LangTag::Eng && !rewritten) {
      // Stems can land on a dictionary variant or a stopword; one more pass
      // keeps the output a fixpoint of the stage.
      w = normalize_token(porter_stem(w), dict);
      if (eng_stop.count(w)) continue;
    }
    if (w.empty()) continue;
    // Lowercased leftovers of the rule-5 marker ("Nan", "NAN") and rewrites
    // that land on it are dropped so cleaning stays a fixpoint.
    if (w == "nan") continue;
    if (config.stage >= CleanStage::I4 && config.hindi_stopwords->contains(w)) continue;
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<CleanedDoc> clean_corpus(const Corpus& corpus, const CleanConfig& config) {
  config.validate();
  std::vector<CleanedDoc> out;
  out.reserve(corpus.tweets.size());
  for (const auto& tweet : corpus.tweets)
    out.push_back({tweet.uid, tweet.label, clean_tweet(tweet, config)});
  return out;
}

}  // namespace sentimix

