#include "sentimix/normalize.hpp"

#include <algorithm>

#include "sentimix/error.hpp"

namespace sentimix {
namespace {

bool is_lower_word(std::string_view w) {
  if (w.empty()) return false;
  for (char c : w)
    if (c < 'a' || c > 'z') return false;
  return true;
}

char substitute(char c) {
  switch (c) {
    case 'q': return 'k';
    case 'z': return 'j';
    case 'u': return 'o';
    case 'w': return 'v';
    default: return c;
  }
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o'; }

}  // namespace

std::string equiv_key(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (char raw : word) {
    char c = substitute(raw);
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  return out;
}

std::string elision_key(std::string_view word) {
  std::string eq = equiv_key(word);
  std::string out;
  out.reserve(eq.size());
  for (size_t i = 0; i < eq.size(); ++i) {
    if (i > 0 && is_vowel(eq[i])) continue;
    out.push_back(eq[i]);
  }
  return out;
}

std::vector<CuratedRow> parse_curated(const std::string& text) {
  std::vector<CuratedRow> rows;
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> words;
    std::string cur;
    for (char c : line) {
      if (c == '\t' || c == ' ') {
        if (!cur.empty()) words.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    if (words.empty() || words.front()[0] == '#') continue;

    CuratedRow row;
    std::set<std::string> seen;
    for (auto& w : words) {
      if (!is_lower_word(w))
        throw ValueError("curated dictionary line " + std::to_string(line_no) +
                         ": '" + w + "' is not a lowercase ASCII word");
      if (!seen.insert(w).second) continue;
      if (row.canonical.empty())
        row.canonical = w;
      else
        row.variants.push_back(w);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

// Verifies no word appears in two rows; returns word -> owning row index.
std::unordered_map<std::string, size_t> row_membership(
    const std::vector<CuratedRow>& rows) {
  std::unordered_map<std::string, size_t> owner;
  for (size_t r = 0; r < rows.size(); ++r) {
    auto claim = [&](const std::string& w) {
      auto [it, fresh] = owner.emplace(w, r);
      if (!fresh && it->second != r)
        throw ValueError("curated dictionary places '" + w +
                         "' in two clusters");
    };
    claim(rows[r].canonical);
    for (const auto& v : rows[r].variants) claim(v);
  }
  return owner;
}

struct Cluster {
  std::set<std::string> members;
  std::string canonical;  // filled by pick_canonical
};

void pick_canonical(Cluster& c, const FreqTable& freq) {
  std::uint64_t best = 0;
  c.canonical.clear();
  for (const auto& w : c.members) {
    std::uint64_t f = 0;
    if (auto it = freq.find(w); it != freq.end()) f = it->second;
    if (c.canonical.empty() || f > best) {
      best = f;
      c.canonical = w;  // members iterate sorted, so ties keep the smallest
    }
  }
}

}  // namespace

NormalizationDictionary build_norm_dict(const FreqTable& freq,
                                        const std::vector<CuratedRow>& curated) {
  if (freq.empty()) throw ValueError("frequency table is empty");
  for (const auto& [w, f] : freq) {
    (void)f;
    if (!is_lower_word(w))
      throw ValueError("frequency table word '" + w +
                       "' is not a lowercase ASCII word");
  }
  auto curated_owner = row_membership(curated);

  // Group by equiv_key, then bucket groups by elision_key. A bucket merges
  // into a single cluster when any of its groups averages <= 4 letters (the
  // short-form heuristic); otherwise each group stands alone.
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& [w, f] : freq) {
    (void)f;
    groups[equiv_key(w)].push_back(w);
  }
  std::map<std::string, std::vector<const std::vector<std::string>*>> buckets;
  for (const auto& [key, words] : groups) buckets[elision_key(key)].push_back(&words);

  std::vector<Cluster> clusters;
  for (const auto& [key, members] : buckets) {
    (void)key;
    bool any_short = false;
    for (const auto* g : members) {
      size_t total = 0;
      for (const auto& w : *g) total += w.size();
      if (static_cast<double>(total) <= 4.0 * static_cast<double>(g->size()))
        any_short = true;
    }
    if (any_short && members.size() > 1) {
      Cluster c;
      for (const auto* g : members) c.members.insert(g->begin(), g->end());
      clusters.push_back(std::move(c));
    } else {
      for (const auto* g : members) {
        Cluster c;
        c.members.insert(g->begin(), g->end());
        clusters.push_back(std::move(c));
      }
    }
  }

  // Curated rows override: pull every mentioned word out of its algorithmic
  // cluster, then add the curated clusters verbatim.
  for (auto& c : clusters) {
    for (auto it = c.members.begin(); it != c.members.end();) {
      if (curated_owner.count(*it))
        it = c.members.erase(it);
      else
        ++it;
    }
  }
  std::erase_if(clusters, [](const Cluster& c) { return c.members.empty(); });
  for (auto& c : clusters) pick_canonical(c, freq);

  for (const auto& row : curated) {
    Cluster c;
    c.canonical = row.canonical;
    c.members.insert(row.canonical);
    c.members.insert(row.variants.begin(), row.variants.end());
    clusters.push_back(std::move(c));
  }

  NormalizationDictionary dict;
  for (auto& c : clusters) {
    auto [it, fresh] = dict.clusters.emplace(c.canonical, std::move(c.members));
    if (!fresh)
      throw ValueError("two clusters share the canonical word '" +
                       it->first + "'");
    for (const auto& w : it->second) dict.lookup[w] = c.canonical;
  }
  return dict;
}

NormalizationDictionary norm_dict_from_rows(const std::vector<CuratedRow>& rows) {
  row_membership(rows);
  NormalizationDictionary dict;
  for (const auto& row : rows) {
    auto& members = dict.clusters[row.canonical];
    members.insert(row.canonical);
    members.insert(row.variants.begin(), row.variants.end());
    for (const auto& w : members) dict.lookup[w] = row.canonical;
  }
  return dict;
}

std::string serialize_norm_dict(const NormalizationDictionary& dict) {
  std::string out;
  for (const auto& [canonical, members] : dict.clusters) {
    out += canonical;
    for (const auto& w : members) {
      if (w == canonical) continue;
      out += '\t';
      out += w;
    }
    out += '\n';
  }
  return out;
}

std::string normalize_token(const std::string& word,
                            const NormalizationDictionary& dict) {
  auto it = dict.lookup.find(word);
  return it == dict.lookup.end() ? word : it->second;
}

StopwordList derive_stopwords(const std::set<std::string>& vocab,
                              const Whitelist& whitelist) {
  StopwordList out;
  for (const auto& w : vocab) {
    if (w.size() < 1 || w.size() > 3) continue;
    if (whitelist.contains(w)) continue;
    out.words.insert(w);
  }
  return out;
}

}  // namespace sentimix
