#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentimix/clean.hpp"
#include "sentimix/corpus.hpp"
#include "sentimix/features.hpp"
#include "sentimix/normalize.hpp"

namespace sentimix {

// Whole-file reads and writes; failures raise Error naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// sanitize_raw + parse_corpus / serialize_corpus on disk.
Corpus load_corpus(const std::string& path, Split split);
void save_corpus(const std::string& path, const Corpus& corpus);

// One document per line: uid<TAB>label-or-dash<TAB>space-joined tokens.
// The token field is empty for documents cleaning emptied.
std::string serialize_cleaned(const std::vector<CleanedDoc>& docs);
std::vector<CleanedDoc> parse_cleaned(const std::string& text);

// Sparse matrix with its row identities:
//   #cols <N>
//   uid<TAB>label-or-dash<TAB>col:value col:value ...
// Values are %.17g, so a round trip is bit-exact.
struct LabeledMatrix {
  DocTermMatrix X;
  std::vector<std::string> uids;
  std::vector<std::optional<Sentiment>> labels;
};
std::string serialize_matrix(const LabeledMatrix& m);
LabeledMatrix parse_matrix(const std::string& text);

// One word per line; blank lines and '#' lines skipped.
std::set<std::string> load_word_set(const std::string& path);
void save_word_list(const std::string& path, const std::set<std::string>& words);

// One cluster per line, canonical first (the serialize_norm_dict format).
NormalizationDictionary load_norm_dict(const std::string& path);
void save_norm_dict(const std::string& path, const NormalizationDictionary& dict);

nlohmann::json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);

// SENTIMIX_DATA_DIR if set, else the repository data directory recorded at
// build time.
std::string default_data_dir();

// SENTIMIX_DATASET_DIR (expected to hold train.txt, validation.txt,
// test.txt), or empty when unset.
std::string dataset_dir();

}  // namespace sentimix
