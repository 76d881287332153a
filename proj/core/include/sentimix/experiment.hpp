#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sentimix/clean.hpp"
#include "sentimix/eval.hpp"
#include "sentimix/features.hpp"
#include "sentimix/models.hpp"

namespace sentimix {

enum class ModelKind : int {
  Svm = 0,
  Knn,
  Tree,
  Gnb,
  Mnb,
  Logreg,
  Forest,
  VoteHard,
  VoteSoft,
};

ModelKind parse_model_kind(const std::string& s);
std::string to_string(ModelKind kind);

// Everything that determines one experiment's result. Serializable as a flat
// key=value file so any cell of any grid can be replayed standalone.
struct ExperimentSpec {
  CleanStage stage = CleanStage::I3;
  VectorizerKind vectorizer = VectorizerKind::TfIdf;
  NGramConfig ngrams;                       // n_low, n_high, min_df
  FreqMode df_mode = FreqMode::Document;
  ModelKind model = ModelKind::Logreg;
  int n_estimators = 1000;                  // forest and voting members
  int k = -1;                               // knn; <= 0 selects on validation
  double alpha = 1.0;                       // multinomial smoothing
  TrainConfig train;
  Split eval_split = Split::Test;
  std::uint64_t gnb_budget_bytes = GnbConfig{}.memory_budget_bytes;

  // One "key = value" per line, '#' comments and blank lines skipped.
  // Unknown keys and malformed values are ValueErrors naming the line.
  static ExperimentSpec parse(const std::string& text);
  std::string serialize() const;

  bool operator==(const ExperimentSpec&) const = default;
};

// The three ingested splits.
struct Corpora {
  Corpus train;
  Corpus validation;
  Corpus test;
};

// Shared immutable cleaning resources, built once from the training split.
struct Resources {
  NormalizationDictionary dict;
  std::set<std::string> english_stopwords;
  StopwordList hindi_stopwords;
  EmojiMap emoji;

  CleanConfig clean_config(CleanStage stage) const;
};

// Builds the dictionary from the I2-cleaned training vocabulary (curated rows
// merged in) and derives Hindi stopwords from the I3 vocabulary. data_dir
// must hold english_stopwords.txt, emoji_map.txt, norm_curated.txt and
// hindi_whitelist.txt.
Resources build_resources(const Corpus& train, const std::string& data_dir);

// Caches cleaned splits per stage and fitted feature spaces per setting, so
// a grid cleans and vectorizes each configuration once. run() is safe to
// call from several threads once the caches are warm (prebuild) and degrades
// to serialized builds otherwise.
class ExperimentContext {
 public:
  ExperimentContext(const Corpora& corpora, const Resources& resources);

  void prebuild(const std::vector<ExperimentSpec>& specs);

  // clean -> featurize (fit on train) -> train -> predict eval split.
  // n_jobs parallelizes forest training inside this one experiment.
  EvalReport run(const ExperimentSpec& spec, int n_jobs = 1);

 private:
  struct SplitDocs {
    std::vector<TokenDoc> docs;
    std::vector<std::optional<Sentiment>> raw_labels;
  };
  struct CleanedSplits {
    SplitDocs split[3];  // indexed by Split
  };
  struct FeatKey {
    int stage;
    int kind;
    int n_low;
    int n_high;
    int min_df;
    int df_mode;
    auto operator<=>(const FeatKey&) const = default;
  };
  struct FeatSet {
    FittedVectorizer fitted;
    DocTermMatrix split[3];
  };

  const CleanedSplits& cleaned(CleanStage stage);
  const FeatSet& features(const ExperimentSpec& spec);
  static std::vector<Sentiment> labels_or_throw(const SplitDocs& sd, Split which);

  const Corpora& corpora_;
  const Resources& resources_;
  std::mutex mu_;
  std::map<int, CleanedSplits> cleaned_;
  std::map<FeatKey, FeatSet> features_;
};

// Standalone single-experiment entry point.
EvalReport run_experiment(const ExperimentSpec& spec, const Corpora& corpora,
                          const Resources& resources, int n_jobs = 1);

struct ResultTable {
  struct Cell {
    bool kc = false;     // resource error marker
    double value = 0.0;  // macro-F1 when !kc
  };

  std::string name;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<Cell> cells;  // row-major, row_labels.size() * col_labels.size()

  const Cell& at(size_t row, size_t col) const {
    return cells[row * col_labels.size() + col];
  }
};

// A named grid: one spec per cell, row-major.
struct GridSpec {
  std::string name;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<ExperimentSpec> specs;
};

std::vector<std::string> builtin_grid_names();

// exp1..exp5: vectorizers x 7 classifiers at stages I1..I5, unigrams f=1.
// exp7/exp8: min-frequency rows x 7 classifiers, tf-idf uni-bi-trigrams, at
// I5/I4. exp9-iter4/exp9-iter5: vote modes x (vectorizer, n-gram setting).
// exp10: f rows x (n_estimators, n-gram setting), vote-soft tf-idf at I4.
// Unknown names are ValueErrors listing the available grids.
GridSpec builtin_grid(const std::string& name);

// Runs every cell, up to `jobs` at a time. A ResourceError becomes the cell
// marker rendered as KC; any other exception aborts the grid. Results do not
// depend on jobs.
ResultTable run_grid(const GridSpec& grid, const Corpora& corpora,
                     const Resources& resources, int jobs = 1);

// First line "name,,col...", then one line per row; 4-decimal cells, KC
// rendered literally.
std::string render_table_csv(const ResultTable& table);
// Aligned monospace rendering of the same content.
std::string render_table_text(const ResultTable& table);

}  // namespace sentimix
