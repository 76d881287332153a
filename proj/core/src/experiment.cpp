#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "sentimix/error.hpp"
#include "sentimix/experiment.hpp"
#include "sentimix/formats.hpp"

namespace sentimix {
namespace {

constexpr const char* kModelNames[] = {"svm",    "knn",    "tree",
                                       "gnb",    "mnb",    "logreg",
                                       "forest", "vote-hard", "vote-soft"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

long long parse_ll(std::string_view v, size_t line_no) {
  std::string buf(v);
  char* end = nullptr;
  errno = 0;
  long long out = std::strtoll(buf.c_str(), &end, 10);
  if (errno != 0 || end != buf.c_str() + buf.size() || buf.empty())
    throw ValueError("line " + std::to_string(line_no) + ": expected an integer, got '" +
                     buf + "'");
  return out;
}

double parse_f64(std::string_view v, size_t line_no) {
  std::string buf(v);
  char* end = nullptr;
  errno = 0;
  double out = std::strtod(buf.c_str(), &end);
  if (errno != 0 || end != buf.c_str() + buf.size() || buf.empty())
    throw ValueError("line " + std::to_string(line_no) + ": expected a number, got '" + buf +
                     "'");
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ModelKind parse_model_kind(const std::string& s) {
  for (size_t i = 0; i < std::size(kModelNames); ++i)
    if (s == kModelNames[i]) return static_cast<ModelKind>(i);
  std::string msg = "unknown model kind '" + s + "' (expected ";
  for (size_t i = 0; i < std::size(kModelNames); ++i) {
    if (i) msg += ", ";
    msg += kModelNames[i];
  }
  throw ValueError(msg + ")");
}

std::string to_string(ModelKind kind) {
  return kModelNames[static_cast<size_t>(kind)];
}

ExperimentSpec ExperimentSpec::parse(const std::string& text) {
  ExperimentSpec spec;
  std::istringstream in(text);
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ValueError("line " + std::to_string(line_no) +
                       ": expected 'key = value', got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key == "stage") {
      spec.stage = parse_clean_stage(value);
    } else if (key == "vectorizer") {
      spec.vectorizer = parse_vectorizer_kind(value);
    } else if (key == "ngrams") {
      const size_t comma = value.find(',');
      if (comma == std::string::npos)
        throw ValueError("line " + std::to_string(line_no) +
                         ": ngrams must be 'low,high'");
      spec.ngrams.n_low = static_cast<int>(parse_ll(trim(std::string_view(value).substr(0, comma)), line_no));
      spec.ngrams.n_high = static_cast<int>(parse_ll(trim(std::string_view(value).substr(comma + 1)), line_no));
    } else if (key == "min_df") {
      spec.ngrams.min_df = static_cast<int>(parse_ll(value, line_no));
    } else if (key == "df_mode") {
      spec.df_mode = parse_freq_mode(value);
    } else if (key == "model") {
      spec.model = parse_model_kind(value);
    } else if (key == "n_estimators") {
      spec.n_estimators = static_cast<int>(parse_ll(value, line_no));
    } else if (key == "k") {
      spec.k = static_cast<int>(parse_ll(value, line_no));
    } else if (key == "alpha") {
      spec.alpha = parse_f64(value, line_no);
    } else if (key == "seed") {
      spec.train.seed = static_cast<std::uint64_t>(parse_ll(value, line_no));
    } else if (key == "learning_rate") {
      spec.train.learning_rate = parse_f64(value, line_no);
    } else if (key == "max_iters") {
      spec.train.max_iters = static_cast<int>(parse_ll(value, line_no));
    } else if (key == "l2_lambda") {
      spec.train.l2_lambda = parse_f64(value, line_no);
    } else if (key == "tolerance") {
      spec.train.tolerance = parse_f64(value, line_no);
    } else if (key == "split") {
      spec.eval_split = parse_split(value);
    } else if (key == "gnb_budget") {
      spec.gnb_budget_bytes = static_cast<std::uint64_t>(parse_ll(value, line_no));
    } else {
      throw ValueError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  spec.ngrams.validate();
  return spec;
}

std::string ExperimentSpec::serialize() const {
  std::ostringstream out;
  out << "stage = " << to_string(stage) << "\n";
  out << "vectorizer = " << to_string(vectorizer) << "\n";
  out << "ngrams = " << ngrams.n_low << "," << ngrams.n_high << "\n";
  out << "min_df = " << ngrams.min_df << "\n";
  out << "df_mode = " << to_string(df_mode) << "\n";
  out << "model = " << to_string(model) << "\n";
  out << "n_estimators = " << n_estimators << "\n";
  out << "k = " << k << "\n";
  out << "alpha = " << fmt_double(alpha) << "\n";
  out << "seed = " << train.seed << "\n";
  out << "learning_rate = " << fmt_double(train.learning_rate) << "\n";
  out << "max_iters = " << train.max_iters << "\n";
  out << "l2_lambda = " << fmt_double(train.l2_lambda) << "\n";
  out << "tolerance = " << fmt_double(train.tolerance) << "\n";
  out << "split = " << to_string(eval_split) << "\n";
  out << "gnb_budget = " << gnb_budget_bytes << "\n";
  return out.str();
}

CleanConfig Resources::clean_config(CleanStage stage) const {
  CleanConfig c;
  c.stage = stage;
  c.norm_dict = &dict;
  c.english_stopwords = &english_stopwords;
  c.hindi_stopwords = &hindi_stopwords;
  c.emoji_map = &emoji;
  return c;
}

Resources build_resources(const Corpus& train, const std::string& data_dir) {
  Resources r;
  r.english_stopwords = load_word_set(data_dir + "/english_stopwords.txt");
  r.emoji = EmojiMap::parse(read_file(data_dir + "/emoji_map.txt"));
  const auto curated = parse_curated(read_file(data_dir + "/norm_curated.txt"));
  Whitelist whitelist{load_word_set(data_dir + "/hindi_whitelist.txt")};

  // Dictionary input: the I2-cleaned training vocabulary with counts.
  // Tokens at I2 are ASCII letter runs; lowercasing happens here because the
  // cleaning pipeline itself only lowercases from I3 on.
  CleanConfig i2;
  i2.stage = CleanStage::I2;
  FreqTable freq;
  for (const Tweet& t : train.tweets)
    for (std::string& tok : clean_tweet(t, i2)) {
      for (char& ch : tok)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      ++freq[tok];
    }
  r.dict = build_norm_dict(freq, curated);

  // Hindi stopwords come from the I3 vocabulary, which needs the dictionary.
  CleanConfig i3;
  i3.stage = CleanStage::I3;
  i3.norm_dict = &r.dict;
  i3.english_stopwords = &r.english_stopwords;
  std::set<std::string> vocab;
  for (const Tweet& t : train.tweets)
    for (std::string& tok : clean_tweet(t, i3)) vocab.insert(std::move(tok));
  r.hindi_stopwords = derive_stopwords(vocab, whitelist);
  return r;
}

ExperimentContext::ExperimentContext(const Corpora& corpora, const Resources& resources)
    : corpora_(corpora), resources_(resources) {}

const ExperimentContext::CleanedSplits& ExperimentContext::cleaned(CleanStage stage) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cleaned_.find(static_cast<int>(stage));
  if (it != cleaned_.end()) return it->second;

  const CleanConfig cfg = resources_.clean_config(stage);
  CleanedSplits cs;
  const Corpus* splits[3] = {&corpora_.train, &corpora_.validation, &corpora_.test};
  for (int i = 0; i < 3; ++i) {
    cs.split[i].docs.reserve(splits[i]->tweets.size());
    cs.split[i].raw_labels.reserve(splits[i]->tweets.size());
    for (const Tweet& t : splits[i]->tweets) {
      cs.split[i].docs.push_back(clean_tweet(t, cfg));
      cs.split[i].raw_labels.push_back(t.label);
    }
  }
  return cleaned_.emplace(static_cast<int>(stage), std::move(cs)).first->second;
}

const ExperimentContext::FeatSet& ExperimentContext::features(const ExperimentSpec& spec) {
  const CleanedSplits& cs = cleaned(spec.stage);  // before taking mu_
  const FeatKey key{static_cast<int>(spec.stage), static_cast<int>(spec.vectorizer),
                    spec.ngrams.n_low, spec.ngrams.n_high, spec.ngrams.min_df,
                    static_cast<int>(spec.df_mode)};
  std::lock_guard<std::mutex> lock(mu_);
  auto it = features_.find(key);
  if (it != features_.end()) return it->second;

  FeatSet fs;
  fs.fitted = fit_vectorizer(spec.vectorizer, cs.split[0].docs, spec.ngrams, spec.df_mode);
  for (int i = 0; i < 3; ++i) fs.split[i] = transform_all(fs.fitted, cs.split[i].docs);
  return features_.emplace(key, std::move(fs)).first->second;
}

std::vector<Sentiment> ExperimentContext::labels_or_throw(const SplitDocs& sd, Split which) {
  std::vector<Sentiment> out;
  out.reserve(sd.raw_labels.size());
  for (const auto& l : sd.raw_labels) {
    if (!l.has_value())
      throw ValueError("split '" + std::string(to_string(which)) +
                       "' has unlabeled documents");
    out.push_back(*l);
  }
  return out;
}

void ExperimentContext::prebuild(const std::vector<ExperimentSpec>& specs) {
  for (const ExperimentSpec& s : specs) {
    s.ngrams.validate();
    features(s);
  }
}

EvalReport ExperimentContext::run(const ExperimentSpec& spec, int n_jobs) {
  spec.ngrams.validate();
  const CleanedSplits& cs = cleaned(spec.stage);
  const FeatSet& fs = features(spec);
  const std::vector<Sentiment> y_train = labels_or_throw(cs.split[0], Split::Train);
  const ClassWeights w = compute_class_weights(y_train);

  std::unique_ptr<Model> model;
  switch (spec.model) {
    case ModelKind::Svm:
      model = train_linear_svm(fs.split[0], y_train, w, spec.train);
      break;
    case ModelKind::Knn: {
      int k = spec.k;
      if (k <= 0) {
        const auto y_val = labels_or_throw(cs.split[1], Split::Validation);
        k = select_k(fs.split[0], y_train, fs.split[1], y_val);
      }
      model = make_knn(fs.split[0], y_train, k);
      break;
    }
    case ModelKind::Tree:
      model = train_tree(fs.split[0], y_train, w, spec.train);
      break;
    case ModelKind::Gnb: {
      GnbConfig g;
      g.memory_budget_bytes = spec.gnb_budget_bytes;
      model = train_gnb(fs.split[0], y_train, g);
      break;
    }
    case ModelKind::Mnb:
      model = train_mnb(fs.split[0], y_train, spec.alpha);
      break;
    case ModelKind::Logreg:
      model = train_logreg(fs.split[0], y_train, w, spec.train);
      break;
    case ModelKind::Forest:
      model = train_forest(fs.split[0], y_train, w, spec.n_estimators, spec.train, n_jobs);
      break;
    case ModelKind::VoteHard:
    case ModelKind::VoteSoft: {
      std::unique_ptr<SvmModel> svm = train_linear_svm(fs.split[0], y_train, w, spec.train);
      if (spec.model == ModelKind::VoteSoft) {
        const auto y_val = labels_or_throw(cs.split[1], Split::Validation);
        svm = calibrate_platt(*svm, fs.split[1], y_val);
      }
      auto logreg = train_logreg(fs.split[0], y_train, w, spec.train);
      auto forest =
          train_forest(fs.split[0], y_train, w, spec.n_estimators, spec.train, n_jobs);
      model = make_voting(
          spec.model == ModelKind::VoteHard ? VoteMode::Hard : VoteMode::Soft,
          std::move(svm), std::move(logreg), std::move(forest), y_train);
      break;
    }
  }

  const int ei = static_cast<int>(spec.eval_split);
  const auto y_eval = labels_or_throw(cs.split[ei], spec.eval_split);
  const auto y_pred = model->predict_all(fs.split[ei]);
  return evaluate(y_eval, y_pred);
}

EvalReport run_experiment(const ExperimentSpec& spec, const Corpora& corpora,
                          const Resources& resources, int n_jobs) {
  ExperimentContext ctx(corpora, resources);
  return ctx.run(spec, n_jobs);
}

namespace {

const std::vector<std::pair<std::string, ModelKind>> kSevenModels = {
    {"svm", ModelKind::Svm},     {"knn", ModelKind::Knn},
    {"tree", ModelKind::Tree},   {"gnb", ModelKind::Gnb},
    {"mnb", ModelKind::Mnb},     {"logreg", ModelKind::Logreg},
    {"forest", ModelKind::Forest}};

GridSpec stage_grid(const std::string& name, CleanStage stage) {
  GridSpec g;
  g.name = name;
  g.row_labels = {"count", "onehot", "tfidf"};
  for (const auto& [label, kind] : kSevenModels) g.col_labels.push_back(label);
  for (VectorizerKind v :
       {VectorizerKind::Count, VectorizerKind::OneHot, VectorizerKind::TfIdf})
    for (const auto& [label, kind] : kSevenModels) {
      ExperimentSpec s;
      s.stage = stage;
      s.vectorizer = v;
      s.ngrams = {1, 1, 1};
      s.model = kind;
      g.specs.push_back(s);
    }
  return g;
}

GridSpec freq_grid(const std::string& name, CleanStage stage) {
  GridSpec g;
  g.name = name;
  for (const auto& [label, kind] : kSevenModels) g.col_labels.push_back(label);
  for (int f : {1, 2, 3, 5}) {
    g.row_labels.push_back("f=" + std::to_string(f));
    for (const auto& [label, kind] : kSevenModels) {
      ExperimentSpec s;
      s.stage = stage;
      s.vectorizer = VectorizerKind::TfIdf;
      s.ngrams = {1, 3, f};
      s.model = kind;
      g.specs.push_back(s);
    }
  }
  return g;
}

GridSpec vote_grid(const std::string& name, CleanStage stage) {
  GridSpec g;
  g.name = name;
  g.row_labels = {"vote-hard", "vote-soft"};
  const std::pair<std::string, NGramConfig> settings[] = {
      {"uni", {1, 1, 1}}, {"uni-bi-tri", {1, 3, 2}}};
  for (VectorizerKind v :
       {VectorizerKind::Count, VectorizerKind::OneHot, VectorizerKind::TfIdf})
    for (const auto& [suffix, ngrams] : settings)
      g.col_labels.push_back(to_string(v) + " " + suffix);
  for (ModelKind m : {ModelKind::VoteHard, ModelKind::VoteSoft})
    for (VectorizerKind v :
         {VectorizerKind::Count, VectorizerKind::OneHot, VectorizerKind::TfIdf})
      for (const auto& [suffix, ngrams] : settings) {
        ExperimentSpec s;
        s.stage = stage;
        s.vectorizer = v;
        s.ngrams = ngrams;
        s.model = m;
        g.specs.push_back(s);
      }
  return g;
}

GridSpec estimators_grid() {
  GridSpec g;
  g.name = "exp10";
  const std::pair<std::string, std::pair<int, int>> settings[] = {
      {"uni", {1, 1}}, {"uni-bi-tri", {1, 3}}};
  for (int n : {750, 900, 1250})
    for (const auto& [suffix, range] : settings)
      g.col_labels.push_back("n=" + std::to_string(n) + " " + suffix);
  for (int f : {1, 2, 3}) {
    g.row_labels.push_back("f=" + std::to_string(f));
    for (int n : {750, 900, 1250})
      for (const auto& [suffix, range] : settings) {
        ExperimentSpec s;
        s.stage = CleanStage::I4;
        s.vectorizer = VectorizerKind::TfIdf;
        s.ngrams = {range.first, range.second, f};
        s.model = ModelKind::VoteSoft;
        s.n_estimators = n;
        g.specs.push_back(s);
      }
  }
  return g;
}

}  // namespace

std::vector<std::string> builtin_grid_names() {
  return {"exp1", "exp2", "exp3", "exp4",      "exp5",
          "exp7", "exp8", "exp9-iter4", "exp9-iter5", "exp10"};
}

GridSpec builtin_grid(const std::string& name) {
  if (name == "exp1") return stage_grid(name, CleanStage::I1);
  if (name == "exp2") return stage_grid(name, CleanStage::I2);
  if (name == "exp3") return stage_grid(name, CleanStage::I3);
  if (name == "exp4") return stage_grid(name, CleanStage::I4);
  if (name == "exp5") return stage_grid(name, CleanStage::I5);
  if (name == "exp7") return freq_grid(name, CleanStage::I5);
  if (name == "exp8") return freq_grid(name, CleanStage::I4);
  if (name == "exp9-iter4") return vote_grid(name, CleanStage::I4);
  if (name == "exp9-iter5") return vote_grid(name, CleanStage::I5);
  if (name == "exp10") return estimators_grid();
  std::string msg = "unknown grid '" + name + "' (available:";
  for (const auto& g : builtin_grid_names()) msg += " " + g;
  throw ValueError(msg + ")");
}

ResultTable run_grid(const GridSpec& grid, const Corpora& corpora,
                     const Resources& resources, int jobs) {
  const size_t expected = grid.row_labels.size() * grid.col_labels.size();
  if (grid.specs.size() != expected)
    throw ValueError("grid '" + grid.name + "' has " + std::to_string(grid.specs.size()) +
                     " specs for " + std::to_string(expected) + " cells");
  ResultTable table;
  table.name = grid.name;
  table.row_labels = grid.row_labels;
  table.col_labels = grid.col_labels;
  table.cells.resize(grid.specs.size());
  if (table.cells.empty()) return table;

  ExperimentContext ctx(corpora, resources);
  ctx.prebuild(grid.specs);

  auto run_cell = [&](size_t i) {
    try {
      table.cells[i].value = ctx.run(grid.specs[i], 1).macro_f1;
    } catch (const ResourceError&) {
      table.cells[i].kc = true;
    }
  };

  if (jobs <= 1) {
    for (size_t i = 0; i < grid.specs.size(); ++i) run_cell(i);
    return table;
  }

  const size_t n = grid.specs.size();
  const size_t workers_n = std::min<size_t>(static_cast<size_t>(jobs), n);
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  workers.reserve(workers_n);
  for (size_t t = 0; t < workers_n; ++t)
    workers.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          run_cell(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
  return table;
}

namespace {

std::string cell_text(const ResultTable::Cell& c) {
  if (c.kc) return "KC";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", c.value);
  return buf;
}

}  // namespace

std::string render_table_csv(const ResultTable& table) {
  std::ostringstream out;
  out << table.name;
  for (const auto& c : table.col_labels) out << "," << c;
  out << "\n";
  for (size_t r = 0; r < table.row_labels.size(); ++r) {
    out << table.row_labels[r];
    for (size_t c = 0; c < table.col_labels.size(); ++c)
      out << "," << cell_text(table.at(r, c));
    out << "\n";
  }
  return out.str();
}

std::string render_table_text(const ResultTable& table) {
  const size_t rows = table.row_labels.size();
  const size_t cols = table.col_labels.size();
  size_t label_w = table.name.size();
  for (const auto& r : table.row_labels) label_w = std::max(label_w, r.size());
  std::vector<size_t> col_w(cols);
  for (size_t c = 0; c < cols; ++c) {
    col_w[c] = table.col_labels[c].size();
    for (size_t r = 0; r < rows; ++r)
      col_w[c] = std::max(col_w[c], cell_text(table.at(r, c)).size());
  }
  std::ostringstream out;
  auto pad = [&](const std::string& s, size_t w, bool right) {
    if (!right) out << s;
    for (size_t i = s.size(); i < w; ++i) out << ' ';
    if (right) out << s;
  };
  pad(table.name, label_w, false);
  for (size_t c = 0; c < cols; ++c) {
    out << "  ";
    pad(table.col_labels[c], col_w[c], true);
  }
  out << "\n";
  for (size_t r = 0; r < rows; ++r) {
    pad(table.row_labels[r], label_w, false);
    for (size_t c = 0; c < cols; ++c) {
      out << "  ";
      pad(cell_text(table.at(r, c)), col_w[c], true);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace sentimix
