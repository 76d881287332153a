#include <algorithm>
#include <cmath>

#include "sentimix/error.hpp"
#include "sentimix/eval.hpp"
#include "sentimix/models.hpp"

namespace sentimix {
namespace {

double sq_norm(const SparseVector& v) {
  double s = 0.0;
  for (const auto& e : v.entries) s += e.value * e.value;
  return s;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    if (a.entries[i].col < b.entries[j].col) ++i;
    else if (a.entries[i].col > b.entries[j].col) ++j;
    else {
      s += a.entries[i].value * b.entries[j].value;
      ++i;
      ++j;
    }
  }
  return s;
}

// Euclidean distances to every training row, sorted ascending with row-index
// tie-break.
std::vector<std::pair<double, std::int32_t>> sorted_distances(
    const DocTermMatrix& train, const std::vector<double>& norms,
    const SparseVector& q) {
  const double nq = sq_norm(q);
  std::vector<std::pair<double, std::int32_t>> d;
  d.reserve(train.rows.size());
  for (size_t r = 0; r < train.rows.size(); ++r) {
    double sq = nq + norms[r] - 2.0 * dot(q, train.rows[r]);
    d.emplace_back(std::sqrt(std::max(0.0, sq)), static_cast<std::int32_t>(r));
  }
  std::sort(d.begin(), d.end());
  return d;
}

// Majority label over the first k sorted neighbors. Vote ties go to the
// smaller summed distance, then the higher training prior, then class order.
Sentiment vote_of(const std::vector<std::pair<double, std::int32_t>>& sorted,
                  const std::vector<Sentiment>& labels, int k,
                  const std::array<double, 3>& prior) {
  std::array<int, 3> count{};
  std::array<double, 3> dist_sum{};
  for (int i = 0; i < k; ++i) {
    const size_t c = static_cast<size_t>(labels[static_cast<size_t>(sorted[static_cast<size_t>(i)].second)]);
    ++count[c];
    dist_sum[c] += sorted[static_cast<size_t>(i)].first;
  }
  size_t best = 0;
  for (size_t c = 1; c < 3; ++c) {
    if (count[c] > count[best]) {
      best = c;
    } else if (count[c] == count[best]) {
      if (dist_sum[c] < dist_sum[best]) best = c;
      else if (dist_sum[c] == dist_sum[best] && prior[c] > prior[best]) best = c;
    }
  }
  return static_cast<Sentiment>(best);
}

}  // namespace

void KnnModel::finish() {
  norms_.clear();
  norms_.reserve(train.rows.size());
  for (const auto& row : train.rows) norms_.push_back(sq_norm(row));
  prior_ = class_priors(labels);
}

Sentiment KnnModel::predict(const SparseVector& x) const {
  auto d = sorted_distances(train, norms_, x);
  return vote_of(d, labels, k, prior_);
}

Probs KnnModel::predict_proba(const SparseVector&) const {
  throw ConfigError("knn does not produce probabilities");
}

nlohmann::json KnnModel::to_json() const {
  nlohmann::json j;
  j["format"] = "sentimix.model";
  j["version"] = 1;
  j["kind"] = "knn";
  j["k"] = k;
  j["n_cols"] = train.n_cols;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : train.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& e : row.entries) r.push_back({e.col, e.value});
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  nlohmann::json labs = nlohmann::json::array();
  for (Sentiment s : labels) labs.push_back(static_cast<int>(s));
  j["labels"] = std::move(labs);
  return j;
}

std::unique_ptr<KnnModel> KnnModel::from_json(const nlohmann::json& j) {
  DocTermMatrix X;
  X.n_cols = j.at("n_cols").get<std::int32_t>();
  for (const auto& r : j.at("rows")) {
    SparseVector row;
    for (const auto& e : r)
      row.entries.push_back({e.at(0).get<std::int32_t>(), e.at(1).get<double>()});
    X.rows.push_back(std::move(row));
  }
  std::vector<Sentiment> y;
  for (const auto& v : j.at("labels")) y.push_back(static_cast<Sentiment>(v.get<int>()));
  return make_knn(std::move(X), std::move(y), j.at("k").get<int>());
}

std::unique_ptr<KnnModel> make_knn(DocTermMatrix X, std::vector<Sentiment> y, int k) {
  if (X.rows.empty()) throw ValueError("cannot train on an empty set");
  if (X.rows.size() != y.size()) throw ValueError("row and label counts differ");
  if (k < 1 || k > 100)
    throw ValueError("k must lie in [1, 100], got " + std::to_string(k));
  if (static_cast<size_t>(k) > X.rows.size())
    throw ValueError("k = " + std::to_string(k) + " exceeds the training size " +
                     std::to_string(X.rows.size()));
  auto m = std::make_unique<KnnModel>();
  m->train = std::move(X);
  m->labels = std::move(y);
  m->k = k;
  m->finish();
  return m;
}

int select_k(const DocTermMatrix& X_train, const std::vector<Sentiment>& y_train,
             const DocTermMatrix& X_val, const std::vector<Sentiment>& y_val,
             int k_low, int k_high) {
  if (X_train.rows.empty()) throw ValueError("cannot select k on an empty training set");
  if (X_val.rows.empty()) throw ValueError("cannot select k on an empty validation set");
  if (k_low < 1) throw ValueError("k range must start at 1 or above");
  k_high = std::min(k_high, static_cast<int>(X_train.rows.size()));
  if (k_low > k_high) throw ValueError("empty k range");

  std::vector<double> norms;
  norms.reserve(X_train.rows.size());
  for (const auto& row : X_train.rows) norms.push_back(sq_norm(row));
  const auto prior = class_priors(y_train);

  // One sorted neighbor list per validation point serves every k.
  const int n_k = k_high - k_low + 1;
  std::vector<ConfusionMatrix> cms(static_cast<size_t>(n_k));
  for (size_t q = 0; q < X_val.rows.size(); ++q) {
    auto d = sorted_distances(X_train, norms, X_val.rows[q]);
    for (int k = k_low; k <= k_high; ++k) {
      Sentiment pred = vote_of(d, y_train, k, prior);
      ++cms[static_cast<size_t>(k - k_low)]
            .m[static_cast<size_t>(y_val[q])][static_cast<size_t>(pred)];
    }
  }
  int best_k = k_low;
  double best_f1 = -1.0;
  for (int k = k_low; k <= k_high; ++k) {
    double f1 = macro_f1_from_confusion(cms[static_cast<size_t>(k - k_low)]);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace sentimix
