#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sentimix/error.hpp"
#include "sentimix/models.hpp"

namespace sentimix {
namespace {

double value_at(const SparseVector& x, std::int32_t col) {
  auto it = std::lower_bound(
      x.entries.begin(), x.entries.end(), col,
      [](const SparseVector::Entry& e, std::int32_t c) { return e.col < c; });
  return it != x.entries.end() && it->col == col ? it->value : 0.0;
}

// Weighted Gini mass: W * (1 - sum (w_c/W)^2). Summing the two children's
// masses and comparing is equivalent to comparing the weighted-average
// impurity, with one division saved.
double gini_mass(const std::array<double, 3>& w) {
  double total = w[0] + w[1] + w[2];
  if (total <= 0.0) return 0.0;
  return total - (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) / total;
}

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

// Immutable column view of the training matrix, shared by all trees.
struct ColumnIndex {
  // per feature: (row, value) with rows ascending
  std::vector<std::vector<std::pair<std::int32_t, double>>> cols;

  explicit ColumnIndex(const DocTermMatrix& X)
      : cols(static_cast<size_t>(X.n_cols)) {
    for (size_t r = 0; r < X.rows.size(); ++r)
      for (const auto& e : X.rows[r].entries)
        cols[static_cast<size_t>(e.col)].emplace_back(
            static_cast<std::int32_t>(r), e.value);
  }
};

struct MatchedRow {
  double value;
  std::uint8_t cls;
  double weight;

  bool operator<(const MatchedRow& o) const { return value < o.value; }
};

class TreeBuilder {
 public:
  TreeBuilder(const DocTermMatrix& X, const std::vector<Sentiment>& y,
              const ClassWeights& w, const ColumnIndex& index)
      : X_(X),
        y_(y),
        w_(w),
        index_(index),
        row_mark_(X.rows.size(), 0),
        feat_mark_(static_cast<size_t>(X.n_cols), 0),
        stamp_(0) {}

  // multiplicity: per-row repeat count (bootstrap); rows at 0 are excluded.
  // m_features < 0 considers every feature present at the node; otherwise
  // each split draws that many distinct features from rng.
  std::vector<TreeNode> build(const std::vector<std::int32_t>& multiplicity,
                              Rng* rng, std::int32_t m_features) {
    mult_ = &multiplicity;
    std::vector<TreeNode> nodes;
    std::vector<std::int32_t> root;
    for (size_t r = 0; r < X_.rows.size(); ++r)
      if (multiplicity[r] > 0) root.push_back(static_cast<std::int32_t>(r));
    nodes.emplace_back();
    grow(nodes, 0, std::move(root), rng, m_features);
    return nodes;
  }

 private:
  void grow(std::vector<TreeNode>& nodes, size_t node_id,
            std::vector<std::int32_t> rows, Rng* rng, std::int32_t m_features) {
    std::array<double, 3> class_w{};
    std::array<std::int64_t, 3> class_n{};
    std::int64_t total_n = 0;
    for (std::int32_t r : rows) {
      const size_t c = static_cast<size_t>(y_[static_cast<size_t>(r)]);
      const std::int32_t m = (*mult_)[static_cast<size_t>(r)];
      class_w[c] += w_.w[c] * static_cast<double>(m);
      class_n[c] += m;
      total_n += m;
    }
    int present = 0;
    for (auto n : class_n)
      if (n > 0) ++present;

    Split best;
    if (total_n >= 2 && present > 1)
      best = find_split(rows, class_w, rng, m_features);

    if (best.feature < 0) {
      TreeNode& leaf = nodes[node_id];
      const double total_w = class_w[0] + class_w[1] + class_w[2];
      for (size_t c = 0; c < 3; ++c) leaf.dist[c] = class_w[c] / total_w;
      return;
    }

    std::vector<std::int32_t> left, right;
    for (std::int32_t r : rows)
      (value_at(X_.rows[static_cast<size_t>(r)], best.feature) <=
               best.threshold
           ? left
           : right)
          .push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const size_t left_id = nodes.size();
    nodes.emplace_back();
    const size_t right_id = nodes.size();
    nodes.emplace_back();
    nodes[node_id].feature = best.feature;
    nodes[node_id].threshold = best.threshold;
    nodes[node_id].left = static_cast<std::int32_t>(left_id);
    nodes[node_id].right = static_cast<std::int32_t>(right_id);
    grow(nodes, left_id, std::move(left), rng, m_features);
    grow(nodes, right_id, std::move(right), rng, m_features);
  }

  std::vector<std::int32_t> candidate_features(
      const std::vector<std::int32_t>& rows, Rng* rng,
      std::int32_t m_features) {
    const std::int32_t dim = static_cast<std::int32_t>(index_.cols.size());
    std::vector<std::int32_t> feats;
    if (m_features < 0 || m_features >= dim) {
      // Every feature with a nonzero value somewhere in the node; features
      // that are constant zero here can never split it.
      ++stamp_;
      for (std::int32_t r : rows)
        for (const auto& e : X_.rows[static_cast<size_t>(r)].entries)
          if (feat_mark_[static_cast<size_t>(e.col)] != stamp_) {
            feat_mark_[static_cast<size_t>(e.col)] = stamp_;
            feats.push_back(e.col);
          }
      std::sort(feats.begin(), feats.end());
      return feats;
    }
    // Distinct uniform draws; sorted so the first-best rule keeps favoring
    // lower feature ids regardless of draw order.
    ++stamp_;
    feats.reserve(static_cast<size_t>(m_features));
    while (static_cast<std::int32_t>(feats.size()) < m_features) {
      auto f = static_cast<std::int32_t>(
          rng->bounded(static_cast<std::uint64_t>(dim)));
      if (feat_mark_[static_cast<size_t>(f)] == stamp_) continue;
      feat_mark_[static_cast<size_t>(f)] = stamp_;
      feats.push_back(f);
    }
    std::sort(feats.begin(), feats.end());
    return feats;
  }

  Split find_split(const std::vector<std::int32_t>& rows,
                   const std::array<double, 3>& node_w, Rng* rng,
                   std::int32_t m_features) {
    const auto feats = candidate_features(rows, rng, m_features);

    ++row_stamp_value_;
    for (std::int32_t r : rows)
      row_mark_[static_cast<size_t>(r)] = row_stamp_value_;

    Split best;
    bool found = false;
    std::vector<MatchedRow> matched;
    std::vector<double> values;
    std::vector<std::array<double, 3>> groups;

    for (std::int32_t f : feats) {
      matched.clear();
      std::array<double, 3> matched_w{};
      bool any = false;
      for (const auto& [row, value] : index_.cols[static_cast<size_t>(f)]) {
        if (row_mark_[static_cast<size_t>(row)] != row_stamp_value_) continue;
        const auto c = static_cast<std::uint8_t>(y_[static_cast<size_t>(row)]);
        const double wgt =
            w_.w[c] * static_cast<double>((*mult_)[static_cast<size_t>(row)]);
        matched.push_back({value, c, wgt});
        matched_w[c] += wgt;
        any = true;
      }
      if (!any) continue;  // constant zero at this node
      std::sort(matched.begin(), matched.end());

      std::array<double, 3> zero_w{};
      double zero_total = 0.0;
      for (size_t c = 0; c < 3; ++c) {
        zero_w[c] = node_w[c] - matched_w[c];
        zero_total += zero_w[c];
      }
      bool zero_pending = zero_total > 1e-12;

      values.clear();
      groups.clear();
      size_t i = 0;
      while (i < matched.size()) {
        const double v = matched[i].value;
        if (zero_pending && 0.0 < v) {
          values.push_back(0.0);
          groups.push_back(zero_w);
          zero_pending = false;
        }
        std::array<double, 3> g{};
        if (!zero_pending && !values.empty() && values.back() == v) {
          // explicit zeros in the matrix never happen, but fold defensively
          g = groups.back();
          values.pop_back();
          groups.pop_back();
        }
        while (i < matched.size() && matched[i].value == v) {
          g[matched[i].cls] += matched[i].weight;
          ++i;
        }
        values.push_back(v);
        groups.push_back(g);
      }
      if (zero_pending) {
        values.push_back(0.0);
        groups.push_back(zero_w);
      }
      if (values.size() < 2) continue;

      std::array<double, 3> left_w{};
      for (size_t cut = 0; cut + 1 < values.size(); ++cut) {
        for (size_t c = 0; c < 3; ++c) left_w[c] += groups[cut][c];
        std::array<double, 3> right_w{};
        for (size_t c = 0; c < 3; ++c) right_w[c] = node_w[c] - left_w[c];
        const double score = gini_mass(left_w) + gini_mass(right_w);
        if (!found || score < best.score) {
          const double a = values[cut];
          const double b = values[cut + 1];
          double thr = a + (b - a) / 2.0;
          // degenerate rounding: keep the cut between a and b
          if (!(thr >= a && thr < b)) thr = a;
          best = {f, thr, score};
          found = true;
        }
      }
    }
    if (!found) best.feature = -1;
    return best;
  }

  const DocTermMatrix& X_;
  const std::vector<Sentiment>& y_;
  const ClassWeights& w_;
  const ColumnIndex& index_;
  const std::vector<std::int32_t>* mult_ = nullptr;
  std::vector<std::uint32_t> row_mark_;
  std::vector<std::uint32_t> feat_mark_;
  std::uint32_t stamp_;
  std::uint32_t row_stamp_value_ = 0;
};

void validate_training_inputs(const DocTermMatrix& X,
                              const std::vector<Sentiment>& y) {
  if (X.rows.empty()) throw ValueError("training matrix is empty");
  if (X.rows.size() != y.size())
    throw ValueError("row/label count mismatch: " +
                     std::to_string(X.rows.size()) + " vs " +
                     std::to_string(y.size()));
}

nlohmann::json nodes_to_json(const std::vector<TreeNode>& nodes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& n : nodes) {
    if (n.feature < 0) {
      arr.push_back({{"dist", {n.dist[0], n.dist[1], n.dist[2]}}});
    } else {
      arr.push_back({{"f", n.feature},
                     {"t", n.threshold},
                     {"l", n.left},
                     {"r", n.right}});
    }
  }
  return arr;
}

std::vector<TreeNode> nodes_from_json(const nlohmann::json& arr) {
  if (!arr.is_array() || arr.empty())
    throw FormatError("tree: expected a non-empty node array");
  std::vector<TreeNode> nodes;
  nodes.reserve(arr.size());
  for (const auto& jn : arr) {
    TreeNode n;
    if (jn.contains("f")) {
      n.feature = jn.at("f").get<std::int32_t>();
      n.threshold = jn.at("t").get<double>();
      n.left = jn.at("l").get<std::int32_t>();
      n.right = jn.at("r").get<std::int32_t>();
      const auto sz = static_cast<std::int32_t>(arr.size());
      if (n.left < 0 || n.left >= sz || n.right < 0 || n.right >= sz)
        throw FormatError("tree: child index out of range");
    } else {
      const auto& d = jn.at("dist");
      if (!d.is_array() || d.size() != 3)
        throw FormatError("tree: leaf dist must have 3 entries");
      for (size_t c = 0; c < 3; ++c) n.dist[c] = d[c].get<double>();
    }
    nodes.push_back(n);
  }
  return nodes;
}

}  // namespace

const TreeNode& TreeModel::leaf_for(const SparseVector& x) const {
  size_t i = 0;
  while (nodes[i].feature >= 0)
    i = static_cast<size_t>(value_at(x, nodes[i].feature) <= nodes[i].threshold
                                ? nodes[i].left
                                : nodes[i].right);
  return nodes[i];
}

Sentiment TreeModel::predict(const SparseVector& x) const {
  const Probs& d = leaf_for(x).dist;
  size_t best = 0;
  for (size_t c = 1; c < 3; ++c)
    if (d[c] > d[best]) best = c;
  return static_cast<Sentiment>(best);
}

Probs TreeModel::predict_proba(const SparseVector& x) const {
  return leaf_for(x).dist;
}

nlohmann::json TreeModel::to_json() const {
  return {{"format", "sentimix.model"},
          {"version", 1},
          {"kind", "tree"},
          {"nodes", nodes_to_json(nodes)}};
}

std::unique_ptr<TreeModel> TreeModel::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<TreeModel>();
  m->nodes = nodes_from_json(j.at("nodes"));
  return m;
}

std::unique_ptr<TreeModel> train_tree(const DocTermMatrix& X,
                                      const std::vector<Sentiment>& y,
                                      const ClassWeights& w,
                                      const TrainConfig& /*cfg*/) {
  validate_training_inputs(X, y);
  ColumnIndex index(X);
  TreeBuilder builder(X, y, w, index);
  std::vector<std::int32_t> mult(X.rows.size(), 1);
  auto m = std::make_unique<TreeModel>();
  m->nodes = builder.build(mult, nullptr, -1);
  return m;
}

Sentiment ForestModel::predict(const SparseVector& x) const {
  Probs p = predict_proba(x);
  size_t best = 0;
  for (size_t c = 1; c < 3; ++c)
    if (p[c] > p[best]) best = c;
  return static_cast<Sentiment>(best);
}

Probs ForestModel::predict_proba(const SparseVector& x) const {
  if (trees.empty()) throw ConfigError("forest has no trees");
  Probs acc{0.0, 0.0, 0.0};
  for (const auto& t : trees) {
    const Probs& d = t.leaf_for(x).dist;
    for (size_t c = 0; c < 3; ++c) acc[c] += d[c];
  }
  for (size_t c = 0; c < 3; ++c) acc[c] /= static_cast<double>(trees.size());
  return acc;
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json jt = nlohmann::json::array();
  for (const auto& t : trees) jt.push_back(nodes_to_json(t.nodes));
  return {{"format", "sentimix.model"},
          {"version", 1},
          {"kind", "forest"},
          {"seed", seed},
          {"trees", jt}};
}

std::unique_ptr<ForestModel> ForestModel::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<ForestModel>();
  m->seed = j.value("seed", std::uint64_t{0});
  const auto& jt = j.at("trees");
  if (!jt.is_array() || jt.empty())
    throw FormatError("forest: expected a non-empty tree array");
  for (const auto& tj : jt) {
    TreeModel t;
    t.nodes = nodes_from_json(tj);
    m->trees.push_back(std::move(t));
  }
  return m;
}

std::unique_ptr<ForestModel> train_forest(const DocTermMatrix& X,
                                          const std::vector<Sentiment>& y,
                                          const ClassWeights& w,
                                          int n_estimators,
                                          const TrainConfig& cfg, int n_jobs) {
  validate_training_inputs(X, y);
  if (n_estimators < 1) throw ValueError("n_estimators must be >= 1");
  const std::int32_t dim = X.n_cols;
  const auto m_features = static_cast<std::int32_t>(
      std::ceil(std::sqrt(static_cast<double>(dim))));

  ColumnIndex index(X);
  const size_t n = X.rows.size();
  auto model = std::make_unique<ForestModel>();
  model->seed = cfg.seed;
  model->trees.resize(static_cast<size_t>(n_estimators));

  auto build_one = [&](int i) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    std::vector<std::int32_t> mult(n, 0);
    for (size_t d = 0; d < n; ++d)
      ++mult[rng.bounded(static_cast<std::uint64_t>(n))];
    TreeBuilder builder(X, y, w, index);
    model->trees[static_cast<size_t>(i)].nodes =
        builder.build(mult, &rng, m_features);
  };

  int jobs = n_jobs;
  if (jobs < 1) jobs = 1;
  if (jobs > n_estimators) jobs = n_estimators;
  if (jobs == 1) {
    for (int i = 0; i < n_estimators; ++i) build_one(i);
    return model;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<size_t>(jobs));
  for (int t = 0; t < jobs; ++t)
    workers.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n_estimators || failed.load()) return;
        try {
          build_one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  for (auto& worker : workers) worker.join();
  if (first_error) std::rethrow_exception(first_error);
  return model;
}

}  // namespace sentimix
