#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentimix/corpus.hpp"
#include "sentimix/features.hpp"

namespace sentimix {

// Probability vector over the fixed class order negative, neutral, positive.
using Probs = std::array<double, 3>;

// Balanced weights w_c = n_total / (n_classes_present * n_c); absent classes
// get weight 1. Invariant: sum_c w_c * n_c = n_total.
struct ClassWeights {
  std::array<double, 3> w{1.0, 1.0, 1.0};
  double of(Sentiment s) const { return w[static_cast<size_t>(s)]; }
};
ClassWeights compute_class_weights(const std::vector<Sentiment>& labels);

// Class frequencies n_c / n, used as the tie-break prior by KNN and voting.
std::array<double, 3> class_priors(const std::vector<Sentiment>& labels);

struct TrainConfig {
  std::uint64_t seed = 0;
  double learning_rate = 0.5;
  int max_iters = 1000;     // gradient steps for logreg, epochs for svm
  double l2_lambda = 1e-4;
  double tolerance = 1e-7;  // stop when loss improves by less than this

  bool operator==(const TrainConfig&) const = default;
};

// splitmix64 of (seed + golden-ratio * (index + 1)); gives forest trees
// independent streams whatever order they are trained in.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

// mt19937_64 with bounded draws done by rejection sampling, so sequences are
// identical across standard libraries (std::uniform_int_distribution and
// std::shuffle are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  std::uint64_t bounded(std::uint64_t n);  // uniform over [0, n)
  double unit();                           // uniform over [0, 1)
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

class Model {
 public:
  virtual ~Model() = default;
  virtual std::string kind() const = 0;
  virtual Sentiment predict(const SparseVector& x) const = 0;
  virtual bool has_proba() const = 0;
  // Nonnegative, sums to 1 within 1e-9. Throws ConfigError when has_proba()
  // is false.
  virtual Probs predict_proba(const SparseVector& x) const = 0;
  virtual nlohmann::json to_json() const = 0;

  std::vector<Sentiment> predict_all(const DocTermMatrix& X) const;
};

// Versioned self-describing persistence; dispatches on the stored kind.
std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------- linear --

struct LinearParams {
  std::array<std::vector<double>, 3> W;
  std::array<double, 3> b{};
};

// Class-weighted softmax cross-entropy plus (l2/2)*||W||^2; biases are not
// regularized. Exposed so the gradient can be checked against finite
// differences.
double logreg_loss(const LinearParams& p, const DocTermMatrix& X,
                   const std::vector<Sentiment>& y, const ClassWeights& w,
                   double l2_lambda);
LinearParams logreg_gradient(const LinearParams& p, const DocTermMatrix& X,
                             const std::vector<Sentiment>& y, const ClassWeights& w,
                             double l2_lambda);

class LogregModel final : public Model {
 public:
  LinearParams params;

  std::string kind() const override { return "logreg"; }
  Sentiment predict(const SparseVector& x) const override;
  bool has_proba() const override { return true; }
  Probs predict_proba(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<LogregModel> from_json(const nlohmann::json& j);
};

// Deterministic full-batch gradient descent; stops at max_iters or when the
// loss improves by less than cfg.tolerance.
std::unique_ptr<LogregModel> train_logreg(const DocTermMatrix& X,
                                          const std::vector<Sentiment>& y,
                                          const ClassWeights& w, const TrainConfig& cfg);

struct PlattSigmoid {
  double a = -1.0;
  double b = 0.0;
};

class SvmModel final : public Model {
 public:
  LinearParams params;
  std::optional<std::array<PlattSigmoid, 3>> calibration;

  std::array<double, 3> margins(const SparseVector& x) const;
  std::string kind() const override { return "svm"; }
  Sentiment predict(const SparseVector& x) const override;
  bool has_proba() const override { return calibration.has_value(); }
  Probs predict_proba(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<SvmModel> from_json(const nlohmann::json& j);
};

// One-vs-rest class-weighted hinge loss with L2 regularization, minimized by
// seeded subgradient descent over cfg.max_iters epochs (shuffle sequence is
// a fixed function of cfg.seed; step t uses learning_rate / (1 + t/n)).
std::unique_ptr<SvmModel> train_linear_svm(const DocTermMatrix& X,
                                           const std::vector<Sentiment>& y,
                                           const ClassWeights& w, const TrainConfig& cfg);

// Per-class sigmoid p = 1 / (1 + exp(a*s + b)) fitted on decision margins by
// deterministic gradient descent on log-loss, initialized at a=-1, b=0 and
// keeping the best parameters seen. Throws ValueError when y_cal has fewer
// than two classes.
std::unique_ptr<SvmModel> calibrate_platt(const SvmModel& svm, const DocTermMatrix& X_cal,
                                          const std::vector<Sentiment>& y_cal);

// ----------------------------------------------------------- naive bayes --

class MnbModel final : public Model {
 public:
  std::array<double, 3> log_prior{};       // -inf for absent classes
  std::array<std::vector<double>, 3> log_theta;
  double alpha = 1.0;

  std::string kind() const override { return "mnb"; }
  Sentiment predict(const SparseVector& x) const override;
  bool has_proba() const override { return true; }
  Probs predict_proba(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<MnbModel> from_json(const nlohmann::json& j);
};

// theta_{c,t} = (count_{c,t} + alpha) / (count_{c,.} + alpha*|vocab|), priors
// from unweighted document fractions. Negative features are a ValueError.
// Class weights are not applied; the reference results use them only for the
// margin-based models.
std::unique_ptr<MnbModel> train_mnb(const DocTermMatrix& X, const std::vector<Sentiment>& y,
                                    double alpha = 1.0);

struct GnbConfig {
  double var_smoothing = 1e-9;  // epsilon = var_smoothing * max feature variance
  // Budget for the dense view of X the model conceptually trains on;
  // exceeding it raises ResourceError (rendered as KC in grids).
  std::uint64_t memory_budget_bytes = 8ull << 30;
};

class GnbModel final : public Model {
 public:
  std::array<double, 3> log_prior{};
  std::array<std::vector<double>, 3> mean;
  std::array<std::vector<double>, 3> variance;  // epsilon already added
  std::array<double, 3> zero_loglik{};          // per class: sum of log N(0 | mean, var)

  std::string kind() const override { return "gnb"; }
  Sentiment predict(const SparseVector& x) const override;
  bool has_proba() const override { return true; }
  Probs predict_proba(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<GnbModel> from_json(const nlohmann::json& j);
};

std::unique_ptr<GnbModel> train_gnb(const DocTermMatrix& X, const std::vector<Sentiment>& y,
                                    const GnbConfig& cfg = {});

// ------------------------------------------------------------------- knn --

class KnnModel final : public Model {
 public:
  DocTermMatrix train;
  std::vector<Sentiment> labels;
  int k = 1;

  std::string kind() const override { return "knn"; }
  Sentiment predict(const SparseVector& x) const override;
  bool has_proba() const override { return false; }
  Probs predict_proba(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<KnnModel> from_json(const nlohmann::json& j);

  void finish();  // recomputes cached norms and priors

 private:
  std::vector<double> norms_;
  std::array<double, 3> prior_{};
};

// k must lie in [1, 100] and not exceed the training size.
std::unique_ptr<KnnModel> make_knn(DocTermMatrix X, std::vector<Sentiment> y, int k);

// The k in [k_low, min(k_high, |train|)] maximizing validation macro-F1;
// ties go to the smallest k.
int select_k(const DocTermMatrix& X_train, const std::vector<Sentiment>& y_train,
             const DocTermMatrix& X_val, const std::vector<Sentiment>& y_val,
             int k_low = 1, int k_high = 100);

// ----------------------------------------------------------- tree/forest --

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  Probs dist{};               // leaves only: weighted class distribution
};

class TreeModel final : public Model {
 public:
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(const SparseVector& x) const;
  std::string kind() const override { return "tree"; }
  Sentiment predict(const SparseVector& x) const override;
  bool has_proba() const override { return true; }
  Probs predict_proba(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<TreeModel> from_json(const nlohmann::json& j);
};

// CART with class-weight-weighted Gini impurity; thresholds at midpoints of
// sorted distinct node values (implicit zeros included); grows until pure or
// fewer than 2 samples; deterministic ascending feature scan.
std::unique_ptr<TreeModel> train_tree(const DocTermMatrix& X, const std::vector<Sentiment>& y,
                                      const ClassWeights& w, const TrainConfig& cfg);

class ForestModel final : public Model {
 public:
  std::vector<TreeModel> trees;
  std::uint64_t seed = 0;

  std::string kind() const override { return "forest"; }
  Sentiment predict(const SparseVector& x) const override;
  bool has_proba() const override { return true; }
  Probs predict_proba(const SparseVector& x) const override;  // mean of tree leaves
  nlohmann::json to_json() const override;
  static std::unique_ptr<ForestModel> from_json(const nlohmann::json& j);
};

// n_estimators trees on bootstrap resamples; tree i draws from
// Rng(mix_seed(cfg.seed, i)) and considers ceil(sqrt(|features|)) candidate
// features per split, so any n_jobs gives identical forests.
std::unique_ptr<ForestModel> train_forest(const DocTermMatrix& X,
                                          const std::vector<Sentiment>& y,
                                          const ClassWeights& w, int n_estimators,
                                          const TrainConfig& cfg, int n_jobs = 1);

// ---------------------------------------------------------------- voting --

enum class VoteMode : int { Hard = 0, Soft = 1 };

// Plurality over member labels; ties go to the class with the higher
// training prior, then class order.
Sentiment vote_hard(const std::vector<Sentiment>& member_labels,
                    const std::array<double, 3>& prior);
// Argmax of the unweighted mean of member probability vectors, same ties.
Sentiment vote_soft(const std::vector<Probs>& member_probs,
                    const std::array<double, 3>& prior);

class VotingModel final : public Model {
 public:
  VoteMode mode = VoteMode::Hard;
  std::vector<std::unique_ptr<Model>> members;  // svm, logreg, forest
  std::array<double, 3> prior{};

  std::string kind() const override {
    return mode == VoteMode::Hard ? "vote-hard" : "vote-soft";
  }
  Sentiment predict(const SparseVector& x) const override;
  bool has_proba() const override { return mode == VoteMode::Soft; }
  Probs predict_proba(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  static std::unique_ptr<VotingModel> from_json(const nlohmann::json& j);
};

// Soft mode requires every member to produce probabilities; a member that
// cannot is a ConfigError (an uncalibrated svm, in practice).
std::unique_ptr<VotingModel> make_voting(VoteMode mode, std::unique_ptr<Model> svm,
                                         std::unique_ptr<Model> logreg,
                                         std::unique_ptr<Model> forest,
                                         const std::vector<Sentiment>& y_train);

}  // namespace sentimix
