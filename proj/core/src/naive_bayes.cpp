#include <algorithm>
#include <cmath>
#include <limits>

#include "sentimix/error.hpp"
#include "sentimix/models.hpp"

namespace sentimix {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// Normalizes log-scores into probabilities; -inf scores become exact zeros.
Probs from_log_scores(const std::array<double, 3>& score) {
  double hi = kNegInf;
  for (double s : score) hi = std::max(hi, s);
  Probs p{};
  double sum = 0.0;
  for (size_t c = 0; c < 3; ++c) {
    p[c] = score[c] == kNegInf ? 0.0 : std::exp(score[c] - hi);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

size_t argmax3(const std::array<double, 3>& v) {
  size_t best = 0;
  for (size_t c = 1; c < 3; ++c)
    if (v[c] > v[best]) best = c;
  return best;
}

}  // namespace

// ------------------------------------------------------------------- mnb --

namespace {

std::array<double, 3> mnb_scores(const MnbModel& m, const SparseVector& x) {
  std::array<double, 3> score = m.log_prior;
  for (const auto& e : x.entries) {
    if (static_cast<size_t>(e.col) >= m.log_theta[0].size())
      throw ValueError("feature vector is wider than the trained model");
    for (size_t c = 0; c < 3; ++c)
      if (score[c] != kNegInf)
        score[c] += e.value * m.log_theta[c][static_cast<size_t>(e.col)];
  }
  return score;
}

}  // namespace

Sentiment MnbModel::predict(const SparseVector& x) const {
  return static_cast<Sentiment>(argmax3(mnb_scores(*this, x)));
}

Probs MnbModel::predict_proba(const SparseVector& x) const {
  return from_log_scores(mnb_scores(*this, x));
}

nlohmann::json MnbModel::to_json() const {
  nlohmann::json j;
  j["format"] = "sentimix.model";
  j["version"] = 1;
  j["kind"] = "mnb";
  j["alpha"] = alpha;
  nlohmann::json priors = nlohmann::json::array();
  for (double p : log_prior) priors.push_back(p == kNegInf ? nlohmann::json() : nlohmann::json(p));
  j["log_prior"] = priors;
  j["log_theta"] = {log_theta[0], log_theta[1], log_theta[2]};
  return j;
}

std::unique_ptr<MnbModel> MnbModel::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<MnbModel>();
  m->alpha = j.at("alpha").get<double>();
  for (size_t c = 0; c < 3; ++c) {
    const auto& p = j.at("log_prior").at(c);
    m->log_prior[c] = p.is_null() ? kNegInf : p.get<double>();
    m->log_theta[c] = j.at("log_theta").at(c).get<std::vector<double>>();
  }
  return m;
}

std::unique_ptr<MnbModel> train_mnb(const DocTermMatrix& X, const std::vector<Sentiment>& y,
                                    double alpha) {
  if (X.rows.empty()) throw ValueError("cannot train on an empty set");
  if (X.rows.size() != y.size()) throw ValueError("row and label counts differ");
  if (alpha <= 0.0) throw ValueError("smoothing alpha must be positive");

  const size_t dim = static_cast<size_t>(X.n_cols);
  std::array<std::vector<double>, 3> count;
  for (auto& c : count) c.assign(dim, 0.0);
  std::array<double, 3> n_docs{};
  for (size_t i = 0; i < X.rows.size(); ++i) {
    const size_t c = static_cast<size_t>(y[i]);
    n_docs[c] += 1.0;
    for (const auto& e : X.rows[i].entries) {
      if (e.value < 0.0)
        throw ValueError("multinomial NB requires nonnegative features");
      count[c][static_cast<size_t>(e.col)] += e.value;
    }
  }

  auto m = std::make_unique<MnbModel>();
  m->alpha = alpha;
  const double total_docs = static_cast<double>(X.rows.size());
  for (size_t c = 0; c < 3; ++c) {
    m->log_prior[c] = n_docs[c] > 0 ? std::log(n_docs[c] / total_docs) : kNegInf;
    m->log_theta[c].assign(dim, 0.0);
    double total = 0.0;
    for (double v : count[c]) total += v;
    const double denom = total + alpha * static_cast<double>(dim);
    for (size_t t = 0; t < dim; ++t)
      m->log_theta[c][t] = std::log((count[c][t] + alpha) / denom);
  }
  return m;
}

// ------------------------------------------------------------------- gnb --

namespace {

std::array<double, 3> gnb_scores(const GnbModel& m, const SparseVector& x) {
  std::array<double, 3> score{};
  for (size_t c = 0; c < 3; ++c) {
    if (m.log_prior[c] == kNegInf) {
      score[c] = kNegInf;
      continue;
    }
    score[c] = m.log_prior[c] + m.zero_loglik[c];
    for (const auto& e : x.entries) {
      const size_t t = static_cast<size_t>(e.col);
      if (t >= m.mean[c].size())
        throw ValueError("feature vector is wider than the trained model");
      // replaces the x=0 term baked into zero_loglik with the real value:
      // delta = ((x - mu)^2 - mu^2) / (2 var)
      const double mu = m.mean[c][t];
      const double var = m.variance[c][t];
      const double dx = e.value - mu;
      score[c] -= (dx * dx - mu * mu) / (2.0 * var);
    }
  }
  return score;
}

}  // namespace

Sentiment GnbModel::predict(const SparseVector& x) const {
  return static_cast<Sentiment>(argmax3(gnb_scores(*this, x)));
}

Probs GnbModel::predict_proba(const SparseVector& x) const {
  return from_log_scores(gnb_scores(*this, x));
}

nlohmann::json GnbModel::to_json() const {
  nlohmann::json j;
  j["format"] = "sentimix.model";
  j["version"] = 1;
  j["kind"] = "gnb";
  nlohmann::json priors = nlohmann::json::array();
  for (double p : log_prior) priors.push_back(p == kNegInf ? nlohmann::json() : nlohmann::json(p));
  j["log_prior"] = priors;
  j["mean"] = {mean[0], mean[1], mean[2]};
  j["variance"] = {variance[0], variance[1], variance[2]};
  j["zero_loglik"] = zero_loglik;
  return j;
}

std::unique_ptr<GnbModel> GnbModel::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<GnbModel>();
  for (size_t c = 0; c < 3; ++c) {
    const auto& p = j.at("log_prior").at(c);
    m->log_prior[c] = p.is_null() ? kNegInf : p.get<double>();
    m->mean[c] = j.at("mean").at(c).get<std::vector<double>>();
    m->variance[c] = j.at("variance").at(c).get<std::vector<double>>();
  }
  auto z = j.at("zero_loglik").get<std::vector<double>>();
  std::copy(z.begin(), z.end(), m->zero_loglik.begin());
  return m;
}

std::unique_ptr<GnbModel> train_gnb(const DocTermMatrix& X, const std::vector<Sentiment>& y,
                                    const GnbConfig& cfg) {
  if (X.rows.empty()) throw ValueError("cannot train on an empty set");
  if (X.rows.size() != y.size()) throw ValueError("row and label counts differ");

  const std::uint64_t dense_bytes = static_cast<std::uint64_t>(X.rows.size()) *
                                    static_cast<std::uint64_t>(X.n_cols) * sizeof(double);
  if (dense_bytes > cfg.memory_budget_bytes)
    throw ResourceError("gaussian NB needs a dense " + std::to_string(X.rows.size()) + " x " +
                        std::to_string(X.n_cols) + " matrix (" + std::to_string(dense_bytes) +
                        " bytes), over the budget of " +
                        std::to_string(cfg.memory_budget_bytes));

  const size_t dim = static_cast<size_t>(X.n_cols);
  std::array<std::vector<double>, 3> sum, sumsq;
  for (size_t c = 0; c < 3; ++c) {
    sum[c].assign(dim, 0.0);
    sumsq[c].assign(dim, 0.0);
  }
  std::array<double, 3> n_docs{};
  for (size_t i = 0; i < X.rows.size(); ++i) {
    const size_t c = static_cast<size_t>(y[i]);
    n_docs[c] += 1.0;
    for (const auto& e : X.rows[i].entries) {
      sum[c][static_cast<size_t>(e.col)] += e.value;
      sumsq[c][static_cast<size_t>(e.col)] += e.value * e.value;
    }
  }

  // epsilon follows the population spread: var_smoothing times the largest
  // per-feature variance over the whole training set, floored so all-constant
  // data still smooths.
  double max_var = 0.0;
  const double n_total = static_cast<double>(X.rows.size());
  for (size_t t = 0; t < dim; ++t) {
    double s = sum[0][t] + sum[1][t] + sum[2][t];
    double sq = sumsq[0][t] + sumsq[1][t] + sumsq[2][t];
    double mu = s / n_total;
    max_var = std::max(max_var, std::max(0.0, sq / n_total - mu * mu));
  }
  double epsilon = cfg.var_smoothing * max_var;
  if (epsilon <= 0.0) epsilon = 1e-12;

  auto m = std::make_unique<GnbModel>();
  for (size_t c = 0; c < 3; ++c) {
    m->mean[c].assign(dim, 0.0);
    m->variance[c].assign(dim, epsilon);
    m->zero_loglik[c] = 0.0;
    if (n_docs[c] == 0) {
      m->log_prior[c] = kNegInf;
      continue;
    }
    m->log_prior[c] = std::log(n_docs[c] / n_total);
    for (size_t t = 0; t < dim; ++t) {
      const double mu = sum[c][t] / n_docs[c];
      const double var =
          std::max(0.0, sumsq[c][t] / n_docs[c] - mu * mu) + epsilon;
      m->mean[c][t] = mu;
      m->variance[c][t] = var;
      m->zero_loglik[c] +=
          -0.5 * std::log(2.0 * kPi * var) - mu * mu / (2.0 * var);
    }
  }
  return m;
}

}  // namespace sentimix
