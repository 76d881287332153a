#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sentimix/error.hpp"
#include "sentimix/models.hpp"

namespace sentimix {
namespace {

void check_width(const LinearParams& p, const SparseVector& x) {
  if (!x.entries.empty() &&
      static_cast<size_t>(x.entries.back().col) >= p.W[0].size())
    throw ValueError("feature vector is wider than the trained model");
}

std::array<double, 3> scores_of(const LinearParams& p, const SparseVector& x) {
  check_width(p, x);
  std::array<double, 3> z = p.b;
  for (const auto& e : x.entries)
    for (size_t c = 0; c < 3; ++c)
      z[c] += p.W[c][static_cast<size_t>(e.col)] * e.value;
  return z;
}

Probs softmax(std::array<double, 3> z) {
  double hi = std::max({z[0], z[1], z[2]});
  double sum = 0.0;
  Probs p{};
  for (size_t c = 0; c < 3; ++c) {
    p[c] = std::exp(z[c] - hi);
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

// 1 / (1 + exp(f)) without overflow.
double inv_logit(double f) {
  if (f > 0) {
    double e = std::exp(-f);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(f));
}

nlohmann::json params_to_json(const LinearParams& p) {
  nlohmann::json j;
  j["W"] = {p.W[0], p.W[1], p.W[2]};
  j["b"] = p.b;
  return j;
}

LinearParams params_from_json(const nlohmann::json& j) {
  LinearParams p;
  for (size_t c = 0; c < 3; ++c) p.W[c] = j.at("W").at(c).get<std::vector<double>>();
  auto b = j.at("b").get<std::vector<double>>();
  if (b.size() != 3 || p.W[1].size() != p.W[0].size() || p.W[2].size() != p.W[0].size())
    throw FormatError("malformed linear parameters");
  std::copy(b.begin(), b.end(), p.b.begin());
  return p;
}

}  // namespace

// ---------------------------------------------------------------- logreg --

double logreg_loss(const LinearParams& p, const DocTermMatrix& X,
                   const std::vector<Sentiment>& y, const ClassWeights& w,
                   double l2_lambda) {
  double loss = 0.0;
  for (size_t i = 0; i < X.rows.size(); ++i) {
    auto z = scores_of(p, X.rows[i]);
    double hi = std::max({z[0], z[1], z[2]});
    double lse = std::log(std::exp(z[0] - hi) + std::exp(z[1] - hi) + std::exp(z[2] - hi)) + hi;
    loss += w.of(y[i]) * (lse - z[static_cast<size_t>(y[i])]);
  }
  loss /= static_cast<double>(X.rows.size());
  double sq = 0.0;
  for (const auto& wc : p.W)
    for (double v : wc) sq += v * v;
  return loss + 0.5 * l2_lambda * sq;
}

LinearParams logreg_gradient(const LinearParams& p, const DocTermMatrix& X,
                             const std::vector<Sentiment>& y, const ClassWeights& w,
                             double l2_lambda) {
  const double n = static_cast<double>(X.rows.size());
  LinearParams g;
  for (size_t c = 0; c < 3; ++c) g.W[c].assign(p.W[c].size(), 0.0);
  for (size_t i = 0; i < X.rows.size(); ++i) {
    Probs probs = softmax(scores_of(p, X.rows[i]));
    const double wi = w.of(y[i]);
    for (size_t c = 0; c < 3; ++c) {
      double coef = wi * (probs[c] - (static_cast<size_t>(y[i]) == c ? 1.0 : 0.0));
      g.b[c] += coef;
      for (const auto& e : X.rows[i].entries)
        g.W[c][static_cast<size_t>(e.col)] += coef * e.value;
    }
  }
  for (size_t c = 0; c < 3; ++c) {
    g.b[c] /= n;
    for (size_t d = 0; d < g.W[c].size(); ++d)
      g.W[c][d] = g.W[c][d] / n + l2_lambda * p.W[c][d];
  }
  return g;
}

Sentiment LogregModel::predict(const SparseVector& x) const {
  return static_cast<Sentiment>(argmax3(scores_of(params, x)));
}

Probs LogregModel::predict_proba(const SparseVector& x) const {
  return softmax(scores_of(params, x));
}

nlohmann::json LogregModel::to_json() const {
  nlohmann::json j = params_to_json(params);
  j["format"] = "sentimix.model";
  j["version"] = 1;
  j["kind"] = "logreg";
  return j;
}

std::unique_ptr<LogregModel> LogregModel::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<LogregModel>();
  m->params = params_from_json(j);
  return m;
}

std::unique_ptr<LogregModel> train_logreg(const DocTermMatrix& X,
                                          const std::vector<Sentiment>& y,
                                          const ClassWeights& w, const TrainConfig& cfg) {
  if (X.rows.empty()) throw ValueError("cannot train on an empty set");
  if (X.rows.size() != y.size())
    throw ValueError("row and label counts differ");
  auto model = std::make_unique<LogregModel>();
  for (size_t c = 0; c < 3; ++c)
    model->params.W[c].assign(static_cast<size_t>(X.n_cols), 0.0);

  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    double loss = logreg_loss(model->params, X, y, w, cfg.l2_lambda);
    if (!std::isfinite(loss))
      throw ValueError("logistic regression diverged; lower the learning rate");
    if (prev - loss < cfg.tolerance && iter > 0) break;
    prev = loss;
    LinearParams g = logreg_gradient(model->params, X, y, w, cfg.l2_lambda);
    for (size_t c = 0; c < 3; ++c) {
      model->params.b[c] -= cfg.learning_rate * g.b[c];
      for (size_t d = 0; d < g.W[c].size(); ++d)
        model->params.W[c][d] -= cfg.learning_rate * g.W[c][d];
    }
  }
  return model;
}

// ------------------------------------------------------------------- svm --

std::array<double, 3> SvmModel::margins(const SparseVector& x) const {
  return scores_of(params, x);
}

Sentiment SvmModel::predict(const SparseVector& x) const {
  return static_cast<Sentiment>(argmax3(margins(x)));
}

Probs SvmModel::predict_proba(const SparseVector& x) const {
  if (!calibration)
    throw ConfigError("svm produces probabilities only after Platt calibration");
  auto m = margins(x);
  Probs p{};
  double sum = 0.0;
  for (size_t c = 0; c < 3; ++c) {
    const auto& s = (*calibration)[c];
    p[c] = std::clamp(inv_logit(s.a * m[c] + s.b), 1e-12, 1.0 - 1e-12);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

nlohmann::json SvmModel::to_json() const {
  nlohmann::json j = params_to_json(params);
  j["format"] = "sentimix.model";
  j["version"] = 1;
  j["kind"] = "svm";
  if (calibration) {
    nlohmann::json cal = nlohmann::json::array();
    for (const auto& s : *calibration) cal.push_back({s.a, s.b});
    j["calibration"] = cal;
  }
  return j;
}

std::unique_ptr<SvmModel> SvmModel::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<SvmModel>();
  m->params = params_from_json(j);
  if (j.contains("calibration")) {
    std::array<PlattSigmoid, 3> cal;
    for (size_t c = 0; c < 3; ++c) {
      cal[c].a = j.at("calibration").at(c).at(0).get<double>();
      cal[c].b = j.at("calibration").at(c).at(1).get<double>();
    }
    m->calibration = cal;
  }
  return m;
}

std::unique_ptr<SvmModel> train_linear_svm(const DocTermMatrix& X,
                                           const std::vector<Sentiment>& y,
                                           const ClassWeights& w, const TrainConfig& cfg) {
  if (X.rows.empty()) throw ValueError("cannot train on an empty set");
  if (X.rows.size() != y.size())
    throw ValueError("row and label counts differ");
  if (cfg.learning_rate * cfg.l2_lambda >= 1.0)
    throw ValueError("learning_rate * l2_lambda must stay below 1");

  const size_t n = X.rows.size();
  const size_t dim = static_cast<size_t>(X.n_cols);
  auto model = std::make_unique<SvmModel>();
  Rng rng(cfg.seed);
  std::vector<size_t> order(n);

  for (size_t cls = 0; cls < 3; ++cls) {
    std::vector<double> v(dim, 0.0);
    double scale = 1.0;
    double bias = 0.0;
    std::uint64_t step = 0;
    std::iota(order.begin(), order.end(), size_t{0});
    for (int epoch = 0; epoch < cfg.max_iters; ++epoch) {
      rng.shuffle(order);
      for (size_t i : order) {
        const double eta =
            cfg.learning_rate / (1.0 + static_cast<double>(step) / static_cast<double>(n));
        scale *= 1.0 - eta * cfg.l2_lambda;
        if (scale < 1e-100) {
          for (double& d : v) d *= scale;
          scale = 1.0;
        }
        const SparseVector& x = X.rows[i];
        const double t = static_cast<size_t>(y[i]) == cls ? 1.0 : -1.0;
        double dot = 0.0;
        for (const auto& e : x.entries) dot += v[static_cast<size_t>(e.col)] * e.value;
        if (t * (scale * dot + bias) < 1.0) {
          const double push = eta * w.of(y[i]) * t;
          const double unscaled = push / scale;
          for (const auto& e : x.entries)
            v[static_cast<size_t>(e.col)] += unscaled * e.value;
          bias += push;
        }
        ++step;
      }
    }
    model->params.W[cls].resize(dim);
    for (size_t d = 0; d < dim; ++d) model->params.W[cls][d] = scale * v[d];
    model->params.b[cls] = bias;
  }
  return model;
}

std::unique_ptr<SvmModel> calibrate_platt(const SvmModel& svm, const DocTermMatrix& X_cal,
                                          const std::vector<Sentiment>& y_cal) {
  if (X_cal.rows.empty()) throw ValueError("calibration set is empty");
  if (X_cal.rows.size() != y_cal.size())
    throw ValueError("row and label counts differ");
  {
    std::array<bool, 3> seen{};
    for (Sentiment s : y_cal) seen[static_cast<size_t>(s)] = true;
    int distinct = static_cast<int>(seen[0]) + seen[1] + seen[2];
    if (distinct < 2)
      throw ValueError("calibration needs at least two classes");
  }

  const size_t n = X_cal.rows.size();
  std::vector<std::array<double, 3>> margins(n);
  for (size_t i = 0; i < n; ++i) margins[i] = svm.margins(X_cal.rows[i]);

  auto out = std::make_unique<SvmModel>();
  out->params = svm.params;
  std::array<PlattSigmoid, 3> cal;

  for (size_t cls = 0; cls < 3; ++cls) {
    auto loss_at = [&](double a, double b) {
      double loss = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double p = std::clamp(inv_logit(a * margins[i][cls] + b), 1e-12, 1.0 - 1e-12);
        double z = static_cast<size_t>(y_cal[i]) == cls ? 1.0 : 0.0;
        loss -= z * std::log(p) + (1.0 - z) * std::log(1.0 - p);
      }
      return loss / static_cast<double>(n);
    };

    double a = -1.0, b = 0.0;
    double best_a = a, best_b = b;
    double loss = loss_at(a, b);
    double best_loss = loss;
    double lr = 1.0;
    for (int iter = 0; iter < 2000 && lr > 1e-13; ++iter) {
      double ga = 0.0, gb = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double p = inv_logit(a * margins[i][cls] + b);
        double z = static_cast<size_t>(y_cal[i]) == cls ? 1.0 : 0.0;
        ga += (z - p) * margins[i][cls];
        gb += z - p;
      }
      ga /= static_cast<double>(n);
      gb /= static_cast<double>(n);
      double na = a - lr * ga;
      double nb = b - lr * gb;
      double nloss = loss_at(na, nb);
      if (nloss < loss) {
        double gain = loss - nloss;
        a = na;
        b = nb;
        loss = nloss;
        lr *= 1.1;
        if (loss < best_loss) {
          best_loss = loss;
          best_a = a;
          best_b = b;
        }
        if (gain < 1e-13) break;
      } else {
        lr *= 0.5;
      }
    }
    cal[cls] = {best_a, best_b};
  }
  out->calibration = cal;
  return out;
}

}  // namespace sentimix
