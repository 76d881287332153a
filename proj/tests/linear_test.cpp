#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sentimix/error.hpp"
#include "sentimix/models.hpp"
#include "support.hpp"

using namespace sentimix;
using testsupport::labels;
using testsupport::matrix;
using testsupport::sv;

namespace {

// Separable toy problem: one indicator feature per class.
DocTermMatrix indicator_matrix() {
  return matrix({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 1}});
}
std::vector<Sentiment> indicator_labels() { return labels({0, 0, 1, 1, 2, 2}); }

}  // namespace

TEST_CASE("class weights satisfy the balanced formula") {
  const ClassWeights balanced = compute_class_weights(labels({0, 1, 2}));
  for (double v : balanced.w) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  const ClassWeights skewed = compute_class_weights(labels({0, 0, 1, 2}));
  CHECK(skewed.w[0] == doctest::Approx(4.0 / (3.0 * 2.0)).epsilon(1e-12));
  CHECK(skewed.w[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(skewed.w[2] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  // sum_c w_c * n_c = n_total
  const std::vector<Sentiment> y = labels({0, 0, 0, 1, 1, 2, 2, 2, 2});
  const ClassWeights w = compute_class_weights(y);
  double total = 0.0;
  for (Sentiment s : y) total += w.of(s);
  CHECK(total == doctest::Approx(static_cast<double>(y.size())).epsilon(1e-12));

  // Absent classes get weight 1 and present ones split evenly.
  const ClassWeights two = compute_class_weights(labels({0, 0, 1, 1}));
  CHECK(two.w[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(two.w[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(two.w[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rng is deterministic, bounded and shuffles into a permutation") {
  Rng a(42), b(42), c(7);
  bool all_equal = true;
  bool any_diff_seed = false;
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t va = a.next();
    all_equal = all_equal && va == b.next();
    any_diff_seed = any_diff_seed || va != c.next();
  }
  CHECK(all_equal);
  CHECK(any_diff_seed);

  Rng r(3);
  for (int i = 0; i < 500; ++i) {
    CHECK(r.bounded(7) < 7);
    const double u = r.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }

  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  Rng s1(9), s2(9);
  auto w1 = v, w2 = v;
  s1.shuffle(w1);
  s2.shuffle(w2);
  CHECK(w1 == w2);
  auto sorted = w1;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);

  CHECK(mix_seed(0, 0) != mix_seed(0, 1));
  CHECK(mix_seed(0, 0) != mix_seed(1, 0));
  CHECK(mix_seed(5, 3) == mix_seed(5, 3));
}

TEST_CASE("logreg gradient matches central finite differences") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.bounded(18));
    const int d = 2 + static_cast<int>(rng.bounded(11));
    DocTermMatrix X;
    X.n_cols = d;
    std::vector<Sentiment> y;
    for (int i = 0; i < n; ++i) {
      SparseVector row;
      for (int c = 0; c < d; ++c)
        if (rng.unit() < 0.6) row.entries.push_back({c, rng.unit() * 4.0 - 2.0});
      X.rows.push_back(std::move(row));
      y.push_back(static_cast<Sentiment>(rng.bounded(3)));
    }
    const ClassWeights w = compute_class_weights(y);
    const double lambda = trial % 3 == 0 ? 0.0 : rng.unit() * 0.1;

    LinearParams p;
    for (int c = 0; c < 3; ++c) {
      p.W[static_cast<size_t>(c)].resize(static_cast<size_t>(d));
      for (double& v : p.W[static_cast<size_t>(c)]) v = rng.unit() * 2.0 - 1.0;
      p.b[static_cast<size_t>(c)] = rng.unit() * 2.0 - 1.0;
    }

    const LinearParams g = logreg_gradient(p, X, y, w, lambda);
    const double h = 1e-6;
    double num = 0.0, den = 0.0;
    auto accumulate = [&](double* param, double analytic) {
      const double save = *param;
      *param = save + h;
      const double up = logreg_loss(p, X, y, w, lambda);
      *param = save - h;
      const double down = logreg_loss(p, X, y, w, lambda);
      *param = save;
      const double fd = (up - down) / (2.0 * h);
      num += (fd - analytic) * (fd - analytic);
      den += std::max(fd * fd, analytic * analytic);
    };
    for (int c = 0; c < 3; ++c) {
      for (int j = 0; j < d; ++j)
        accumulate(&p.W[static_cast<size_t>(c)][static_cast<size_t>(j)],
                   g.W[static_cast<size_t>(c)][static_cast<size_t>(j)]);
      accumulate(&p.b[static_cast<size_t>(c)], g.b[static_cast<size_t>(c)]);
    }
    const double rel = std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("logreg separates the indicator problem") {
  const DocTermMatrix X = indicator_matrix();
  const auto y = indicator_labels();
  const auto model = train_logreg(X, y, compute_class_weights(y), TrainConfig{});
  for (size_t i = 0; i < X.rows.size(); ++i) CHECK(model->predict(X.rows[i]) == y[i]);
  const Probs p = model->predict_proba(X.rows[0]);
  double sum = 0.0;
  for (double v : p) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero-iteration logreg is uniform") {
  TrainConfig cfg;
  cfg.max_iters = 0;
  const auto model =
      train_logreg(indicator_matrix(), indicator_labels(),
                   compute_class_weights(indicator_labels()), cfg);
  const Probs p = model->predict_proba(sv({{0, 1.0}, {2, 3.0}}));
  for (double v : p) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("empty training set is rejected") {
  const DocTermMatrix empty;
  CHECK_THROWS_AS(train_logreg(empty, {}, ClassWeights{}, TrainConfig{}), ValueError);
  CHECK_THROWS_AS(train_linear_svm(empty, {}, ClassWeights{}, TrainConfig{}), ValueError);
}

TEST_CASE("svm reaches zero hinge violations on the separable toy set") {
  const DocTermMatrix X = indicator_matrix();
  const auto y = indicator_labels();
  TrainConfig cfg;
  cfg.l2_lambda = 0.0;
  cfg.max_iters = 2000;
  const auto model = train_linear_svm(X, y, compute_class_weights(y), cfg);
  for (size_t i = 0; i < X.rows.size(); ++i) {
    CHECK(model->predict(X.rows[i]) == y[i]);
    const auto m = model->margins(X.rows[i]);
    for (int c = 0; c < 3; ++c) {
      const double target = y[i] == static_cast<Sentiment>(c) ? 1.0 : -1.0;
      CHECK(m[static_cast<size_t>(c)] * target >= 1.0 - 1e-6);
    }
  }
}

TEST_CASE("margins are linear for zero-bias models") {
  SvmModel model;
  model.params.W = {std::vector<double>{0.5, -1.0}, std::vector<double>{2.0, 0.25},
                    std::vector<double>{-0.75, 1.5}};
  const SparseVector x = sv({{0, 1.2}, {1, -0.4}});
  SparseVector x2 = x;
  for (auto& e : x2.entries) e.value *= 2.0;
  const auto m1 = model.margins(x);
  const auto m2 = model.margins(x2);
  for (int c = 0; c < 3; ++c)
    CHECK(m2[static_cast<size_t>(c)] ==
          doctest::Approx(2.0 * m1[static_cast<size_t>(c)]).epsilon(1e-12));
}

TEST_CASE("uncalibrated svm has no probabilities") {
  const auto y = indicator_labels();
  const auto model =
      train_linear_svm(indicator_matrix(), y, compute_class_weights(y), TrainConfig{});
  CHECK_FALSE(model->has_proba());
  CHECK_THROWS_AS(model->predict_proba(sv({{0, 1.0}})), ConfigError);
}

namespace {

double sigmoid_logloss(const SvmModel& svm, const DocTermMatrix& X,
                       const std::vector<Sentiment>& y, bool calibrated) {
  double loss = 0.0;
  for (size_t i = 0; i < X.rows.size(); ++i) {
    Probs p{};
    if (calibrated) {
      p = svm.predict_proba(X.rows[i]);
    } else {
      const auto m = svm.margins(X.rows[i]);
      double sum = 0.0;
      for (int c = 0; c < 3; ++c) {
        p[static_cast<size_t>(c)] = 1.0 / (1.0 + std::exp(-m[static_cast<size_t>(c)]));
        sum += p[static_cast<size_t>(c)];
      }
      for (double& v : p) v /= sum;
    }
    loss -= std::log(std::max(p[static_cast<size_t>(y[i])], 1e-300));
  }
  return loss / static_cast<double>(X.rows.size());
}

}  // namespace

TEST_CASE("platt calibration dominates the fixed initial sigmoid") {
  const DocTermMatrix X = indicator_matrix();
  const auto y = indicator_labels();
  const auto svm = train_linear_svm(X, y, compute_class_weights(y), TrainConfig{});
  const auto calibrated = calibrate_platt(*svm, X, y);
  CHECK(calibrated->has_proba());
  for (size_t i = 0; i < X.rows.size(); ++i) {
    const Probs p = calibrated->predict_proba(X.rows[i]);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(sigmoid_logloss(*calibrated, X, y, true) <=
        sigmoid_logloss(*svm, X, y, false) + 1e-9);
  // Calibration does not change the decision function.
  for (size_t i = 0; i < X.rows.size(); ++i)
    CHECK(calibrated->predict(X.rows[i]) == svm->predict(X.rows[i]));
}

TEST_CASE("platt calibration requires two classes") {
  const DocTermMatrix X = indicator_matrix();
  const auto y = indicator_labels();
  const auto svm = train_linear_svm(X, y, compute_class_weights(y), TrainConfig{});
  const DocTermMatrix one = matrix({{1, 0, 0}, {1, 0, 0}});
  CHECK_THROWS_AS(calibrate_platt(*svm, one, labels({0, 0})), ValueError);
}

TEST_CASE("linear models round-trip through json") {
  const DocTermMatrix X = indicator_matrix();
  const auto y = indicator_labels();
  const ClassWeights w = compute_class_weights(y);

  const auto lr = train_logreg(X, y, w, TrainConfig{});
  const auto lr2 = model_from_json(lr->to_json());
  CHECK(lr2->kind() == "logreg");

  const auto svm = train_linear_svm(X, y, w, TrainConfig{});
  const auto svm2 = model_from_json(svm->to_json());
  CHECK(svm2->kind() == "svm");
  CHECK_FALSE(svm2->has_proba());

  const auto cal = calibrate_platt(*svm, X, y);
  const auto cal2 = model_from_json(cal->to_json());
  CHECK(cal2->has_proba());

  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    SparseVector x;
    for (int c = 0; c < 3; ++c)
      if (rng.unit() < 0.7) x.entries.push_back({c, rng.unit() * 2.0 - 1.0});
    CHECK(lr2->predict(x) == lr->predict(x));
    CHECK(svm2->predict(x) == svm->predict(x));
    CHECK(cal2->predict(x) == cal->predict(x));
    const Probs a = cal->predict_proba(x);
    const Probs b = cal2->predict_proba(x);
    for (int c = 0; c < 3; ++c)
      CHECK(a[static_cast<size_t>(c)] ==
            doctest::Approx(b[static_cast<size_t>(c)]).epsilon(1e-12));
  }
}

TEST_CASE("predict_all equals per-row predict") {
  const DocTermMatrix X = indicator_matrix();
  const auto y = indicator_labels();
  const auto model = train_logreg(X, y, compute_class_weights(y), TrainConfig{});
  const auto all = model->predict_all(X);
  REQUIRE(all.size() == X.rows.size());
  for (size_t i = 0; i < X.rows.size(); ++i) CHECK(all[i] == model->predict(X.rows[i]));
}
