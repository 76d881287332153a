#include "sentimix/eval.hpp"

#include "sentimix/error.hpp"

namespace sentimix {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : m)
    for (std::uint64_t v : row) n += v;
  return n;
}

ConfusionMatrix confusion(const std::vector<Sentiment>& y_true,
                          const std::vector<Sentiment>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw ValueError("label vectors differ in length: " + std::to_string(y_true.size()) +
                     " vs " + std::to_string(y_pred.size()));
  if (y_true.empty()) throw ValueError("cannot evaluate empty label vectors");
  ConfusionMatrix cm;
  for (size_t i = 0; i < y_true.size(); ++i)
    ++cm.m[static_cast<size_t>(y_true[i])][static_cast<size_t>(y_pred[i])];
  return cm;
}

EvalReport evaluate_confusion(const ConfusionMatrix& cm) {
  EvalReport r;
  r.confusion = cm;
  std::uint64_t correct = 0;
  for (size_t c = 0; c < 3; ++c) {
    std::uint64_t tp = cm.m[c][c];
    std::uint64_t fp = 0, fn = 0;
    for (size_t o = 0; o < 3; ++o) {
      if (o == c) continue;
      fp += cm.m[o][c];
      fn += cm.m[c][o];
    }
    correct += tp;
    r.precision[c] = tp + fp == 0 ? 0.0
                                  : static_cast<double>(tp) / static_cast<double>(tp + fp);
    r.recall[c] = tp + fn == 0 ? 0.0
                               : static_cast<double>(tp) / static_cast<double>(tp + fn);
    double pr = r.precision[c] + r.recall[c];
    r.f1[c] = pr == 0.0 ? 0.0 : 2.0 * r.precision[c] * r.recall[c] / pr;
  }
  r.macro_f1 = (r.f1[0] + r.f1[1] + r.f1[2]) / 3.0;
  std::uint64_t n = cm.total();
  r.accuracy = n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n);
  return r;
}

EvalReport evaluate(const std::vector<Sentiment>& y_true,
                    const std::vector<Sentiment>& y_pred) {
  return evaluate_confusion(confusion(y_true, y_pred));
}

double macro_f1(const std::vector<Sentiment>& y_true,
                const std::vector<Sentiment>& y_pred) {
  return evaluate(y_true, y_pred).macro_f1;
}

double macro_f1_from_confusion(const ConfusionMatrix& cm) {
  return evaluate_confusion(cm).macro_f1;
}

}  // namespace sentimix
