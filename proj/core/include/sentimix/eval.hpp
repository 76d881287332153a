#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sentimix/corpus.hpp"

namespace sentimix {

// rows = true class, columns = predicted class, fixed order
// negative/neutral/positive.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 3>, 3> m{};

  std::uint64_t total() const;
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(const std::vector<Sentiment>& y_true,
                          const std::vector<Sentiment>& y_pred);

struct EvalReport {
  ConfusionMatrix confusion;
  std::array<double, 3> precision{};
  std::array<double, 3> recall{};
  std::array<double, 3> f1{};
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

EvalReport evaluate_confusion(const ConfusionMatrix& cm);
EvalReport evaluate(const std::vector<Sentiment>& y_true,
                    const std::vector<Sentiment>& y_pred);

// Unweighted mean of per-class F1 over the fixed 3-class set; zero
// denominators contribute 0. Length mismatch or empty input is a ValueError.
double macro_f1(const std::vector<Sentiment>& y_true,
                const std::vector<Sentiment>& y_pred);
double macro_f1_from_confusion(const ConfusionMatrix& cm);

}  // namespace sentimix
