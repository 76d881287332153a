#include "sentimix/models.hpp"

#include "sentimix/error.hpp"

namespace sentimix {

ClassWeights compute_class_weights(const std::vector<Sentiment>& labels) {
  if (labels.empty()) throw ValueError("cannot compute class weights of an empty label set");
  std::array<double, 3> n{};
  for (Sentiment s : labels) n[static_cast<size_t>(s)] += 1.0;
  int present = 0;
  for (double c : n)
    if (c > 0) ++present;
  ClassWeights out;
  const double total = static_cast<double>(labels.size());
  for (size_t c = 0; c < 3; ++c)
    out.w[c] = n[c] > 0 ? total / (static_cast<double>(present) * n[c]) : 1.0;
  return out;
}

std::array<double, 3> class_priors(const std::vector<Sentiment>& labels) {
  std::array<double, 3> p{};
  if (labels.empty()) return p;
  for (Sentiment s : labels) p[static_cast<size_t>(s)] += 1.0;
  for (double& v : p) v /= static_cast<double>(labels.size());
  return p;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t Rng::bounded(std::uint64_t n) {
  if (n == 0) throw ValueError("bounded draw over an empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<Sentiment> Model::predict_all(const DocTermMatrix& X) const {
  std::vector<Sentiment> out;
  out.reserve(X.rows.size());
  for (const auto& row : X.rows) out.push_back(predict(row));
  return out;
}

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "sentimix.model")
    throw FormatError("not a model file");
  if (j.value("version", 0) != 1)
    throw FormatError("unsupported model version");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "logreg") return LogregModel::from_json(j);
  if (kind == "svm") return SvmModel::from_json(j);
  if (kind == "mnb") return MnbModel::from_json(j);
  if (kind == "gnb") return GnbModel::from_json(j);
  if (kind == "knn") return KnnModel::from_json(j);
  if (kind == "tree") return TreeModel::from_json(j);
  if (kind == "forest") return ForestModel::from_json(j);
  if (kind == "vote-hard" || kind == "vote-soft") return VotingModel::from_json(j);
  throw FormatError("unknown model kind '" + kind + "'");
}

}  // namespace sentimix
