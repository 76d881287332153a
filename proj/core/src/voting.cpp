#include <cstdint>
#include <utility>

#include <json.hpp>

#include "sentimix/error.hpp"
#include "sentimix/models.hpp"

namespace sentimix {
namespace {

// Shared tie policy: higher prior wins, then the lower class index.
Sentiment best_class(const std::array<double, 3>& score,
                     const std::array<double, 3>& prior) {
  size_t best = 0;
  for (size_t c = 1; c < 3; ++c) {
    if (score[c] > score[best] ||
        (score[c] == score[best] && prior[c] > prior[best]))
      best = c;
  }
  return static_cast<Sentiment>(best);
}

}  // namespace

Sentiment vote_hard(const std::vector<Sentiment>& member_labels,
                    const std::array<double, 3>& prior) {
  if (member_labels.empty()) throw ValueError("vote over zero members");
  std::array<double, 3> counts{};
  for (Sentiment s : member_labels) counts[static_cast<size_t>(s)] += 1.0;
  return best_class(counts, prior);
}

Sentiment vote_soft(const std::vector<Probs>& member_probs,
                    const std::array<double, 3>& prior) {
  if (member_probs.empty()) throw ValueError("vote over zero members");
  std::array<double, 3> mean{};
  for (const Probs& p : member_probs)
    for (size_t c = 0; c < 3; ++c) mean[c] += p[c];
  for (size_t c = 0; c < 3; ++c)
    mean[c] /= static_cast<double>(member_probs.size());
  return best_class(mean, prior);
}

Sentiment VotingModel::predict(const SparseVector& x) const {
  if (mode == VoteMode::Hard) {
    std::vector<Sentiment> labels;
    labels.reserve(members.size());
    for (const auto& m : members) labels.push_back(m->predict(x));
    return vote_hard(labels, prior);
  }
  std::vector<Probs> probs;
  probs.reserve(members.size());
  for (const auto& m : members) probs.push_back(m->predict_proba(x));
  return vote_soft(probs, prior);
}

Probs VotingModel::predict_proba(const SparseVector& x) const {
  if (mode != VoteMode::Soft)
    throw ConfigError("hard voting does not produce probabilities");
  Probs mean{};
  for (const auto& m : members) {
    Probs p = m->predict_proba(x);
    for (size_t c = 0; c < 3; ++c) mean[c] += p[c];
  }
  for (size_t c = 0; c < 3; ++c)
    mean[c] /= static_cast<double>(members.size());
  return mean;
}

nlohmann::json VotingModel::to_json() const {
  nlohmann::json jm = nlohmann::json::array();
  for (const auto& m : members) jm.push_back(m->to_json());
  return {{"format", "sentimix.model"},
          {"version", 1},
          {"kind", kind()},
          {"prior", {prior[0], prior[1], prior[2]}},
          {"members", jm}};
}

std::unique_ptr<VotingModel> VotingModel::from_json(const nlohmann::json& j) {
  auto m = std::make_unique<VotingModel>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "vote-hard")
    m->mode = VoteMode::Hard;
  else if (kind == "vote-soft")
    m->mode = VoteMode::Soft;
  else
    throw FormatError("voting: unknown kind '" + kind + "'");
  const auto& jp = j.at("prior");
  if (!jp.is_array() || jp.size() != 3)
    throw FormatError("voting: prior must have 3 entries");
  for (size_t c = 0; c < 3; ++c) m->prior[c] = jp[c].get<double>();
  const auto& jm = j.at("members");
  if (!jm.is_array() || jm.empty())
    throw FormatError("voting: expected a non-empty member array");
  for (const auto& mj : jm) m->members.push_back(model_from_json(mj));
  if (m->mode == VoteMode::Soft)
    for (const auto& member : m->members)
      if (!member->has_proba())
        throw ConfigError("soft voting member '" + member->kind() +
                          "' does not produce probabilities");
  return m;
}

std::unique_ptr<VotingModel> make_voting(VoteMode mode,
                                         std::unique_ptr<Model> svm,
                                         std::unique_ptr<Model> logreg,
                                         std::unique_ptr<Model> forest,
                                         const std::vector<Sentiment>& y_train) {
  if (!svm || !logreg || !forest)
    throw ValueError("voting requires all three members");
  auto m = std::make_unique<VotingModel>();
  m->mode = mode;
  m->prior = class_priors(y_train);
  m->members.push_back(std::move(svm));
  m->members.push_back(std::move(logreg));
  m->members.push_back(std::move(forest));
  if (mode == VoteMode::Soft)
    for (const auto& member : m->members)
      if (!member->has_proba())
        throw ConfigError("soft voting member '" + member->kind() +
                          "' does not produce probabilities");
  return m;
}

}  // namespace sentimix
