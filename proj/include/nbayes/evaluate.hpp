#pragma once

#include <cstddef>
#include <optional>
#include <type_traits>
#include <variant>
#include <vector>

#include "nbayes/exact_bayes.hpp"
#include "nbayes/naive_bayes.hpp"
#include "nbayes/schema.hpp"

namespace nbayes {

struct EvaluationReport {
  std::size_t total = 0;        // rows in the dataset
  std::size_t evaluated = 0;    // rows that received a decision
  std::size_t undecidable = 0;  // rows with zero probability under every class
  double accuracy = 0.0;        // trace(confusion) / evaluated
  std::vector<std::vector<std::size_t>> confusion;  // [true label][decision]
  std::optional<double> empirical_risk;             // mean loss over evaluated rows

  double misclassification_rate() const { return 1.0 - accuracy; }
};

// Posterior for one instance, or nullopt when it is undecidable.
inline std::optional<FiniteDistribution> try_posterior(const NaiveBayesModel& model, const Instance& x) {
  auto s = joint_log_scores(model, x);
  if (log_sum_exp(s) == kNegInf) return std::nullopt;
  return softmax(s);
}

inline std::optional<FiniteDistribution> try_posterior(const JointTable& joint, const Instance& x) {
  require_valid_instance(joint.schema(), x);
  const std::size_t code = encode_instance(joint.schema(), x);
  if (!(joint.marginal(code) > 0.0)) return std::nullopt;
  return exact_posterior(joint, x);
}

// Min-error decision, or min-risk when a loss matrix is given.
template <typename Model>
std::optional<std::size_t> decide(const Model& model, const Instance& x, const LossMatrix* loss) {
  if constexpr (std::is_same_v<Model, NaiveBayesModel>) {
    if (loss == nullptr) {
      auto s = joint_log_scores(model, x);
      return argmax_score(s);
    }
  }
  auto post = try_posterior(model, x);
  if (!post) return std::nullopt;
  return loss ? min_risk_action(*post, *loss) : post->argmax();
}

template <typename Model>
EvaluationReport evaluate(const Model& model, const LabeledDataset& dataset,
                          const std::optional<LossMatrix>& loss = std::nullopt) {
  if (!(dataset.schema == model.schema())) throw Error("dataset schema does not match the model schema");
  if (!(dataset.label_space == model.label_space())) throw Error("dataset labels do not match the model labels");
  require_valid_dataset(dataset);
  const std::size_t m = model.label_space().size();
  if (loss && loss->size() != m) throw Error("loss matrix size does not match the label count");

  EvaluationReport report;
  report.total = dataset.size();
  report.confusion.assign(m, std::vector<std::size_t>(m, 0));
  double loss_sum = 0.0;
  for (const auto& row : dataset.rows) {
    auto d = decide(model, row.instance, loss ? &*loss : nullptr);
    if (!d) {
      ++report.undecidable;
      continue;
    }
    ++report.evaluated;
    ++report.confusion[row.label][*d];
    if (loss) loss_sum += (*loss)(*d, row.label);
  }
  std::size_t correct = 0;
  for (std::size_t k = 0; k < m; ++k) correct += report.confusion[k][k];
  if (report.evaluated > 0) {
    report.accuracy = static_cast<double>(correct) / static_cast<double>(report.evaluated);
    if (loss) report.empirical_risk = loss_sum / static_cast<double>(report.evaluated);
  }
  return report;
}

}  // namespace nbayes
