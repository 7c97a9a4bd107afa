#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "nbayes/estimation.hpp"
#include "nbayes/schema.hpp"

namespace nbayes {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum(exp(s))) without overflow or underflow; -inf when every term is -inf.
inline double log_sum_exp(std::span<const double> scores) {
  double hi = kNegInf;
  for (double s : scores) hi = std::max(hi, s);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - hi);
  return hi + std::log(acc);
}

// Lowest index among the maxima; nullopt when all scores are -inf.
inline std::optional<std::size_t> argmax_score(std::span<const double> scores) {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (scores[k] == kNegInf) continue;
    if (!best || scores[k] > scores[*best]) best = k;
  }
  return best;
}

// Per-class value distributions for a categorical feature, or per-class
// Gaussians for a real one.
using FeatureLikelihood = std::variant<std::vector<FiniteDistribution>, std::vector<Gaussian>>;

class NaiveBayesModel {
 public:
  NaiveBayesModel(FeatureSchema schema, LabelSpace labels, ClassPrior prior,
                  std::vector<FeatureLikelihood> likelihoods, SmoothingConfig smoothing = {})
      : schema_(std::move(schema)),
        labels_(std::move(labels)),
        prior_(std::move(prior)),
        likelihoods_(std::move(likelihoods)),
        smoothing_(smoothing) {
    const std::size_t m = labels_.size();
    if (prior_.size() != m) throw Error("prior size does not match label space");
    if (likelihoods_.size() != schema_.size()) throw Error("one likelihood model per feature required");
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      const auto& f = schema_[i];
      if (f.is_categorical()) {
        const auto* rows = std::get_if<std::vector<FiniteDistribution>>(&likelihoods_[i]);
        if (rows == nullptr) throw Error("feature '" + f.name + "' is categorical but has a Gaussian model");
        if (rows->size() != m) throw Error("feature '" + f.name + "' needs one row per class");
        for (const auto& r : *rows)
          if (r.size() != f.arity()) throw Error("feature '" + f.name + "' row size does not match arity");
      } else {
        const auto* gs = std::get_if<std::vector<Gaussian>>(&likelihoods_[i]);
        if (gs == nullptr) throw Error("feature '" + f.name + "' is real but has a categorical model");
        if (gs->size() != m) throw Error("feature '" + f.name + "' needs one Gaussian per class");
        for (const auto& g : *gs)
          if (!std::isfinite(g.mean) || !(g.variance > 0.0) || !std::isfinite(g.variance))
            throw Error("feature '" + f.name + "' has an invalid Gaussian");
      }
    }
  }

  // Builds a model from categorical conditionals and Gaussians keyed by
  // feature index.
  static NaiveBayesModel from_parts(FeatureSchema schema, LabelSpace labels, ClassPrior prior,
                                    const ConditionalTable& table, const GaussianParams& gaussians,
                                    SmoothingConfig smoothing = {}) {
    std::vector<FeatureLikelihood> lk;
    lk.reserve(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (schema[i].is_categorical()) {
        auto it = table.find(i);
        if (it == table.end()) throw Error("missing conditional table for feature '" + schema[i].name + "'");
        lk.emplace_back(it->second);
      } else {
        auto it = gaussians.find(i);
        if (it == gaussians.end()) throw Error("missing Gaussian parameters for feature '" + schema[i].name + "'");
        lk.emplace_back(it->second);
      }
    }
    return NaiveBayesModel(std::move(schema), std::move(labels), std::move(prior), std::move(lk), smoothing);
  }

  const FeatureSchema& schema() const { return schema_; }
  const LabelSpace& label_space() const { return labels_; }
  const ClassPrior& prior() const { return prior_; }
  const std::vector<FeatureLikelihood>& likelihoods() const { return likelihoods_; }
  const SmoothingConfig& smoothing() const { return smoothing_; }

  // log P(y_k) + sum_i log P(x_i | y_k); assumes a validated instance.
  double log_score_unchecked(const Instance& x, std::size_t k) const {
    double s = std::log(prior_[k]);
    for (std::size_t i = 0; i < schema_.size() && s != kNegInf; ++i) {
      if (const auto* rows = std::get_if<std::vector<FiniteDistribution>>(&likelihoods_[i]))
        s += std::log((*rows)[k][x.category(i)]);
      else
        s += std::get<std::vector<Gaussian>>(likelihoods_[i])[k].log_density(x.real(i));
    }
    return s;
  }

 private:
  FeatureSchema schema_;
  LabelSpace labels_;
  ClassPrior prior_;
  std::vector<FeatureLikelihood> likelihoods_;
  SmoothingConfig smoothing_;
};

inline NaiveBayesModel train(const LabeledDataset& dataset, const SmoothingConfig& config = {}) {
  config.validate();
  require_valid_dataset(dataset);
  auto prior = estimate_prior(dataset, config.alpha_prior);
  auto table = estimate_categorical_conditionals(dataset, config.alpha);
  auto gaussians = estimate_gaussian(dataset);
  return NaiveBayesModel::from_parts(dataset.schema, dataset.label_space, std::move(prior), table,
                                     gaussians, config);
}

inline double joint_log_score(const NaiveBayesModel& model, const Instance& x, std::size_t k) {
  require_valid_instance(model.schema(), x);
  if (k >= model.label_space().size()) throw Error("class index out of range");
  return model.log_score_unchecked(x, k);
}

inline std::vector<double> joint_log_scores(const NaiveBayesModel& model, const Instance& x) {
  require_valid_instance(model.schema(), x);
  std::vector<double> s(model.label_space().size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = model.log_score_unchecked(x, k);
  return s;
}

// Normalizes log scores into a distribution via log-sum-exp.
inline FiniteDistribution softmax(std::span<const double> scores) {
  double total = log_sum_exp(scores);
  if (total == kNegInf) throw Error("instance has zero probability under every class");
  std::vector<double> p(scores.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(scores[k] - total);
  double s = compensated_sum(p);
  for (double& v : p) v /= s;
  return FiniteDistribution(std::move(p));
}

inline FiniteDistribution posterior(const NaiveBayesModel& model, const Instance& x) {
  auto s = joint_log_scores(model, x);
  return softmax(s);
}

inline std::size_t classify(const NaiveBayesModel& model, const Instance& x) {
  auto s = joint_log_scores(model, x);
  auto best = argmax_score(s);
  if (!best) throw Error("instance has zero probability under every class");
  return *best;
}

}  // namespace nbayes
