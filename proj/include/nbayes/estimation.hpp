#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "nbayes/schema.hpp"

namespace nbayes {

struct SmoothingConfig {
  double alpha = 1.0;        // pseudocount for categorical conditionals
  double alpha_prior = 0.0;  // pseudocount for the class prior (0 = MLE)

  void validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error("alpha must be finite and >= 0");
    if (!(alpha_prior >= 0.0) || !std::isfinite(alpha_prior))
      throw Error("alpha_prior must be finite and >= 0");
  }
};

using ClassPrior = FiniteDistribution;

// feature index -> one distribution over the feature's values per class
using ConditionalTable = std::map<std::size_t, std::vector<FiniteDistribution>>;

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;

  double log_density(double x) const {
    constexpr double kLog2Pi = 1.8378770664093454835606594728112;
    double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(variance)) - d * d / (2.0 * variance);
  }

  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

// feature index -> one Gaussian per class
using GaussianParams = std::map<std::size_t, std::vector<Gaussian>>;

inline double variance_floor(double mean) { return std::max(1e-9, 1e-9 * mean * mean); }

constexpr int indicator(bool condition) { return condition ? 1 : 0; }

template <typename Predicate>
std::size_t count_matching(const LabeledDataset& dataset, Predicate&& predicate) {
  std::size_t n = 0;
  for (const auto& row : dataset.rows) n += static_cast<std::size_t>(indicator(predicate(row)));
  return n;
}

inline std::vector<std::size_t> class_counts(const LabeledDataset& dataset) {
  std::vector<std::size_t> counts(dataset.label_space.size(), 0);
  for (const auto& row : dataset.rows) ++counts.at(row.label);
  return counts;
}

inline ClassPrior estimate_prior(const LabeledDataset& dataset, double alpha) {
  if (dataset.empty()) throw Error("cannot estimate prior from zero examples");
  if (!(alpha >= 0.0)) throw Error("pseudocount must be >= 0");
  auto counts = class_counts(dataset);
  double denom = static_cast<double>(dataset.size()) + alpha * static_cast<double>(counts.size());
  std::vector<double> p(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) p[k] = (static_cast<double>(counts[k]) + alpha) / denom;
  return ClassPrior(std::move(p));
}

inline ConditionalTable estimate_categorical_conditionals(const LabeledDataset& dataset, double alpha) {
  if (dataset.empty()) throw Error("cannot estimate conditionals from zero examples");
  if (!(alpha >= 0.0)) throw Error("pseudocount must be >= 0");
  const std::size_t m = dataset.label_space.size();
  auto per_class = class_counts(dataset);
  if (alpha == 0.0) {
    for (std::size_t k = 0; k < m; ++k)
      if (per_class[k] == 0)
        throw Error("class '" + dataset.label_space[k] + "' has no examples; conditional undefined");
  }

  ConditionalTable table;
  for (std::size_t i = 0; i < dataset.schema.size(); ++i) {
    const auto& f = dataset.schema[i];
    if (!f.is_categorical()) continue;
    // counts[class][value]
    std::vector<std::vector<std::size_t>> counts(m, std::vector<std::size_t>(f.arity(), 0));
    for (const auto& row : dataset.rows) ++counts[row.label][row.instance.category(i)];

    auto& rows = table[i];
    rows.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
      double denom = static_cast<double>(per_class[k]) + alpha * static_cast<double>(f.arity());
      std::vector<double> p(f.arity());
      for (std::size_t v = 0; v < f.arity(); ++v)
        p[v] = (static_cast<double>(counts[k][v]) + alpha) / denom;
      rows.emplace_back(std::move(p));
    }
  }
  return table;
}

inline GaussianParams estimate_gaussian(const LabeledDataset& dataset) {
  const std::size_t m = dataset.label_space.size();
  GaussianParams params;
  bool any_real = false;
  for (const auto& f : dataset.schema) any_real = any_real || !f.is_categorical();
  if (!any_real) return params;

  auto per_class = class_counts(dataset);
  for (std::size_t k = 0; k < m; ++k)
    if (per_class[k] == 0)
      throw Error("class '" + dataset.label_space[k] + "' has no examples; Gaussian undefined");

  for (std::size_t i = 0; i < dataset.schema.size(); ++i) {
    if (dataset.schema[i].is_categorical()) continue;
    std::vector<std::vector<double>> values(m);
    for (const auto& row : dataset.rows) values[row.label].push_back(row.instance.real(i));

    auto& out = params[i];
    for (std::size_t k = 0; k < m; ++k) {
      const auto& xs = values[k];
      double n = static_cast<double>(xs.size());
      double mean = compensated_sum(xs) / n;
      std::vector<double> sq(xs.size());
      std::transform(xs.begin(), xs.end(), sq.begin(), [mean](double x) { return (x - mean) * (x - mean); });
      double var = compensated_sum(sq) / n;
      out.push_back({mean, std::max(var, variance_floor(mean))});
    }
  }
  return params;
}

}  // namespace nbayes
