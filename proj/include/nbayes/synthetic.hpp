#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "nbayes/estimation.hpp"
#include "nbayes/exact_bayes.hpp"
#include "nbayes/naive_bayes.hpp"
#include "nbayes/schema.hpp"

namespace nbayes {

// Class prior plus one conditional row per (feature, class); all features
// categorical. Sampling from it makes features independent given the class.
struct FactoredSpec {
  FeatureSchema schema;
  LabelSpace label_space;
  ClassPrior prior;
  ConditionalTable conditionals;

  void validate() const {
    if (!schema.all_categorical()) throw Error("factored generator requires categorical features");
    if (prior.size() != label_space.size()) throw Error("generator prior size does not match label space");
    for (std::size_t i = 0; i < schema.size(); ++i) {
      auto it = conditionals.find(i);
      if (it == conditionals.end()) throw Error("generator is missing conditionals for '" + schema[i].name + "'");
      if (it->second.size() != label_space.size())
        throw Error("generator needs one row per class for '" + schema[i].name + "'");
      for (const auto& row : it->second)
        if (row.size() != schema[i].arity()) throw Error("generator row size mismatch for '" + schema[i].name + "'");
    }
  }

  NaiveBayesModel to_model() const {
    validate();
    return NaiveBayesModel::from_parts(schema, label_space, prior, conditionals, {});
  }
};

using GeneratorSpec = std::variant<JointTable, FactoredSpec>;

inline const FeatureSchema& spec_schema(const GeneratorSpec& spec) {
  return std::visit([](const auto& s) -> const FeatureSchema& {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, JointTable>)
      return s.schema();
    else
      return s.schema;
  }, spec);
}

inline const LabelSpace& spec_labels(const GeneratorSpec& spec) {
  return std::visit([](const auto& s) -> const LabelSpace& {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, JointTable>)
      return s.label_space();
    else
      return s.label_space;
  }, spec);
}

inline JointTable to_joint(const FactoredSpec& spec) {
  spec.validate();
  const std::size_t n = instance_space_size(spec.schema);
  const std::size_t m = spec.label_space.size();
  std::vector<double> mass(n * m);
  for (std::size_t code = 0; code < n; ++code) {
    Instance x = decode_instance(spec.schema, code);
    for (std::size_t k = 0; k < m; ++k) {
      double p = spec.prior[k];
      for (std::size_t i = 0; i < spec.schema.size(); ++i) p *= spec.conditionals.at(i)[k][x.category(i)];
      mass[code * m + k] = p;
    }
  }
  return JointTable(spec.schema, spec.label_space, std::move(mass));
}

inline JointTable to_joint(const GeneratorSpec& spec) {
  if (const auto* joint = std::get_if<JointTable>(&spec)) return *joint;
  return to_joint(std::get<FactoredSpec>(spec));
}

// splitmix64 finalizer, used to derive independent seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) from the top 53 bits of one mt19937_64 draw.
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// Draws `count` i.i.d. rows by inverse CDF over the enumerated cells.
inline LabeledDataset sample(const GeneratorSpec& spec, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error("sample count must be >= 1");
  JointTable joint = to_joint(spec);
  const auto& masses = joint.masses();
  const std::size_t m = joint.label_space().size();

  std::vector<double> cdf(masses.size());
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t c = 0; c < masses.size(); ++c) {
    acc += masses[c];
    cdf[c] = acc;
    if (masses[c] > 0.0) last_positive = c;
  }

  LabeledDataset out{joint.schema(), joint.label_space(), {}};
  out.rows.reserve(count);
  std::mt19937_64 gen(seed);
  for (std::size_t r = 0; r < count; ++r) {
    double u = uniform01(gen) * acc;
    auto cell = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (cell >= masses.size()) cell = last_positive;
    out.rows.push_back({decode_instance(joint.schema(), cell / m), cell % m});
  }
  return out;
}

// Fraction of `trials` Bernoulli(p) experiments whose MLE lands within
// `tolerance` of p. Trial t draws from mt19937_64(mix_seed(seed + t)).
inline double mle_concentration_trial(double p, std::size_t samples_per_trial, std::size_t trials, double tolerance,
                                      std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw Error("p must lie in (0, 1)");
  if (samples_per_trial == 0) throw Error("samples per trial must be >= 1");
  if (trials == 0) throw Error("trial count must be >= 1");
  if (!(tolerance >= 0.0)) throw Error("tolerance must be >= 0");

  const double n = static_cast<double>(samples_per_trial);
  std::size_t within = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 gen(mix_seed(seed + t));
    std::size_t k = 0;
    for (std::size_t s = 0; s < samples_per_trial; ++s) k += uniform01(gen) < p ? 1 : 0;
    // compared on the count scale so p_hat exactly at the boundary is inside
    if (std::abs(static_cast<double>(k) - p * n) <= tolerance * n * (1.0 + 1e-12)) ++within;
  }
  return static_cast<double>(within) / static_cast<double>(trials);
}

}  // namespace nbayes
