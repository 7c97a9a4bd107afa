#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nbayes/schema.hpp"

namespace nbayes {

inline constexpr std::size_t kMaxJointInstances = std::size_t{1} << 20;

// Number of distinct instances of an all-categorical schema; throws past the cap.
inline std::size_t instance_space_size(const FeatureSchema& schema) {
  std::size_t n = 1;
  for (const auto& f : schema) {
    if (!f.is_categorical()) throw Error("joint table requires discrete features");
    n *= f.arity();
    if (n > kMaxJointInstances)
      throw Error("instance space exceeds the joint table bound of 2^20 instances");
  }
  return n;
}

// Mixed-radix encoding of a categorical instance; the first feature is the
// most significant digit.
inline std::size_t encode_instance(const FeatureSchema& schema, const Instance& x) {
  std::size_t code = 0;
  for (std::size_t i = 0; i < schema.size(); ++i) code = code * schema[i].arity() + x.category(i);
  return code;
}

inline Instance decode_instance(const FeatureSchema& schema, std::size_t code) {
  std::vector<std::size_t> idx(schema.size());
  for (std::size_t i = schema.size(); i-- > 0;) {
    idx[i] = code % schema[i].arity();
    code /= schema[i].arity();
  }
  return Instance::categorical(idx);
}

// Explicit P(X, Y) over an enumerated all-categorical instance space.
class JointTable {
 public:
  // mass[instance_code * labels.size() + label]
  JointTable(FeatureSchema schema, LabelSpace labels, std::vector<double> mass)
      : schema_(std::move(schema)), labels_(std::move(labels)) {
    instances_ = instance_space_size(schema_);
    if (mass.size() != instances_ * labels_.size())
      throw Error("joint table has " + std::to_string(mass.size()) + " cells, expected " +
                  std::to_string(instances_ * labels_.size()));
    mass_ = normalized_masses(std::move(mass), "joint table");
  }

  const FeatureSchema& schema() const { return schema_; }
  const LabelSpace& label_space() const { return labels_; }
  std::size_t instance_count() const { return instances_; }
  const std::vector<double>& masses() const { return mass_; }

  double mass(std::size_t instance_code, std::size_t label) const {
    return mass_[instance_code * labels_.size() + label];
  }
  double mass(const Instance& x, std::size_t label) const {
    return mass(encode_instance(schema_, x), label);
  }
  double marginal(std::size_t instance_code) const {
    double s = 0.0;
    for (std::size_t k = 0; k < labels_.size(); ++k) s += mass(instance_code, k);
    return s;
  }

 private:
  FeatureSchema schema_;
  LabelSpace labels_;
  std::size_t instances_ = 0;
  std::vector<double> mass_;
};

// lambda(action | true class), one action per class.
class LossMatrix {
 public:
  LossMatrix() = default;
  explicit LossMatrix(std::vector<std::vector<double>> entries) : entries_(std::move(entries)) {
    for (const auto& row : entries_) {
      if (row.size() != entries_.size()) throw Error("loss matrix must be square");
      for (double v : row)
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error("loss entries must be finite and >= 0");
    }
  }

  static LossMatrix zero_one(std::size_t m) {
    std::vector<std::vector<double>> e(m, std::vector<double>(m, 1.0));
    for (std::size_t i = 0; i < m; ++i) e[i][i] = 0.0;
    return LossMatrix(std::move(e));
  }

  std::size_t size() const { return entries_.size(); }
  double operator()(std::size_t action, std::size_t truth) const { return entries_[action][truth]; }
  const std::vector<std::vector<double>>& entries() const { return entries_; }

 private:
  std::vector<std::vector<double>> entries_;
};

inline JointTable estimate_joint(const LabeledDataset& dataset) {
  const std::size_t n = instance_space_size(dataset.schema);
  if (dataset.empty()) throw Error("cannot estimate a joint table from zero examples");
  require_valid_dataset(dataset);
  const std::size_t m = dataset.label_space.size();
  std::vector<std::size_t> counts(n * m, 0);
  for (const auto& row : dataset.rows)
    ++counts[encode_instance(dataset.schema, row.instance) * m + row.label];
  std::vector<double> mass(counts.size());
  const double total = static_cast<double>(dataset.size());
  for (std::size_t c = 0; c < counts.size(); ++c) mass[c] = static_cast<double>(counts[c]) / total;
  return JointTable(dataset.schema, dataset.label_space, std::move(mass));
}

inline FiniteDistribution exact_posterior(const JointTable& joint, const Instance& x) {
  require_valid_instance(joint.schema(), x);
  const std::size_t code = encode_instance(joint.schema(), x);
  const std::size_t m = joint.label_space().size();
  std::vector<double> p(m);
  for (std::size_t k = 0; k < m; ++k) p[k] = joint.mass(code, k);
  double z = compensated_sum(p);
  if (!(z > 0.0)) throw Error("instance has zero marginal probability");
  for (double& v : p) v /= z;
  return FiniteDistribution(std::move(p));
}

inline std::size_t classify_min_error(const JointTable& joint, const Instance& x) {
  return exact_posterior(joint, x).argmax();
}

inline double conditional_risk(const FiniteDistribution& posterior, const LossMatrix& loss, std::size_t action) {
  if (loss.size() != posterior.size()) throw Error("loss matrix and posterior dimensions differ");
  if (action >= loss.size()) throw Error("action index out of range");
  double r = 0.0;
  for (std::size_t j = 0; j < posterior.size(); ++j) r += loss(action, j) * posterior[j];
  return r;
}

// argmin over actions of the conditional risk, lowest index on ties.
inline std::size_t min_risk_action(const FiniteDistribution& posterior, const LossMatrix& loss) {
  std::size_t best = 0;
  double best_risk = conditional_risk(posterior, loss, 0);
  for (std::size_t i = 1; i < loss.size(); ++i) {
    double r = conditional_risk(posterior, loss, i);
    if (r < best_risk) {
      best = i;
      best_risk = r;
    }
  }
  return best;
}

inline std::size_t classify_min_risk(const JointTable& joint, const Instance& x, const LossMatrix& loss) {
  return min_risk_action(exact_posterior(joint, x), loss);
}

inline double bayes_error(const JointTable& joint) {
  const std::size_t m = joint.label_space().size();
  std::vector<double> terms;
  terms.reserve(joint.instance_count());
  for (std::size_t code = 0; code < joint.instance_count(); ++code) {
    double z = 0.0;
    double best = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      z += joint.mass(code, k);
      best = std::max(best, joint.mass(code, k));
    }
    // P(x) * (1 - max_k P(y_k | x)) = P(x) - max_k P(x, y_k)
    if (z > 0.0) terms.push_back(z - best);
  }
  return std::clamp(compensated_sum(terms), 0.0, 1.0);
}

enum class ParamModel { full_joint, naive };

// Free parameters of P(X|Y) for n boolean attributes and a boolean class.
inline std::uint64_t param_count(ParamModel kind, int n) {
  if (n < 1) throw Error("attribute count must be >= 1");
  if (n > 62) throw Error("attribute count must be <= 62 for exact counting");
  if (kind == ParamModel::naive) return 2 * static_cast<std::uint64_t>(n);
  return 2 * ((std::uint64_t{1} << n) - 1);
}

}  // namespace nbayes
