#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nbayes {

// Thrown for data and model problems (bad input, violated preconditions).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FeatureKind { categorical, real };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;
  std::vector<std::string> values;  // empty for real features

  static FeatureSpec boolean(std::string name) {
    return {std::move(name), FeatureKind::categorical, {"false", "true"}};
  }
  static FeatureSpec categorical(std::string name, std::vector<std::string> values) {
    return {std::move(name), FeatureKind::categorical, std::move(values)};
  }
  static FeatureSpec real(std::string name) { return {std::move(name), FeatureKind::real, {}}; }

  bool is_categorical() const { return kind == FeatureKind::categorical; }
  std::size_t arity() const { return values.size(); }

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
    if (features_.empty()) throw Error("schema must declare at least one feature");
    std::set<std::string> seen;
    for (const auto& f : features_) {
      if (f.name.empty()) throw Error("feature names must be non-empty");
      if (!seen.insert(f.name).second) throw Error("duplicate feature name '" + f.name + "'");
      if (f.is_categorical()) {
        if (f.values.size() < 2)
          throw Error("categorical feature '" + f.name + "' needs at least 2 values");
        std::set<std::string> vals(f.values.begin(), f.values.end());
        if (vals.size() != f.values.size())
          throw Error("categorical feature '" + f.name + "' has duplicate values");
      } else if (!f.values.empty()) {
        throw Error("real feature '" + f.name + "' must not list values");
      }
    }
  }

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  auto begin() const { return features_.begin(); }
  auto end() const { return features_.end(); }

  bool all_categorical() const {
    for (const auto& f : features_)
      if (!f.is_categorical()) return false;
    return true;
  }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < features_.size(); ++i)
      if (features_[i].name == name) return i;
    return std::nullopt;
  }

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<FeatureSpec> features_;
};

class LabelSpace {
 public:
  LabelSpace() = default;
  explicit LabelSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw Error("label space needs at least 2 labels");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw Error("duplicate label names");
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& operator[](std::size_t k) const { return labels_[k]; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t k = 0; k < labels_.size(); ++k)
      if (labels_[k] == name) return k;
    return std::nullopt;
  }

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

 private:
  std::vector<std::string> labels_;
};

// A categorical value is an index into the feature's value list; a real
// value is a finite double.
using FeatureValue = std::variant<std::size_t, double>;

struct Instance {
  std::vector<FeatureValue> values;

  static Instance categorical(const std::vector<std::size_t>& indices) {
    Instance x;
    x.values.assign(indices.begin(), indices.end());
    return x;
  }

  std::size_t size() const { return values.size(); }
  std::size_t category(std::size_t i) const { return std::get<std::size_t>(values[i]); }
  double real(std::size_t i) const { return std::get<double>(values[i]); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct LabeledRow {
  Instance instance;
  std::size_t label = 0;
};

struct LabeledDataset {
  FeatureSchema schema;
  LabelSpace label_space;
  std::vector<LabeledRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

// Returns the reason an instance does not fit the schema, or nullopt.
inline std::optional<std::string> instance_violation(const FeatureSchema& schema, const Instance& x) {
  if (x.size() != schema.size())
    return "instance has " + std::to_string(x.size()) + " values, schema has " +
           std::to_string(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& f = schema[i];
    if (f.is_categorical()) {
      const auto* idx = std::get_if<std::size_t>(&x.values[i]);
      if (idx == nullptr) return "feature '" + f.name + "' expects a categorical value";
      if (*idx >= f.arity())
        return "feature '" + f.name + "' value index " + std::to_string(*idx) +
               " out of range (arity " + std::to_string(f.arity()) + ")";
    } else {
      const auto* v = std::get_if<double>(&x.values[i]);
      if (v == nullptr) return "feature '" + f.name + "' expects a real value";
      if (!std::isfinite(*v)) return "feature '" + f.name + "' is not finite";
    }
  }
  return std::nullopt;
}

inline void require_valid_instance(const FeatureSchema& schema, const Instance& x) {
  if (auto why = instance_violation(schema, x)) throw Error("invalid instance: " + *why);
}

struct Violation {
  std::size_t row = 0;
  std::string reason;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_dataset(const LabeledDataset& dataset) {
  ValidationReport report;
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    const auto& row = dataset.rows[r];
    if (auto why = instance_violation(dataset.schema, row.instance))
      report.violations.push_back({r, *why});
    if (row.label >= dataset.label_space.size())
      report.violations.push_back({r, "label index " + std::to_string(row.label) + " out of range"});
  }
  return report;
}

inline void require_valid_dataset(const LabeledDataset& dataset) {
  auto report = validate_dataset(dataset);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error("invalid dataset at row " + std::to_string(v.row) + ": " + v.reason);
  }
}

// Neumaier-compensated sum.
template <typename Range>
double compensated_sum(const Range& xs) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : xs) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

inline constexpr double kSumTolerance = 1e-12;
inline constexpr double kRenormalizeWindow = 1e-9;

// Checks masses are non-negative and sum to one. Sums within 1e-12 are kept
// as-is, sums within 1e-9 are rescaled, anything else is rejected.
inline std::vector<double> normalized_masses(std::vector<double> p, const char* what) {
  if (p.empty()) throw Error(std::string(what) + ": empty");
  for (double v : p)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(std::string(what) + ": entries must be finite and non-negative");
  double s = compensated_sum(p);
  if (std::abs(s - 1.0) <= kSumTolerance) return p;
  if (std::abs(s - 1.0) > kRenormalizeWindow)
    throw Error(std::string(what) + ": masses sum to " + std::to_string(s) + ", not 1");
  for (double& v : p) v /= s;
  return p;
}

class FiniteDistribution {
 public:
  FiniteDistribution() = default;
  explicit FiniteDistribution(std::vector<double> p)
      : p_(normalized_masses(std::move(p), "distribution")) {}

  static FiniteDistribution uniform(std::size_t n) {
    return FiniteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probabilities() const { return p_; }
  auto begin() const { return p_.begin(); }
  auto end() const { return p_.end(); }

  // Lowest index among the maxima.
  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p_.size(); ++i)
      if (p_[i] > p_[best]) best = i;
    return best;
  }

  friend bool operator==(const FiniteDistribution&, const FiniteDistribution&) = default;

 private:
  std::vector<double> p_;
};

}  // namespace nbayes
