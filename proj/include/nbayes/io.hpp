#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nbayes/exact_bayes.hpp"
#include "nbayes/independence.hpp"
#include "nbayes/naive_bayes.hpp"
#include "nbayes/schema.hpp"
#include "nbayes/synthetic.hpp"

namespace nbayes {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Numbers

// Shortest decimal that round-trips, always with '.' as the separator.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, end);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// Raw tables (CSV / JSONL before typing)

enum class DataFormat { csv, jsonl };

inline DataFormat format_from_name(const std::string& name) {
  if (name == "csv") return DataFormat::csv;
  if (name == "jsonl") return DataFormat::jsonl;
  throw Error("unknown data format '" + name + "' (expected csv or jsonl)");
}

inline DataFormat format_for_path(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot != std::string::npos && (path.substr(dot) == ".jsonl" || path.substr(dot) == ".ndjson"))
    return DataFormat::jsonl;
  return DataFormat::csv;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // source line of each row (1-based)

  std::optional<std::size_t> column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    return std::nullopt;
  }
};

// Splits CSV text into records. Quoted fields may contain commas, doubled
// quotes and newlines. Returns (record, starting line) pairs.
inline std::vector<std::pair<std::vector<std::string>, std::size_t>> parse_csv_records(std::string_view text) {
  std::vector<std::pair<std::vector<std::string>, std::size_t>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1, record_line = 1;

  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  auto end_record = [&] {
    fields.push_back(std::move(field));
    field.clear();
    bool blank = fields.size() == 1 && fields[0].empty() && !field_started;
    if (!blank) records.emplace_back(std::move(fields), record_line);
    fields.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        record_line = ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw Error("unterminated quoted field starting on line " + std::to_string(record_line));
  if (!field.empty() || !fields.empty() || field_started) end_record();
  return records;
}

inline RawTable parse_csv(std::string_view text) {
  auto records = parse_csv_records(text);
  if (records.empty()) throw Error("empty file");
  RawTable t;
  t.header = std::move(records.front().first);
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& [fields, line] = records[r];
    if (fields.size() != t.header.size())
      throw Error("line " + std::to_string(line) + ": expected " + std::to_string(t.header.size()) + " fields, got " +
                  std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line);
  }
  return t;
}

inline std::string json_scalar_text(const Json& v, std::size_t line) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw Error("line " + std::to_string(line) + ": values must be strings, numbers or booleans");
}

inline RawTable parse_jsonl(std::string_view text) {
  RawTable t;
  bool have_header = false;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    Json obj;
    try {
      obj = Json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      throw Error("line " + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw Error("line " + std::to_string(line) + ": expected a flat JSON object");
    if (!have_header) {
      for (auto it = obj.begin(); it != obj.end(); ++it) t.header.push_back(it.key());
      have_header = true;
    }
    if (obj.size() != t.header.size())
      throw Error("line " + std::to_string(line) + ": expected keys matching the first record");
    std::vector<std::string> fields;
    for (const auto& key : t.header) {
      auto it = obj.find(key);
      if (it == obj.end()) throw Error("line " + std::to_string(line) + ": missing key '" + key + "'");
      fields.push_back(json_scalar_text(*it, line));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line);
  }
  if (!have_header) throw Error("empty file");
  return t;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

inline RawTable read_table(const std::string& path, DataFormat format) {
  auto text = read_file(path);
  return format == DataFormat::csv ? parse_csv(text) : parse_jsonl(text);
}

// ---------------------------------------------------------------------------
// Typing raw tables into datasets

struct SchemaSidecar {
  FeatureSchema schema;
  std::optional<LabelSpace> labels;
};

inline std::size_t parse_category(const FeatureSpec& f, const std::string& text, std::size_t line) {
  for (std::size_t v = 0; v < f.values.size(); ++v)
    if (f.values[v] == text) return v;
  if (f.values == std::vector<std::string>{"false", "true"}) {
    if (text == "0") return 0;
    if (text == "1") return 1;
  }
  throw Error("line " + std::to_string(line) + ": value '" + text + "' is not declared for feature '" + f.name + "'");
}

inline FeatureValue parse_value(const FeatureSpec& f, const std::string& text, std::size_t line) {
  if (f.is_categorical()) return parse_category(f, text, line);
  auto v = parse_double(text);
  if (!v) throw Error("line " + std::to_string(line) + ": feature '" + f.name + "' expects a number, got '" + text + "'");
  return *v;
}

// Infers a schema from the non-label columns: a column whose values all
// parse as decimal numbers is real, otherwise categorical in first-appearance
// order.
inline FeatureSchema infer_schema(const RawTable& table, std::size_t label_col) {
  std::vector<FeatureSpec> features;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == label_col) continue;
    bool numeric = true;
    for (const auto& row : table.rows) numeric = numeric && parse_double(row[c]).has_value();
    if (numeric) {
      features.push_back(FeatureSpec::real(table.header[c]));
      continue;
    }
    std::vector<std::string> values;
    for (const auto& row : table.rows)
      if (std::find(values.begin(), values.end(), row[c]) == values.end()) values.push_back(row[c]);
    // a constant column still needs two declared values
    if (values.size() < 2) values.push_back(values.front() == "<unseen>" ? "<unseen-2>" : "<unseen>");
    features.push_back(FeatureSpec::categorical(table.header[c], std::move(values)));
  }
  return FeatureSchema(std::move(features));
}

// Encodes a raw table against a fixed schema. Feature columns are matched by
// name; other columns are ignored unless `strict_columns`. When `labels` is
// fixed, unknown labels are errors; otherwise labels are collected in
// first-appearance order.
inline LabeledDataset encode_table(const RawTable& table, const FeatureSchema& schema,
                                   const std::optional<LabelSpace>& labels, const std::string& label_column,
                                   bool strict_columns) {
  auto label_col = table.column(label_column);
  if (!label_col) throw Error("missing label column '" + label_column + "'");
  if (table.rows.empty()) throw Error("empty dataset");

  std::vector<std::size_t> cols;
  for (const auto& f : schema) {
    auto c = table.column(f.name);
    if (!c) throw Error("data has no column for feature '" + f.name + "'");
    cols.push_back(*c);
  }
  if (strict_columns) {
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (c != *label_col && std::find(cols.begin(), cols.end(), c) == cols.end())
        throw Error("column '" + table.header[c] + "' is not declared in the schema");
  }

  std::vector<std::string> label_names;
  if (labels) {
    label_names = labels->labels();
  } else {
    for (const auto& row : table.rows)
      if (std::find(label_names.begin(), label_names.end(), row[*label_col]) == label_names.end())
        label_names.push_back(row[*label_col]);
  }
  LabelSpace space = labels ? *labels : LabelSpace(label_names);

  LabeledDataset ds{schema, space, {}};
  ds.rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    auto k = space.index_of(row[*label_col]);
    if (!k) throw Error("line " + std::to_string(line) + ": unknown label '" + row[*label_col] + "'");
    Instance x;
    x.values.reserve(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) x.values.push_back(parse_value(schema[i], row[cols[i]], line));
    ds.rows.push_back({std::move(x), *k});
  }
  require_valid_dataset(ds);
  return ds;
}

// Encodes only the feature columns; the label column is not required.
inline std::vector<Instance> encode_instances(const RawTable& table, const FeatureSchema& schema) {
  std::vector<std::size_t> cols;
  for (const auto& f : schema) {
    auto c = table.column(f.name);
    if (!c) throw Error("data has no column for feature '" + f.name + "'");
    cols.push_back(*c);
  }
  std::vector<Instance> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Instance x;
    for (std::size_t i = 0; i < schema.size(); ++i)
      x.values.push_back(parse_value(schema[i], table.rows[r][cols[i]], table.line_numbers[r]));
    require_valid_instance(schema, x);
    out.push_back(std::move(x));
  }
  return out;
}

inline LabeledDataset build_dataset(const RawTable& table, const std::string& label_column,
                                    const std::optional<SchemaSidecar>& sidecar) {
  auto label_col = table.column(label_column);
  if (!label_col) throw Error("missing label column '" + label_column + "'");
  if (table.rows.empty()) throw Error("empty dataset");
  if (sidecar) return encode_table(table, sidecar->schema, sidecar->labels, label_column, true);
  return encode_table(table, infer_schema(table, *label_col), std::nullopt, label_column, true);
}

// ---------------------------------------------------------------------------
// JSON: schema, models, specs

inline Json schema_to_json(const FeatureSchema& schema) {
  Json features = Json::array();
  for (const auto& f : schema) {
    Json j;
    j["name"] = f.name;
    j["kind"] = f.is_categorical() ? "categorical" : "real";
    if (f.is_categorical()) j["values"] = f.values;
    features.push_back(std::move(j));
  }
  return Json{{"features", std::move(features)}};
}

inline FeatureSchema schema_from_json(const Json& j) {
  std::vector<FeatureSpec> features;
  for (const auto& fj : j.at("features")) {
    auto name = fj.at("name").get<std::string>();
    auto kind = fj.at("kind").get<std::string>();
    if (kind == "boolean")
      features.push_back(FeatureSpec::boolean(name));
    else if (kind == "categorical")
      features.push_back(FeatureSpec::categorical(name, fj.at("values").get<std::vector<std::string>>()));
    else if (kind == "real")
      features.push_back(FeatureSpec::real(name));
    else
      throw Error("unknown feature kind '" + kind + "'");
  }
  return FeatureSchema(std::move(features));
}

// Wraps JSON library exceptions as model errors.
template <typename F>
auto with_json_errors(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed ") + what + ": " + e.what());
  }
}

inline SchemaSidecar load_schema_sidecar(const std::string& path) {
  return with_json_errors("schema", [&] {
    auto j = Json::parse(read_file(path));
    SchemaSidecar s{schema_from_json(j), std::nullopt};
    if (j.contains("labels")) s.labels = LabelSpace(j.at("labels").get<std::vector<std::string>>());
    return s;
  });
}

inline Json sidecar_to_json(const FeatureSchema& schema, const LabelSpace& labels) {
  Json j = schema_to_json(schema);
  j["labels"] = labels.labels();
  return j;
}

inline Json rows_to_json(const std::vector<FiniteDistribution>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(r.probabilities());
  return out;
}

inline std::vector<FiniteDistribution> rows_from_json(const Json& j) {
  std::vector<FiniteDistribution> rows;
  for (const auto& r : j) rows.emplace_back(r.get<std::vector<double>>());
  return rows;
}

inline Json container_header(const char* kind) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = kind;
  return j;
}

inline Json to_json(const NaiveBayesModel& model) {
  Json j = container_header("naive_bayes");
  j["schema"] = schema_to_json(model.schema());
  j["label_space"] = model.label_space().labels();
  j["smoothing"] = {{"alpha", model.smoothing().alpha}, {"alpha_prior", model.smoothing().alpha_prior}};
  j["prior"] = model.prior().probabilities();
  Json lk = Json::array();
  for (std::size_t i = 0; i < model.schema().size(); ++i) {
    Json e;
    e["feature"] = model.schema()[i].name;
    if (const auto* rows = std::get_if<std::vector<FiniteDistribution>>(&model.likelihoods()[i])) {
      e["type"] = "categorical";
      e["rows"] = rows_to_json(*rows);
    } else {
      e["type"] = "gaussian";
      Json ps = Json::array();
      for (const auto& g : std::get<std::vector<Gaussian>>(model.likelihoods()[i]))
        ps.push_back({{"mean", g.mean}, {"variance", g.variance}});
      e["params"] = std::move(ps);
    }
    lk.push_back(std::move(e));
  }
  j["likelihoods"] = std::move(lk);
  return j;
}

inline Json to_json(const JointTable& joint) {
  Json j = container_header("joint_table");
  j["schema"] = schema_to_json(joint.schema());
  j["label_space"] = joint.label_space().labels();
  j["mass"] = joint.masses();
  return j;
}

inline void check_header(const Json& j, const std::string& expected_kind) {
  if (!j.is_object()) throw Error("container must be a JSON object");
  auto version = j.at("format_version").get<int>();
  if (version != kFormatVersion)
    throw Error("unsupported format_version " + std::to_string(version) + " (expected " +
                std::to_string(kFormatVersion) + ")");
  auto kind = j.at("kind").get<std::string>();
  if (!expected_kind.empty() && kind != expected_kind)
    throw Error("expected kind '" + expected_kind + "', found '" + kind + "'");
}

inline NaiveBayesModel naive_bayes_from_json(const Json& j) {
  return with_json_errors("model", [&] {
    check_header(j, "naive_bayes");
    auto schema = schema_from_json(j.at("schema"));
    LabelSpace labels(j.at("label_space").get<std::vector<std::string>>());
    SmoothingConfig smoothing;
    if (j.contains("smoothing")) {
      smoothing.alpha = j.at("smoothing").at("alpha").get<double>();
      smoothing.alpha_prior = j.at("smoothing").at("alpha_prior").get<double>();
    }
    ClassPrior prior(j.at("prior").get<std::vector<double>>());
    const auto& lj = j.at("likelihoods");
    if (!lj.is_array() || lj.size() != schema.size()) throw Error("malformed model: one likelihood per feature required");
    std::vector<FeatureLikelihood> lk;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const auto& e = lj[i];
      if (e.contains("feature") && e.at("feature").get<std::string>() != schema[i].name)
        throw Error("malformed model: likelihood " + std::to_string(i) + " is not for feature '" + schema[i].name + "'");
      auto type = e.at("type").get<std::string>();
      if (type == "categorical") {
        lk.emplace_back(rows_from_json(e.at("rows")));
      } else if (type == "gaussian") {
        std::vector<Gaussian> gs;
        for (const auto& g : e.at("params")) gs.push_back({g.at("mean").get<double>(), g.at("variance").get<double>()});
        lk.emplace_back(std::move(gs));
      } else {
        throw Error("malformed model: unknown likelihood type '" + type + "'");
      }
    }
    return NaiveBayesModel(std::move(schema), std::move(labels), std::move(prior), std::move(lk), smoothing);
  });
}

inline JointTable joint_table_from_json(const Json& j) {
  return with_json_errors("joint table", [&] {
    check_header(j, "joint_table");
    return JointTable(schema_from_json(j.at("schema")),
                      LabelSpace(j.at("label_space").get<std::vector<std::string>>()),
                      j.at("mass").get<std::vector<double>>());
  });
}

using AnyModel = std::variant<NaiveBayesModel, JointTable>;

inline AnyModel model_from_json(const Json& j) {
  auto kind = with_json_errors("model", [&] {
    check_header(j, "");
    return j.at("kind").get<std::string>();
  });
  if (kind == "naive_bayes") return naive_bayes_from_json(j);
  if (kind == "joint_table") return joint_table_from_json(j);
  throw Error("unknown model kind '" + kind + "'");
}

inline Json parse_json_file(const std::string& path) {
  auto text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void save_model(const NaiveBayesModel& model, const std::string& path) {
  write_file(path, to_json(model).dump(2) + "\n");
}
inline void save_model(const JointTable& joint, const std::string& path) {
  write_file(path, to_json(joint).dump(2) + "\n");
}
inline void save_model(const AnyModel& model, const std::string& path) {
  std::visit([&](const auto& m) { save_model(m, path); }, model);
}

inline AnyModel load_model(const std::string& path) { return model_from_json(parse_json_file(path)); }

inline Json to_json(const FactoredSpec& spec) {
  Json j = container_header("generator_spec");
  j["form"] = "factored";
  j["schema"] = schema_to_json(spec.schema);
  j["label_space"] = spec.label_space.labels();
  j["prior"] = spec.prior.probabilities();
  Json cond = Json::array();
  for (std::size_t i = 0; i < spec.schema.size(); ++i) cond.push_back(rows_to_json(spec.conditionals.at(i)));
  j["conditionals"] = std::move(cond);
  return j;
}

inline Json to_json(const GeneratorSpec& spec) {
  if (const auto* f = std::get_if<FactoredSpec>(&spec)) return to_json(*f);
  const auto& joint = std::get<JointTable>(spec);
  Json j = container_header("generator_spec");
  j["form"] = "explicit";
  j["schema"] = schema_to_json(joint.schema());
  j["label_space"] = joint.label_space().labels();
  j["mass"] = joint.masses();
  return j;
}

// Accepts a generator_spec container or a saved joint_table.
inline GeneratorSpec generator_spec_from_json(const Json& j) {
  return with_json_errors("generator spec", [&]() -> GeneratorSpec {
    check_header(j, "");
    auto kind = j.at("kind").get<std::string>();
    if (kind == "joint_table") return joint_table_from_json(j);
    if (kind != "generator_spec") throw Error("expected kind 'generator_spec', found '" + kind + "'");
    auto schema = schema_from_json(j.at("schema"));
    LabelSpace labels(j.at("label_space").get<std::vector<std::string>>());
    auto form = j.at("form").get<std::string>();
    if (form == "explicit") return JointTable(std::move(schema), std::move(labels), j.at("mass").get<std::vector<double>>());
    if (form != "factored") throw Error("unknown generator form '" + form + "'");
    FactoredSpec spec{std::move(schema), std::move(labels), ClassPrior(j.at("prior").get<std::vector<double>>()), {}};
    const auto& cond = j.at("conditionals");
    if (!cond.is_array() || cond.size() != spec.schema.size())
      throw Error("malformed generator spec: one conditional block per feature required");
    for (std::size_t i = 0; i < spec.schema.size(); ++i) spec.conditionals[i] = rows_from_json(cond[i]);
    spec.validate();
    return spec;
  });
}

inline LossMatrix loss_from_json(const Json& j) {
  return with_json_errors("loss matrix", [&] {
    const Json& m = j.is_object() ? j.at("loss") : j;
    return LossMatrix(m.get<std::vector<std::vector<double>>>());
  });
}

// A joint over named discrete variables, used by check-ci.
struct DiscreteJoint {
  std::vector<std::string> names;
  std::vector<std::size_t> arities;
  std::vector<double> mass;  // row-major, first variable most significant

  std::size_t index_of(const std::string& name) const {
    for (std::size_t v = 0; v < names.size(); ++v)
      if (names[v] == name) return v;
    throw Error("unknown variable '" + name + "'");
  }
};

inline Json to_json(const DiscreteJoint& joint) {
  Json j = container_header("discrete_joint");
  Json vars = Json::array();
  for (std::size_t v = 0; v < joint.names.size(); ++v) vars.push_back({{"name", joint.names[v]}, {"arity", joint.arities[v]}});
  j["variables"] = std::move(vars);
  j["mass"] = joint.mass;
  return j;
}

// Reads a discrete_joint container, or a joint_table whose variables are its
// features followed by one named "label".
inline DiscreteJoint discrete_joint_from_json(const Json& j) {
  return with_json_errors("joint", [&] {
    check_header(j, "");
    auto kind = j.at("kind").get<std::string>();
    DiscreteJoint out;
    if (kind == "joint_table") {
      auto table = joint_table_from_json(j);
      for (const auto& f : table.schema()) {
        out.names.push_back(f.name);
        out.arities.push_back(f.arity());
      }
      out.names.push_back("label");
      out.arities.push_back(table.label_space().size());
      out.mass = table.masses();
      return out;
    }
    if (kind != "discrete_joint") throw Error("expected kind 'discrete_joint', found '" + kind + "'");
    for (const auto& v : j.at("variables")) {
      out.names.push_back(v.at("name").get<std::string>());
      std::size_t arity = v.contains("values") ? v.at("values").size() : v.at("arity").get<std::size_t>();
      out.arities.push_back(arity);
    }
    out.mass = normalized_masses(j.at("mass").get<std::vector<double>>(), "joint");
    return out;
  });
}

// ---------------------------------------------------------------------------
// Writing datasets

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string value_text(const FeatureSpec& f, const FeatureValue& v) {
  if (f.is_categorical()) return f.values[std::get<std::size_t>(v)];
  return format_double(std::get<double>(v));
}

inline std::string dataset_to_csv(const LabeledDataset& ds, const std::string& label_column = "label") {
  std::string out;
  for (const auto& f : ds.schema) out += csv_field(f.name) + ",";
  out += csv_field(label_column) + "\n";
  for (const auto& row : ds.rows) {
    for (std::size_t i = 0; i < ds.schema.size(); ++i) out += csv_field(value_text(ds.schema[i], row.instance.values[i])) + ",";
    out += csv_field(ds.label_space[row.label]) + "\n";
  }
  return out;
}

inline std::string dataset_to_jsonl(const LabeledDataset& ds, const std::string& label_column = "label") {
  std::string out;
  for (const auto& row : ds.rows) {
    Json j;
    for (std::size_t i = 0; i < ds.schema.size(); ++i) {
      if (ds.schema[i].is_categorical())
        j[ds.schema[i].name] = ds.schema[i].values[row.instance.category(i)];
      else
        j[ds.schema[i].name] = row.instance.real(i);
    }
    j[label_column] = ds.label_space[row.label];
    out += j.dump() + "\n";
  }
  return out;
}

inline LabeledDataset load_dataset(const std::string& path, DataFormat format, const std::string& label_column,
                                   const std::optional<SchemaSidecar>& sidecar = std::nullopt) {
  return build_dataset(read_table(path, format), label_column, sidecar);
}

}  // namespace nbayes
