#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "nbayes/evaluate.hpp"
#include "nbayes/exact_bayes.hpp"
#include "nbayes/independence.hpp"
#include "nbayes/io.hpp"
#include "nbayes/naive_bayes.hpp"
#include "nbayes/synthetic.hpp"

namespace nbayes::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

struct DataOptions {
  std::string path;
  std::string format;  // empty: chosen from the file extension
  std::string label_column = "label";

  DataFormat resolved_format() const { return format.empty() ? format_for_path(path) : format_from_name(format); }
};

inline void add_data_options(CLI::App* cmd, DataOptions& d, bool with_label = true) {
  cmd->add_option("--data", d.path, "Dataset file (CSV with header, or JSONL)")->required();
  cmd->add_option("--format", d.format, "csv or jsonl (default: from extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  if (with_label) cmd->add_option("--label-column", d.label_column, "Name of the label column")->capture_default_str();
}

inline Json report_to_json(const EvaluationReport& r, const LabelSpace& labels) {
  Json j;
  j["rows"] = r.total;
  j["evaluated"] = r.evaluated;
  j["undecidable"] = r.undecidable;
  j["accuracy"] = r.accuracy;
  j["misclassification_rate"] = r.misclassification_rate();
  j["labels"] = labels.labels();
  j["confusion"] = r.confusion;
  if (r.empirical_risk) j["empirical_risk"] = *r.empirical_risk;
  return j;
}

inline void print_report(std::ostream& out, const EvaluationReport& r, const LabelSpace& labels) {
  out << "rows: " << r.total << "\n"
      << "evaluated: " << r.evaluated << "\n"
      << "undecidable: " << r.undecidable << "\n"
      << "accuracy: " << format_double(r.accuracy) << "\n"
      << "misclassification_rate: " << format_double(r.misclassification_rate()) << "\n";
  if (r.empirical_risk) out << "empirical_risk: " << format_double(*r.empirical_risk) << "\n";
  out << "confusion (rows = true label, columns = decision):\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    out << "  " << labels[k] << ":";
    for (auto c : r.confusion[k]) out << " " << c;
    out << "\n";
  }
}

inline std::optional<SchemaSidecar> maybe_sidecar(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_schema_sidecar(path);
}

inline const FeatureSchema& model_schema(const AnyModel& m) {
  return std::visit([](const auto& x) -> const FeatureSchema& { return x.schema(); }, m);
}
inline const LabelSpace& model_labels(const AnyModel& m) {
  return std::visit([](const auto& x) -> const LabelSpace& { return x.label_space(); }, m);
}

inline LabeledDataset load_for_model(const DataOptions& d, const AnyModel& model) {
  return encode_table(read_table(d.path, d.resolved_format()), model_schema(model), model_labels(model),
                      d.label_column, false);
}

// Parses argv (without the program name) and runs one subcommand.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Naive Bayes and exact Bayes-optimal classification toolkit", "nbayes"};
  app.require_subcommand(1);
  bool json = false;
  std::function<int()> action;

  auto add_json = [&json](CLI::App* cmd) { cmd->add_flag("--json", json, "Emit machine-readable JSON"); };

  // train
  DataOptions train_data;
  SmoothingConfig smoothing;
  std::string train_schema, train_out;
  auto* train_cmd = app.add_subcommand("train", "Train a Naive Bayes model");
  add_data_options(train_cmd, train_data);
  train_cmd->add_option("--alpha", smoothing.alpha, "Pseudocount for feature conditionals")->capture_default_str();
  train_cmd->add_option("--alpha-prior", smoothing.alpha_prior, "Pseudocount for the class prior")->capture_default_str();
  train_cmd->add_option("--schema", train_schema, "Sidecar schema JSON");
  train_cmd->add_option("--out", train_out, "Model output path")->required();
  add_json(train_cmd);
  train_cmd->callback([&] {
    action = [&] {
      auto ds = load_dataset(train_data.path, train_data.resolved_format(), train_data.label_column,
                             maybe_sidecar(train_schema));
      auto model = train(ds, smoothing);
      save_model(model, train_out);
      if (json) {
        Json j{{"model", train_out}, {"rows", ds.size()}, {"labels", model.label_space().labels()},
               {"prior", model.prior().probabilities()}};
        out << j.dump() << "\n";
      } else {
        out << "trained naive_bayes on " << ds.size() << " rows -> " << train_out << "\n";
        for (std::size_t k = 0; k < model.label_space().size(); ++k)
          out << "  prior " << model.label_space()[k] << " = " << format_double(model.prior()[k]) << "\n";
      }
      return kOk;
    };
  });

  // train-joint
  DataOptions joint_data;
  std::string joint_schema, joint_out;
  auto* joint_cmd = app.add_subcommand("train-joint", "Estimate a full joint table (exact Bayes oracle)");
  add_data_options(joint_cmd, joint_data);
  joint_cmd->add_option("--schema", joint_schema, "Sidecar schema JSON");
  joint_cmd->add_option("--out", joint_out, "Model output path")->required();
  add_json(joint_cmd);
  joint_cmd->callback([&] {
    action = [&] {
      auto ds = load_dataset(joint_data.path, joint_data.resolved_format(), joint_data.label_column,
                             maybe_sidecar(joint_schema));
      auto joint = estimate_joint(ds);
      save_model(joint, joint_out);
      if (json)
        out << Json{{"model", joint_out}, {"rows", ds.size()}, {"cells", joint.masses().size()}}.dump() << "\n";
      else
        out << "trained joint_table on " << ds.size() << " rows (" << joint.masses().size() << " cells) -> "
            << joint_out << "\n";
      return kOk;
    };
  });

  // predict
  std::string predict_model, predict_data, predict_format, predict_out;
  auto* predict_cmd = app.add_subcommand("predict", "Predict labels and posteriors");
  predict_cmd->add_option("--model", predict_model, "Model file")->required();
  predict_cmd->add_option("--data", predict_data, "Dataset file")->required();
  predict_cmd->add_option("--format", predict_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  predict_cmd->add_option("--out", predict_out, "Write predictions here instead of stdout");
  add_json(predict_cmd);
  predict_cmd->callback([&] {
    action = [&] {
      auto model = load_model(predict_model);
      auto fmt = predict_format.empty() ? format_for_path(predict_data) : format_from_name(predict_format);
      auto xs = encode_instances(read_table(predict_data, fmt), model_schema(model));
      const auto& labels = model_labels(model);
      std::string text;
      if (!json) {
        text += "row,label";
        for (const auto& l : labels.labels()) text += "," + csv_field("p(" + l + ")");
        text += "\n";
      }
      for (std::size_t r = 0; r < xs.size(); ++r) {
        FiniteDistribution post;
        std::size_t decision = 0;
        if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) {
          post = posterior(*nb, xs[r]);
          decision = classify(*nb, xs[r]);
        } else {
          const auto& jt = std::get<JointTable>(model);
          post = exact_posterior(jt, xs[r]);
          decision = post.argmax();
        }
        if (json) {
          Json p;
          for (std::size_t k = 0; k < labels.size(); ++k) p[labels[k]] = post[k];
          text += Json{{"row", r}, {"label", labels[decision]}, {"posterior", p}}.dump() + "\n";
        } else {
          text += std::to_string(r) + "," + csv_field(labels[decision]);
          for (double v : post) text += "," + format_double(v);
          text += "\n";
        }
      }
      if (predict_out.empty())
        out << text;
      else
        write_file(predict_out, text);
      return kOk;
    };
  });

  // evaluate
  std::string eval_model, eval_loss;
  DataOptions eval_data;
  auto* eval_cmd = app.add_subcommand("evaluate", "Accuracy, confusion matrix and empirical risk");
  eval_cmd->add_option("--model", eval_model, "Model file")->required();
  add_data_options(eval_cmd, eval_data);
  eval_cmd->add_option("--loss", eval_loss, "Loss matrix JSON (rows = action, columns = true label)");
  add_json(eval_cmd);
  eval_cmd->callback([&] {
    action = [&] {
      auto model = load_model(eval_model);
      auto ds = load_for_model(eval_data, model);
      std::optional<LossMatrix> loss;
      if (!eval_loss.empty()) loss = loss_from_json(parse_json_file(eval_loss));
      auto report = std::visit([&](const auto& m) { return evaluate(m, ds, loss); }, model);
      if (json)
        out << report_to_json(report, model_labels(model)).dump() << "\n";
      else
        print_report(out, report, model_labels(model));
      return kOk;
    };
  });

  // compare
  std::string cmp_naive, cmp_joint, cmp_spec;
  DataOptions cmp_data;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare a Naive Bayes model with a joint-table model");
  cmp_cmd->add_option("--naive-model", cmp_naive, "Naive Bayes model file")->required();
  cmp_cmd->add_option("--joint-model", cmp_joint, "Joint table model file")->required();
  add_data_options(cmp_cmd, cmp_data);
  cmp_cmd->add_option("--spec", cmp_spec, "Generating spec; adds its Bayes error to the report");
  add_json(cmp_cmd);
  cmp_cmd->callback([&] {
    action = [&] {
      AnyModel naive = load_model(cmp_naive);
      AnyModel joint = load_model(cmp_joint);
      if (!std::holds_alternative<NaiveBayesModel>(naive)) throw Error("--naive-model is not a naive_bayes model");
      if (!std::holds_alternative<JointTable>(joint)) throw Error("--joint-model is not a joint_table model");
      const auto& nb = std::get<NaiveBayesModel>(naive);
      const auto& jt = std::get<JointTable>(joint);
      auto ds_nb = load_for_model(cmp_data, naive);
      auto ds_jt = load_for_model(cmp_data, joint);
      auto rep_nb = evaluate(nb, ds_nb);
      auto rep_jt = evaluate(jt, ds_jt);

      std::size_t both = 0, agree = 0;
      for (std::size_t r = 0; r < ds_nb.size(); ++r) {
        auto a = decide(nb, ds_nb.rows[r].instance, nullptr);
        auto b = decide(jt, ds_jt.rows[r].instance, nullptr);
        if (!a || !b) continue;
        ++both;
        // labels may be declared in different orders by the two models
        if (nb.label_space()[*a] == jt.label_space()[*b]) ++agree;
      }
      double agreement = both ? static_cast<double>(agree) / static_cast<double>(both) : 0.0;
      std::optional<double> berr;
      if (!cmp_spec.empty()) berr = bayes_error(to_joint(generator_spec_from_json(parse_json_file(cmp_spec))));

      if (json) {
        Json j{{"rows", ds_nb.size()},
               {"agreement", agreement},
               {"naive_accuracy", rep_nb.accuracy},
               {"joint_accuracy", rep_jt.accuracy},
               {"naive_undecidable", rep_nb.undecidable},
               {"joint_undecidable", rep_jt.undecidable}};
        if (berr) j["bayes_error"] = *berr;
        out << j.dump() << "\n";
      } else {
        out << "rows: " << ds_nb.size() << "\n"
            << "agreement: " << format_double(agreement) << "\n"
            << "naive_accuracy: " << format_double(rep_nb.accuracy) << "\n"
            << "joint_accuracy: " << format_double(rep_jt.accuracy) << "\n"
            << "naive_undecidable: " << rep_nb.undecidable << "\n"
            << "joint_undecidable: " << rep_jt.undecidable << "\n";
        if (berr) out << "bayes_error: " << format_double(*berr) << "\n";
      }
      return kOk;
    };
  });

  // paramcount
  int pc_n = 0;
  auto* pc_cmd = app.add_subcommand("paramcount", "Parameters of P(X|Y): full joint vs naive (boolean X and Y)");
  pc_cmd->add_option("--n", pc_n, "Number of boolean attributes")->required();
  add_json(pc_cmd);
  pc_cmd->callback([&] {
    action = [&] {
      auto full = param_count(ParamModel::full_joint, pc_n);
      auto naive = param_count(ParamModel::naive, pc_n);
      if (json) {
        out << Json{{"n", pc_n}, {"full_joint", full}, {"full_joint_formula", "2*(2^n-1)"},
                    {"naive", naive}, {"naive_formula", "2*n"}}
                   .dump()
            << "\n";
      } else {
        out << "full_joint=" << full << "  # 2*(2^" << pc_n << "-1)\n"
            << "naive=" << naive << "  # 2*" << pc_n << "\n";
      }
      return kOk;
    };
  });

  // synth
  std::string synth_spec, synth_out, synth_format, synth_schema_out, synth_label = "label";
  std::size_t synth_count = 0;
  std::uint64_t synth_seed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Sample a labeled dataset from a generator spec");
  synth_cmd->add_option("--spec", synth_spec, "Generator spec JSON (or a joint_table model)")->required();
  synth_cmd->add_option("--count", synth_count, "Number of rows")->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth_seed, "64-bit seed")->required();
  synth_cmd->add_option("--out", synth_out, "Output dataset path")->required();
  synth_cmd->add_option("--format", synth_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  synth_cmd->add_option("--label-column", synth_label, "Label column name")->capture_default_str();
  synth_cmd->add_option("--schema-out", synth_schema_out, "Also write the generator's schema as a sidecar");
  add_json(synth_cmd);
  synth_cmd->callback([&] {
    action = [&] {
      auto spec = generator_spec_from_json(parse_json_file(synth_spec));
      auto ds = sample(spec, synth_count, synth_seed);
      auto fmt = synth_format.empty() ? format_for_path(synth_out) : format_from_name(synth_format);
      write_file(synth_out, fmt == DataFormat::csv ? dataset_to_csv(ds, synth_label) : dataset_to_jsonl(ds, synth_label));
      if (!synth_schema_out.empty())
        write_file(synth_schema_out, sidecar_to_json(ds.schema, ds.label_space).dump(2) + "\n");
      if (json)
        out << Json{{"out", synth_out}, {"rows", ds.size()}, {"seed", synth_seed}}.dump() << "\n";
      else
        out << "wrote " << ds.size() << " rows -> " << synth_out << "\n";
      return kOk;
    };
  });

  // check-ci
  std::string ci_joint, ci_x, ci_y, ci_z;
  double ci_tol = kDefaultCiTolerance;
  auto* ci_cmd = app.add_subcommand("check-ci", "Check whether X is conditionally independent of Y given Z");
  ci_cmd->add_option("--joint", ci_joint, "discrete_joint JSON or joint_table model")->required();
  ci_cmd->add_option("--x", ci_x, "Variable X")->required();
  ci_cmd->add_option("--y", ci_y, "Variable Y")->required();
  ci_cmd->add_option("--z", ci_z, "Variable Z (conditioning)")->required();
  ci_cmd->add_option("--tol", ci_tol, "Absolute tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  add_json(ci_cmd);
  ci_cmd->callback([&] {
    action = [&] {
      auto dj = discrete_joint_from_json(parse_json_file(ci_joint));
      auto triple = marginalize_to_triple(dj.arities, dj.mass, dj.index_of(ci_x), dj.index_of(ci_y), dj.index_of(ci_z));
      auto result = is_conditionally_independent(triple, ci_tol);
      if (json) {
        Json j{{"x", ci_x}, {"y", ci_y}, {"z", ci_z}, {"tol", ci_tol}, {"independent", result.independent}};
        if (result.witness) {
          const auto& w = *result.witness;
          j["witness"] = {{"x", w.x}, {"y", w.y}, {"z", w.z},
                          {"p_x_given_yz", w.p_x_given_yz}, {"p_x_given_z", w.p_x_given_z}};
        }
        out << j.dump() << "\n";
      } else {
        out << ci_x << (result.independent ? " is" : " is NOT") << " conditionally independent of " << ci_y
            << " given " << ci_z << " (tol " << format_double(ci_tol) << ")\n";
        if (result.witness) {
          const auto& w = *result.witness;
          out << "witness: x=" << w.x << " y=" << w.y << " z=" << w.z << " P(x|y,z)=" << format_double(w.p_x_given_yz)
              << " P(x|z)=" << format_double(w.p_x_given_z) << "\n";
        }
      }
      return kOk;
    };
  });

  // mle-trial
  double mt_p = 0.5, mt_tol = 0.1;
  std::size_t mt_samples = 100, mt_trials = 1000;
  std::uint64_t mt_seed = 0;
  auto* mt_cmd = app.add_subcommand("mle-trial", "How often the MLE of a Bernoulli p lands within a tolerance");
  mt_cmd->add_option("--p", mt_p, "True probability")->required();
  mt_cmd->add_option("--samples", mt_samples, "Samples per trial")->required();
  mt_cmd->add_option("--trials", mt_trials, "Number of trials")->required();
  mt_cmd->add_option("--tolerance", mt_tol, "Allowed |p_hat - p|")->required();
  mt_cmd->add_option("--seed", mt_seed, "64-bit seed")->required();
  add_json(mt_cmd);
  mt_cmd->callback([&] {
    action = [&] {
      double frac = mle_concentration_trial(mt_p, mt_samples, mt_trials, mt_tol, mt_seed);
      if (json)
        out << Json{{"p", mt_p}, {"samples", mt_samples}, {"trials", mt_trials}, {"tolerance", mt_tol},
                    {"seed", mt_seed}, {"fraction_within", frac}}
                   .dump()
            << "\n";
      else
        out << "fraction_within=" << format_double(frac) << "\n";
      return kOk;
    };
  });

  std::vector<const char*> argv{"nbayes"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    // prints help for --help, or the error plus a usage hint
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace nbayes::cli
