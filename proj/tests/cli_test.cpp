#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "nbayes/cli.hpp"
#include "oracles.hpp"

using namespace nbayes;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp_path(const std::string& name) {
  auto dir = fs::path(NBAYES_TEST_TMPDIR) / "cli_test_files";
  fs::create_directories(dir);
  return (dir / name).string();
}

// 40 GREEN, 20 RED; the feature splits evenly within each class
std::string green_red_csv() {
  auto p = tmp_path("green_red.csv");
  std::string text = "shade,label\n";
  for (int i = 0; i < 40; ++i) text += std::string(i % 2 ? "dark" : "light") + ",GREEN\n";
  for (int i = 0; i < 20; ++i) text += std::string(i % 2 ? "dark" : "light") + ",RED\n";
  write_file(p, text);
  return p;
}

std::string weather_joint_file() {
  DiscreteJoint dj{{"Thunder", "Rain", "Lightning"}, {2, 2, 2}, weather_example().masses()};
  auto p = tmp_path("weather.json");
  write_file(p, to_json(dj).dump());
  return p;
}

std::string spec_file() {
  std::mt19937_64 rng(21);
  std::vector<std::size_t> ar{2, 2, 3};
  auto spec = nbayes::testing::factored_from_raw(nbayes::testing::random_raw_params(rng, ar, 2), ar);
  auto p = tmp_path("spec.json");
  write_file(p, to_json(GeneratorSpec{spec}).dump(2));
  return p;
}

}  // namespace

TEST(Cli, ParamCount) {
  auto r = run({"paramcount", "--n", "30"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("full_joint=2147483646"), std::string::npos);
  EXPECT_NE(r.out.find("naive=60"), std::string::npos);

  auto j = Json::parse(run({"paramcount", "--n", "10", "--json"}).out);
  EXPECT_EQ(j["full_joint"].get<std::uint64_t>(), 2046u);
  EXPECT_EQ(j["naive"].get<std::uint64_t>(), 20u);
  EXPECT_EQ(run({"paramcount", "--n", "63"}).code, 2);
}

TEST(Cli, TrainThenPredictUninformativeFeature) {
  auto data = green_red_csv();
  auto model = tmp_path("gr_model.json");
  auto t = run({"train", "--data", data, "--out", model});
  ASSERT_EQ(t.code, 0) << t.err;

  auto m = Json::parse(read_file(model));
  EXPECT_EQ(m["kind"], "naive_bayes");
  EXPECT_EQ(m["prior"][0].get<double>(), 2.0 / 3.0);

  auto p = run({"predict", "--model", model, "--data", data, "--json"});
  ASSERT_EQ(p.code, 0) << p.err;
  std::istringstream lines(p.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    auto row = Json::parse(line);
    EXPECT_EQ(row["label"], "GREEN");
    EXPECT_NEAR(row["posterior"]["GREEN"].get<double>(), 2.0 / 3.0, 1e-12);
    ++count;
  }
  EXPECT_EQ(count, 60);

  auto text = run({"predict", "--model", model, "--data", data});
  EXPECT_EQ(text.out.substr(0, text.out.find('\n')), "row,label,p(GREEN),p(RED)");
}

TEST(Cli, MleTrial) {
  auto r = run({"mle-trial", "--p", "0.5", "--samples", "100", "--tolerance", "0.1", "--trials", "1000", "--seed", "7"});
  ASSERT_EQ(r.code, 0);
  ASSERT_EQ(r.out.rfind("fraction_within=", 0), 0u);
  double frac = std::stod(r.out.substr(16));
  EXPECT_GE(frac, 0.95);
  EXPECT_NEAR(frac, nbayes::testing::binomial_within_probability(100, 0.5, 0.1), 0.03);
}

TEST(Cli, SynthTrainCompareEvaluate) {
  auto spec = spec_file();
  auto data = tmp_path("synth.csv"), side = tmp_path("synth_schema.json");
  ASSERT_EQ(run({"synth", "--spec", spec, "--count", "3000", "--seed", "11", "--out", data, "--schema-out", side}).code, 0);
  auto nb = tmp_path("synth_nb.json"), jt = tmp_path("synth_jt.json");
  ASSERT_EQ(run({"train", "--data", data, "--schema", side, "--out", nb}).code, 0);
  auto tj = run({"train-joint", "--data", data, "--schema", side, "--out", jt});
  ASSERT_EQ(tj.code, 0) << tj.err;

  auto c = run({"compare", "--naive-model", nb, "--joint-model", jt, "--data", data, "--spec", spec, "--json"});
  ASSERT_EQ(c.code, 0) << c.err;
  auto j = Json::parse(c.out);
  EXPECT_EQ(j["rows"], 3000);
  double bayes_acc = 1.0 - j["bayes_error"].get<double>();
  EXPECT_NEAR(j["naive_accuracy"].get<double>(), bayes_acc, 0.05);
  EXPECT_GT(j["agreement"].get<double>(), 0.9);

  auto loss = tmp_path("loss.json");
  write_file(loss, "[[0,1],[1,0]]");
  auto e = run({"evaluate", "--model", nb, "--data", data, "--loss", loss, "--json"});
  ASSERT_EQ(e.code, 0) << e.err;
  auto ej = Json::parse(e.out);
  EXPECT_DOUBLE_EQ(ej["empirical_risk"].get<double>(), 1.0 - ej["accuracy"].get<double>());

  auto et = run({"evaluate", "--model", nb, "--data", data});
  EXPECT_NE(et.out.find("accuracy"), std::string::npos);
  EXPECT_NE(et.out.find("confusion"), std::string::npos);
}

TEST(Cli, SynthIsDeterministic) {
  auto spec = spec_file();
  auto a = tmp_path("det_a.jsonl"), b = tmp_path("det_b.jsonl");
  ASSERT_EQ(run({"synth", "--spec", spec, "--count", "200", "--seed", "5", "--out", a}).code, 0);
  ASSERT_EQ(run({"synth", "--spec", spec, "--count", "200", "--seed", "5", "--out", b}).code, 0);
  EXPECT_EQ(read_file(a), read_file(b));
}

TEST(Cli, CheckCiWeather) {
  auto w = weather_joint_file();
  auto r = run({"check-ci", "--joint", w, "--x", "Thunder", "--y", "Rain", "--z", "Lightning", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_TRUE(j["independent"].get<bool>());
  EXPECT_FALSE(j.contains("witness"));

  // Rain does not screen Thunder off from Lightning
  auto d = run({"check-ci", "--joint", w, "--x", "Thunder", "--y", "Lightning", "--z", "Rain", "--json"});
  ASSERT_EQ(d.code, 0) << d.err;
  auto dj = Json::parse(d.out);
  EXPECT_FALSE(dj["independent"].get<bool>());
  ASSERT_TRUE(dj.contains("witness"));
  EXPECT_GT(std::fabs(dj["witness"]["p_x_given_yz"].get<double>() - dj["witness"]["p_x_given_z"].get<double>()), 1e-9);

  EXPECT_EQ(run({"check-ci", "--joint", w, "--x", "Thunder", "--y", "Snow", "--z", "Lightning"}).code, 2);
}

TEST(Cli, JsonOutputIsByteIdenticalAcrossRuns) {
  auto w = weather_joint_file();
  std::vector<std::string> args{"check-ci", "--joint", w, "--x", "Thunder", "--y", "Lightning", "--z", "Rain", "--json"};
  EXPECT_EQ(run(args).out, run(args).out);
  std::vector<std::string> mt{"mle-trial", "--p", "0.3", "--samples", "40", "--tolerance", "0.1",
                              "--trials", "300", "--seed", "3", "--json"};
  EXPECT_EQ(run(mt).out, run(mt).out);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"paramcount"}).code, 1);
  EXPECT_EQ(run({"paramcount", "--n", "3", "--bogus"}).code, 1);
  EXPECT_EQ(run({"paramcount", "--help"}).code, 0);

  auto missing = run({"train", "--data", tmp_path("nope.csv"), "--out", tmp_path("nope.json")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_FALSE(missing.err.empty());

  auto empty = tmp_path("header_only.csv");
  write_file(empty, "a,label\n");
  auto e = run({"train", "--data", empty, "--out", tmp_path("empty_model.json")});
  EXPECT_EQ(e.code, 2);
  EXPECT_NE(e.err.find("empty dataset"), std::string::npos);

  auto bad_model = tmp_path("bad_model.json");
  write_file(bad_model, R"({"format_version":99,"kind":"naive_bayes"})");
  EXPECT_EQ(run({"predict", "--model", bad_model, "--data", green_red_csv()}).code, 2);
}
