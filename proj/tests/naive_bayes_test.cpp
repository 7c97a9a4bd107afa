#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nbayes/io.hpp"
#include "nbayes/naive_bayes.hpp"
#include "nbayes/synthetic.hpp"
#include "oracles.hpp"

using namespace nbayes;
using nbayes::testing::RawNaiveParams;

namespace {

// Labels ("0", "1"); P(Y=1)=0.5, P(X1=1|Y=1)=0.8, P(X2=1|Y=1)=0.6,
// P(X1=1|Y=0)=0.3, P(X2=1|Y=0)=0.4.
NaiveBayesModel worked_model() {
  FeatureSchema schema({FeatureSpec::boolean("x1"), FeatureSpec::boolean("x2")});
  std::vector<FeatureLikelihood> lk;
  lk.emplace_back(std::vector<FiniteDistribution>{FiniteDistribution({0.7, 0.3}), FiniteDistribution({0.2, 0.8})});
  lk.emplace_back(std::vector<FiniteDistribution>{FiniteDistribution({0.6, 0.4}), FiniteDistribution({0.4, 0.6})});
  return NaiveBayesModel(schema, LabelSpace({"0", "1"}), ClassPrior({0.5, 0.5}), std::move(lk));
}

}  // namespace

TEST(JointLogScore, WorkedExample) {
  auto model = worked_model();
  EXPECT_NEAR(joint_log_score(model, Instance::categorical({1, 1}), 1), std::log(0.24), 1e-15);
  EXPECT_NEAR(joint_log_score(model, Instance::categorical({1, 1}), 0), std::log(0.06), 1e-15);
}

TEST(JointLogScore, ZeroLikelihoodIsNegativeInfinity) {
  FeatureSchema schema({FeatureSpec::boolean("x")});
  std::vector<FeatureLikelihood> lk;
  lk.emplace_back(std::vector<FiniteDistribution>{FiniteDistribution({1.0, 0.0}), FiniteDistribution({0.5, 0.5})});
  NaiveBayesModel model(schema, LabelSpace({"a", "b"}), ClassPrior({0.5, 0.5}), std::move(lk));
  EXPECT_EQ(joint_log_score(model, Instance::categorical({1}), 0), kNegInf);
  EXPECT_EQ(posterior(model, Instance::categorical({1}))[1], 1.0);
}

TEST(JointLogScore, SingleFeature) {
  FeatureSchema schema({FeatureSpec::categorical("c", {"p", "q", "r"})});
  std::vector<FeatureLikelihood> lk;
  lk.emplace_back(std::vector<FiniteDistribution>{FiniteDistribution({0.2, 0.3, 0.5}), FiniteDistribution({0.6, 0.3, 0.1})});
  NaiveBayesModel model(schema, LabelSpace({"a", "b"}), ClassPrior({0.25, 0.75}), std::move(lk));
  EXPECT_NEAR(joint_log_score(model, Instance::categorical({2}), 1), std::log(0.75) + std::log(0.1), 1e-15);
}

TEST(JointLogScore, RejectsMismatchedInstance) {
  auto model = worked_model();
  EXPECT_THROW(joint_log_score(model, Instance::categorical({1}), 0), Error);
  EXPECT_THROW(joint_log_score(model, Instance::categorical({1, 2}), 0), Error);
  EXPECT_THROW(joint_log_score(model, Instance::categorical({1, 1}), 2), Error);
}

TEST(Posterior, WorkedExample) {
  auto post = posterior(worked_model(), Instance::categorical({1, 1}));
  EXPECT_NEAR(post[1], 0.8, 1e-15);
  EXPECT_NEAR(post[0], 0.2, 1e-15);
  EXPECT_EQ(classify(worked_model(), Instance::categorical({1, 1})), 1u);
}

TEST(Posterior, SymmetricModelIsUniform) {
  FeatureSchema schema({FeatureSpec::boolean("x")});
  std::vector<FeatureLikelihood> lk;
  lk.emplace_back(std::vector<FiniteDistribution>{FiniteDistribution({0.3, 0.7}), FiniteDistribution({0.3, 0.7})});
  NaiveBayesModel model(schema, LabelSpace({"a", "b"}), ClassPrior({0.5, 0.5}), std::move(lk));
  auto post = posterior(model, Instance::categorical({0}));
  EXPECT_EQ(post[0], 0.5);
  EXPECT_EQ(post[1], 0.5);
  EXPECT_EQ(classify(model, Instance::categorical({0})), 0u);  // exact tie -> lowest index
}

// 20 features, total log-probability about -700 per class: the linear-space
// product sits at the edge of double range; log-space stays exact.
TEST(Posterior, NoUnderflowAt700Nats) {
  const std::size_t n = 20;
  RawNaiveParams p;
  p.prior = {0.5, 0.5};
  std::vector<std::size_t> arities(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::exp(-35.0), b = std::exp(-35.1);
    p.cond.push_back({{a, 1.0 - a}, {b, 1.0 - b}});
  }
  auto model = nbayes::testing::model_from_raw(p, arities);
  std::vector<std::size_t> x(n, 0);
  auto post = posterior(model, Instance::categorical(x));
  auto oracle = nbayes::testing::linear_posterior(p, x);
  EXPECT_TRUE(std::isfinite(post[0]) && std::isfinite(post[1]));
  EXPECT_NEAR(post[0] + post[1], 1.0, 1e-12);
  EXPECT_NEAR(post[0], static_cast<double>(oracle[0]), 1e-12);
  EXPECT_NEAR(post[0], 1.0 / (1.0 + std::exp(-2.0)), 1e-12);
}

TEST(Posterior, AllClassesImpossibleIsError) {
  FeatureSchema schema({FeatureSpec::boolean("x")});
  std::vector<FeatureLikelihood> lk;
  lk.emplace_back(std::vector<FiniteDistribution>{FiniteDistribution({1.0, 0.0}), FiniteDistribution({1.0, 0.0})});
  NaiveBayesModel model(schema, LabelSpace({"a", "b"}), ClassPrior({0.5, 0.5}), std::move(lk));
  EXPECT_THROW(posterior(model, Instance::categorical({1})), Error);
  EXPECT_THROW(classify(model, Instance::categorical({1})), Error);
}

TEST(Model, RejectsKindMismatch) {
  FeatureSchema schema({FeatureSpec::real("r")});
  std::vector<FeatureLikelihood> lk;
  lk.emplace_back(std::vector<FiniteDistribution>{FiniteDistribution({0.5, 0.5}), FiniteDistribution({0.5, 0.5})});
  EXPECT_THROW(NaiveBayesModel(schema, LabelSpace({"a", "b"}), ClassPrior({0.5, 0.5}), lk), Error);
}

TEST(Train, GreenRedPrior) {
  LabeledDataset ds{FeatureSchema({FeatureSpec::categorical("color", {"g", "r"})}), LabelSpace({"GREEN", "RED"}), {}};
  ds.rows = {{Instance::categorical({0}), 0}, {Instance::categorical({0}), 0}, {Instance::categorical({1}), 1}};
  auto model = train(ds, {1.0, 0.0});
  EXPECT_EQ(model.prior()[0], 2.0 / 3.0);
  EXPECT_EQ(model.prior()[1], 1.0 / 3.0);
}

TEST(Train, DeterministicSerialization) {
  std::mt19937_64 rng(1);
  FeatureSchema schema({FeatureSpec::boolean("b"), FeatureSpec::real("r")});
  LabeledDataset ds{schema, LabelSpace({"a", "b", "c"}), {}};
  std::normal_distribution<double> nd;
  for (int r = 0; r < 100; ++r) ds.rows.push_back({Instance{{std::size_t(rng() % 2), nd(rng)}}, std::size_t(r % 3)});
  EXPECT_EQ(to_json(train(ds)).dump(), to_json(train(ds)).dump());
}

TEST(Train, MixedFeaturesScoreIsSumOfTerms) {
  FeatureSchema schema({FeatureSpec::boolean("b"), FeatureSpec::real("r")});
  LabeledDataset ds{schema, LabelSpace({"a", "b"}), {}};
  ds.rows.push_back({Instance{{std::size_t{1}, 0.0}}, 0});
  ds.rows.push_back({Instance{{std::size_t{1}, 2.0}}, 0});
  ds.rows.push_back({Instance{{std::size_t{0}, 5.0}}, 1});
  ds.rows.push_back({Instance{{std::size_t{0}, 7.0}}, 1});
  auto model = train(ds, {1.0, 0.0});
  Instance x{{std::size_t{1}, 1.5}};
  // class a: prior 1/2, P(b=1|a) = (2+1)/(2+2), N(1.5; mean 1, var 1)
  double expected = std::log(0.5) + std::log(0.75) + (-0.5 * std::log(2 * M_PI) - 0.125);
  EXPECT_NEAR(joint_log_score(model, x, 0), expected, 1e-14);
  EXPECT_EQ(classify(model, x), 0u);
}

TEST(Train, OneLabelIsRejected) {
  EXPECT_THROW(LabelSpace({"only"}), Error);
}

// --- properties over random models -----------------------------------------

TEST(NaiveBayesProperty, NormalizationAndDenominatorDrop) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10000; ++trial) {
    std::size_t n = 1 + rng() % 12, m = 2 + rng() % 4;
    std::vector<std::size_t> ar(n);
    for (auto& a : ar) a = 2 + rng() % 3;
    auto p = nbayes::testing::random_raw_params(rng, ar, m);
    auto model = nbayes::testing::model_from_raw(p, ar);
    std::vector<std::size_t> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng() % ar[i];
    auto inst = Instance::categorical(x);
    auto post = posterior(model, inst);
    ASSERT_NEAR(compensated_sum(post.probabilities()), 1.0, 1e-12);
    ASSERT_EQ(classify(model, inst), post.argmax());
  }
}

TEST(NaiveBayesProperty, LogSpaceMatchesLinearSpace) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 3000; ++trial) {
    std::size_t n = 1 + rng() % 20, m = 2 + rng() % 3;
    std::vector<std::size_t> ar(n);
    for (auto& a : ar) a = 2 + rng() % 3;
    auto p = nbayes::testing::random_raw_params(rng, ar, m, 1e-3);
    auto model = nbayes::testing::model_from_raw(p, ar);
    std::vector<std::size_t> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng() % ar[i];
    auto post = posterior(model, Instance::categorical(x));
    auto lin = nbayes::testing::linear_posterior(p, x);
    for (std::size_t k = 0; k < m; ++k)
      ASSERT_LE(std::fabs(post[k] - lin[k]), 1e-9 * static_cast<double>(lin[k]) + 1e-300);
  }
}

TEST(NaiveBayesProperty, RaisingAPriorNeverLowersItsPosterior) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t n = 1 + rng() % 6, m = 2 + rng() % 3;
    std::vector<std::size_t> ar(n, 2);
    auto p = nbayes::testing::random_raw_params(rng, ar, m, 1e-3);
    std::vector<std::size_t> x(n);
    for (auto& v : x) v = rng() % 2;
    std::size_t k = rng() % m;
    auto before = posterior(nbayes::testing::model_from_raw(p, ar), Instance::categorical(x))[k];

    // move mass toward class k, scaling the others proportionally
    double t = u(rng);
    auto q = p;
    for (std::size_t j = 0; j < m; ++j) q.prior[j] = j == k ? p.prior[k] + t * (1 - p.prior[k]) : p.prior[j] * (1 - t);
    auto after = posterior(nbayes::testing::model_from_raw(q, ar), Instance::categorical(x))[k];
    ASSERT_GE(after, before - 1e-15);
  }
}

TEST(NaiveBayesProperty, MatchesExactBayesOnImpliedJoint) {
  std::mt19937_64 rng(24);
  for (std::size_t n = 1; n <= 10; ++n) {
    std::vector<std::size_t> ar(n, 2);
    auto p = nbayes::testing::random_raw_params(rng, ar, 2);
    auto spec = nbayes::testing::factored_from_raw(p, ar);
    auto model = spec.to_model();
    auto joint = to_joint(spec);
    for (std::size_t code = 0; code < joint.instance_count(); ++code) {
      auto x = decode_instance(joint.schema(), code);
      auto a = posterior(model, x);
      auto b = exact_posterior(joint, x);
      for (std::size_t k = 0; k < 2; ++k) ASSERT_NEAR(a[k], b[k], 1e-12);
    }
  }
}

TEST(LogSumExp, EdgeCases) {
  std::vector<double> all_neg_inf{kNegInf, kNegInf};
  EXPECT_EQ(log_sum_exp(all_neg_inf), kNegInf);
  std::vector<double> big{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
  std::vector<double> tiny{-1000.0, kNegInf};
  EXPECT_EQ(log_sum_exp(tiny), -1000.0);
}
