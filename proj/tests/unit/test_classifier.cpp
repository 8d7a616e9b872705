#include <gtest/gtest.h>

#include "optrend/classifier.hpp"
#include "support/newton_oracle.hpp"

using namespace optrend;

namespace {

TrainingSet toy_set(int per_class, std::uint64_t seed) {
  // Class 0 speaks "alpha"-words, class 1 "beta"-words; both share filler.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 9);
  TrainingSet ts;
  ts.classes = {"A", "B"};
  for (int i = 0; i < 2 * per_class; ++i) {
    TrainingExample e;
    e.label = i % 2;
    e.tweet_id = std::to_string(i);
    std::string text;
    for (int k = 0; k < 6; ++k) {
      const bool signal = pick(rng) < 6;
      text += (signal ? (e.label ? "beta" : "alpha") : "filler") + std::to_string(pick(rng)) + " ";
    }
    e.tokens = tokenize(text);
    ts.examples.push_back(std::move(e));
  }
  return ts;
}

}  // namespace

TEST(Classifier, AnalyticGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  double worst = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = oracle::random_problem(rng, 200, 30, 6);
    const LogisticObjective obj(d, 0.01);
    std::vector<double> w(obj.num_params());
    std::normal_distribution<double> nd(0.0, 0.7);
    for (auto& x : w) x = nd(rng);
    std::vector<double> g;
    obj.value_and_gradient(w, g);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double h = 1e-5;
      auto wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const double fd = (obj.value(wp) - obj.value(wm)) / (2 * h);
      const double rel = std::fabs(fd - g[j]) / std::max(std::fabs(g[j]), 1e-6);
      worst = std::max(worst, rel);
      EXPECT_LE(rel, 1e-5) << "trial " << trial << " coordinate " << j;
    }
  }
  RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(Classifier, LbfgsReachesTheNewtonOptimum) {
  std::mt19937_64 rng(11);
  for (double lambda : {1e-3, 1e-2, 1e-1}) {
    const auto d = oracle::random_problem(rng, 200, 40, 8);
    OptimizerReport rep;
    train_head(d, lambda, {}, &rep);
    const long double best = oracle::newton_minimum(d, lambda);
    EXPECT_TRUE(rep.converged);
    EXPECT_NEAR(rep.loss, static_cast<double>(best), 1e-6) << "lambda " << lambda;
    EXPECT_GE(rep.loss, static_cast<double>(best) - 1e-12);
  }
}

TEST(Classifier, StableOnExtremeScores) {
  EXPECT_EQ(sigmoid(-800), 0.0);
  EXPECT_EQ(sigmoid(800), 1.0);
  EXPECT_NEAR(softplus(800), 800, 1e-12);
  EXPECT_NEAR(softplus(-800), 0, 1e-300);
  EXPECT_NEAR(softplus(0), std::log(2.0), 1e-15);
}

TEST(Classifier, LearnsASeparableToyProblem) {
  const auto ts = toy_set(60, 1);
  const auto m = train(ts, 1e-3, 1);
  EXPECT_EQ(m.heads.size(), 1u);
  EXPECT_EQ(predict_tweet(m, tokenize("alpha1 alpha2 filler3")).cls, 0);
  EXPECT_EQ(predict_tweet(m, tokenize("beta1 beta4")).cls, 1);
  // Unknown features leave only the bias.
  EXPECT_NEAR(predict_tweet(m, tokenize("zzz")).probability, sigmoid(m.heads[0].bias), 1e-15);
  EXPECT_THROW(train(ts, 0.0, 1), TrainingError);
}

TEST(Classifier, OneVsRestForThreeClasses) {
  TrainingSet ts;
  ts.classes = {"A", "B", "C"};
  const char* words[] = {"red", "green", "blue"};
  for (int i = 0; i < 90; ++i) {
    TrainingExample e;
    e.label = i % 3;
    e.tokens = tokenize(std::string(words[e.label]) + " x" + std::to_string(i % 7));
    ts.examples.push_back(e);
  }
  const auto m = train(ts, 1e-3, 1);
  ASSERT_EQ(m.heads.size(), 3u);
  EXPECT_EQ(predict_tweet(m, tokenize("green")).cls, 1);
  EXPECT_EQ(predict_tweet(m, tokenize("blue x3")).cls, 2);
}

TEST(Classifier, AurocByHand) {
  EXPECT_DOUBLE_EQ(*auroc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}), 0.75);
  EXPECT_DOUBLE_EQ(*auroc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(*auroc({0.9, 0.1}, {1, 0}), 1.0);
  EXPECT_FALSE(auroc({0.2, 0.3}, {1, 1}));
}

TEST(Classifier, MetricsByHand) {
  // tp=2, fn=1, fp=1, tn=4
  const std::vector<int> pred = {1, 1, 0, 1, 0, 0, 0, 0};
  const std::vector<int> lab = {1, 1, 1, 0, 0, 0, 0, 0};
  const std::vector<double> score = {0.9, 0.8, 0.3, 0.7, 0.2, 0.1, 0.1, 0.05};
  const auto m = evaluate_metrics(pred, score, lab);
  const double f1_pos = 2.0 * (2.0 / 3) * (2.0 / 3) / (4.0 / 3);
  const double f1_neg = 2.0 * 0.8 * 0.8 / 1.6;
  EXPECT_NEAR(m.f1, (f1_pos + f1_neg) / 2, 1e-15);
  EXPECT_NEAR(m.accuracy, 6.0 / 8, 1e-15);
  EXPECT_NEAR(m.precision, (2.0 / 3 + 0.8) / 2, 1e-15);
  EXPECT_NEAR(m.recall, (2.0 / 3 + 0.8) / 2, 1e-15);
  EXPECT_NEAR(*m.auroc, 14.0 / 15, 1e-15);
  EXPECT_THROW(evaluate_metrics({1}, {0.5}, {1, 0}), std::invalid_argument);
}

TEST(Classifier, CrossValidationIsDeterministicAndPicksTheBestLambda) {
  const auto ts = toy_set(50, 2);
  const std::vector<double> grid = {1e-4, 1e-2, 10.0};
  const auto a = cross_validate(ts, grid, 5, 9);
  const auto b = cross_validate(ts, grid, 5, 9);
  EXPECT_EQ(a.mean_f1, b.mean_f1);
  EXPECT_EQ(a.folds.size(), 15u);
  const auto best = std::max_element(a.mean_f1.begin(), a.mean_f1.end()) - a.mean_f1.begin();
  EXPECT_EQ(a.chosen_lambda, grid[static_cast<std::size_t>(best)]);
  EXPECT_NEAR(a.mean.f1, a.mean_f1[static_cast<std::size_t>(best)], 1e-12);
  EXPECT_GT(a.mean.f1, 0.9);
  EXPECT_TRUE(a.mean.auroc);
  const auto j = cv_report_json(a);
  EXPECT_EQ(j["grid"].size(), 3u);
  EXPECT_THROW(cross_validate(ts, grid, 1, 9), std::invalid_argument);
}

TEST(Classifier, ModelFileRoundTrip) {
  const auto m = train(toy_set(30, 4), 1e-2, 5);
  const auto text = model_to_json(m);
  const auto back = model_from_json(text);
  EXPECT_EQ(back.classes, m.classes);
  EXPECT_EQ(back.vocab.features(), m.vocab.features());
  EXPECT_EQ(back.heads[0].weights, m.heads[0].weights);
  EXPECT_EQ(back.heads[0].bias, m.heads[0].bias);
  EXPECT_EQ(model_to_json(back), text);
  auto tampered = nlohmann::json::parse(text);
  tampered["vocabulary"].push_back("zzz-extra");
  EXPECT_THROW(model_from_json(tampered.dump()), std::invalid_argument);
  tampered = nlohmann::json::parse(text);
  tampered["format"] = "other";
  EXPECT_THROW(model_from_json(tampered.dump()), std::invalid_argument);
}
