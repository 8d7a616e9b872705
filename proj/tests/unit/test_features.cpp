#include <gtest/gtest.h>

#include "optrend/features.hpp"

using namespace optrend;

namespace {

struct Builder {
  CorpusWindow c{parse_day("2016-06-01"), parse_day("2016-06-02")};
  int id = 0;
  void add(const std::string& text, bool retweet = false, const std::string& client = "Twitter for iPhone") {
    TweetRecord r;
    r.tweet_id = std::to_string(++id);
    r.user_id = "u";
    r.timestamp = parse_timestamp("2016-06-01T00:00:00Z") + id;
    r.text = text;
    for (const auto& t : tokenize(text))
      if (t.kind == TokenKind::hashtag) r.hashtags.push_back(t.text);
    r.source_client = client;
    if (retweet) {
      r.is_retweet = true;
      r.retweet_of = "v";
    }
    c.add(r);
  }
};

ClassAssignment two_camps() {
  ClassAssignment a;
  a.classes = {"A", "B"};
  a.tags["a1"] = {0, Provenance::seed, 0};
  a.tags["a2"] = {0, Provenance::propagated, 1};
  a.tags["b1"] = {1, Provenance::seed, 0};
  return a;
}

std::vector<std::string> features_of(const TrainingExample& e) {
  std::vector<std::string> f;
  for (const auto& t : e.tokens) f.push_back(t.feature());
  return f;
}

}  // namespace

TEST(Features, LabelsStripMarkersAndSkipAmbiguousTweets) {
  Builder b;
  b.add("good day #a1 #other");   // A
  b.add("bad day #b1");           // B
  b.add("mixed #a1 #b1");         // both classes: skipped
  b.add("plain words");           // no class: skipped
  b.add("repost #a2", true);      // retweet: skipped
  const auto ts = build_training_set(b.c, two_camps(), 1);
  ASSERT_EQ(ts.examples.size(), 2u);
  EXPECT_EQ(ts.examples[0].tweet_id, "1");
  EXPECT_EQ(ts.examples[0].label, 0);
  EXPECT_EQ(features_of(ts.examples[0]), (std::vector<std::string>{"good", "day", "#other"}));
  EXPECT_EQ(ts.examples[0].label_tags, (std::vector<std::string>{"a1"}));
  EXPECT_EQ(ts.examples[1].label, 1);
  EXPECT_EQ(ts.class_counts(), (std::vector<std::size_t>{1, 1}));
}

TEST(Features, BalancesClassesDeterministically) {
  Builder b;
  for (int i = 0; i < 10; ++i) b.add("w" + std::to_string(i) + " #a1");
  for (int i = 0; i < 4; ++i) b.add("v" + std::to_string(i) + " #b1");
  const auto ts = build_training_set(b.c, two_camps(), 7);
  EXPECT_EQ(ts.class_counts(), (std::vector<std::size_t>{4, 4}));
  const auto again = build_training_set(b.c, two_camps(), 7);
  ASSERT_EQ(again.examples.size(), ts.examples.size());
  for (std::size_t i = 0; i < ts.examples.size(); ++i) EXPECT_EQ(again.examples[i].tweet_id, ts.examples[i].tweet_id);
  // Output keeps corpus order.
  for (std::size_t i = 1; i < ts.examples.size(); ++i)
    EXPECT_LT(std::stoi(ts.examples[i - 1].tweet_id), std::stoi(ts.examples[i].tweet_id));
  // Different seeds draw different majority subsets (with high probability for C(10,4)).
  const auto other = build_training_set(b.c, two_camps(), 8);
  bool differs = false;
  for (std::size_t i = 0; i < ts.examples.size(); ++i) differs |= other.examples[i].tweet_id != ts.examples[i].tweet_id;
  EXPECT_TRUE(differs);
}

TEST(Features, OfficialClientRestriction) {
  Builder b;
  b.add("x #a1");
  b.add("y #a1", false, "IFTTT");
  b.add("z #b1");
  b.add("q #b1", false, "IFTTT");
  const auto spec = FilterSpec::defaults();
  EXPECT_EQ(build_training_set(b.c, two_camps(), 1, &spec).examples.size(), 2u);
  EXPECT_EQ(build_training_set(b.c, two_camps(), 1).examples.size(), 4u);
}

TEST(Features, EmptyClassIsAnError) {
  Builder b;
  b.add("x #a1");
  EXPECT_THROW(build_training_set(b.c, two_camps(), 1), TrainingError);
  ClassAssignment one;
  one.classes = {"A"};
  EXPECT_THROW(build_training_set(b.c, one, 1), TrainingError);
}

TEST(Features, UnigramsAndBigrams) {
  const auto f = feature_strings(tokenize("vote for @her #now"));
  EXPECT_EQ(f, (std::vector<std::string>{"vote", "vote for", "for", "for @her", "@her", "@her #now", "#now"}));
}

TEST(Features, VocabularyAndVectors) {
  Builder b;
  b.add("alpha beta #a1");
  b.add("beta gamma #b1");
  const auto ts = build_training_set(b.c, two_camps(), 1);
  const auto v = Vocabulary::build(ts);
  EXPECT_EQ(v.features(), (std::vector<std::string>{"alpha", "alpha beta", "beta", "beta gamma", "gamma"}));
  EXPECT_EQ(*v.id("beta"), 2u);
  EXPECT_FALSE(v.id("delta"));
  const auto fv = vectorize(tokenize("gamma delta beta beta"), v);
  EXPECT_EQ(fv, (std::vector<std::uint32_t>{2, 4}));
  EXPECT_EQ(v.hash(), Vocabulary(v.features()).hash());
  EXPECT_NE(v.hash(), Vocabulary({"alpha"}).hash());
  EXPECT_EQ(v.table_csv().substr(0, 17), "id\tfeature\n0\talph");
}

TEST(Features, JsonlExport) {
  Builder b;
  b.add("hi #a1");
  b.add("yo #b1");
  const auto out = training_set_jsonl(build_training_set(b.c, two_camps(), 1));
  EXPECT_EQ(out, "{\"class\":\"A\",\"tokens\":[[\"word\",\"hi\"]],\"tweet_id\":\"1\"}\n"
                 "{\"class\":\"B\",\"tokens\":[[\"word\",\"yo\"]],\"tweet_id\":\"2\"}\n");
}
