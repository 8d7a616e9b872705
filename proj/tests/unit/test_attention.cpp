#include <gtest/gtest.h>

#include "optrend/attention.hpp"
#include "optrend/synth.hpp"

using namespace optrend;

namespace {

struct Builder {
  CorpusWindow c{parse_day("2016-06-01"), parse_day("2016-06-02")};
  int id = 0;
  void add(const std::string& day, const std::string& user, const std::string& text,
           std::vector<std::string> mentions = {}) {
    TweetRecord r;
    r.tweet_id = std::to_string(++id);
    r.user_id = user;
    r.timestamp = parse_timestamp(day + "T00:00:00Z") + id;
    r.text = text;
    for (const auto& t : tokenize(text))
      if (t.kind == TokenKind::hashtag) r.hashtags.push_back(t.text);
    r.mentions = std::move(mentions);
    r.source_client = "Twitter Web Client";
    c.add(r);
  }
};

// "bad" pushes toward class 1 (negative), "good" toward class 0.
ModelParams toy_sentiment() {
  ModelParams m;
  m.classes = {"positive", "negative"};
  m.vocab = Vocabulary({"bad", "good"});
  m.heads.push_back({{5.0, -5.0}, 0.0});
  return m;
}

}  // namespace

TEST(Attention, KeywordMatching) {
  TweetRecord r;
  const auto kw = KeywordSets::defaults();
  EXPECT_TRUE(mentions_any(r, tokenize("go Hillary"), kw.a));
  EXPECT_TRUE(mentions_any(r, tokenize("#Trump rally"), kw.b));
  EXPECT_TRUE(mentions_any(r, tokenize("hi @realDonaldTrump"), kw.b));
  EXPECT_FALSE(mentions_any(r, tokenize("hillarys plan trumpet"), kw.a));
  EXPECT_FALSE(mentions_any(r, tokenize("trumpet"), kw.b));
  r.mentions = {"HillaryClinton"};
  EXPECT_TRUE(mentions_any(r, tokenize("nothing here"), kw.a));
}

TEST(Attention, MentionMetricCountsDistinctUsers) {
  Builder b;
  // Day 1: u1 mentions Clinton twice, u2 mentions both, u3 mentions Trump, u4 neither.
  b.add("2016-06-01", "u1", "clinton speech");
  b.add("2016-06-01", "u1", "hillary again");
  b.add("2016-06-01", "u2", "clinton vs trump");
  b.add("2016-06-01", "u3", "", {"realDonaldTrump"});
  b.add("2016-06-01", "u4", "weather");
  // Day 2: no candidate mentions.
  b.add("2016-06-02", "u1", "weather");
  const auto m = metric_mentions(b.c);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(*m.values[0], 2.0 / 4);  // N_A = {u1,u2}, N_B = {u2,u3}
  EXPECT_FALSE(m.values[1]);
}

TEST(Attention, MentionEmotionMetricByHand) {
  Builder b;
  b.add("2016-06-01", "u1", "hillary good");  // A positive
  b.add("2016-06-01", "u2", "hillary bad");   // A negative
  b.add("2016-06-01", "u3", "trump bad");     // B negative
  b.add("2016-06-01", "u4", "trump good");    // B positive
  b.add("2016-06-01", "u5", "trump bad");     // B negative
  b.add("2016-06-01", "u6", "bad day");       // no candidate
  const auto m = metric_mentions_emotion(b.c, toy_sentiment());
  // (A_pos + B_neg) / all = (1 + 2) / 5
  EXPECT_DOUBLE_EQ(*m.values[0], 3.0 / 5);
  EXPECT_FALSE(m.values[1]);
  ModelParams three = toy_sentiment();
  three.classes.push_back("x");
  EXPECT_THROW(metric_mentions_emotion(b.c, three), std::invalid_argument);
}

TEST(Attention, HashtagCountMetricByHand) {
  Builder b;
  b.add("2016-06-01", "u1", "#ImWithHer #ImWithHer");  // pro A
  b.add("2016-06-01", "u2", "#NeverTrump");            // anti B
  b.add("2016-06-01", "u3", "#MAGA");                  // pro B
  b.add("2016-06-01", "u3", "#MAGA again");            // same user, counted once
  b.add("2016-06-01", "u4", "#NeverHillary #MAGA");    // anti A and pro B
  b.add("2016-06-02", "u5", "#other");
  const auto m = metric_hashtag_counts(b.c);
  // pro_A 1, anti_B 1, pro_B 2, anti_A 1
  EXPECT_DOUBLE_EQ(*m.values[0], 2.0 / 5);
  EXPECT_FALSE(m.values[1]);
}

TEST(Attention, SentimentDistantSupervision) {
  Builder b;
  b.add("2016-06-01", "u1", "lovely :)");
  b.add("2016-06-01", "u2", "awful :(");
  b.add("2016-06-01", "u3", "mixed :) :(");
  b.add("2016-06-01", "u4", "none here");
  const auto ts = build_sentiment_training_set(b.c, 1);
  ASSERT_EQ(ts.examples.size(), 2u);
  EXPECT_EQ(ts.classes, (std::vector<std::string>{"positive", "negative"}));
  EXPECT_EQ(ts.examples[0].label, 0);
  EXPECT_EQ(ts.examples[1].label, 1);
  for (const auto& e : ts.examples)
    for (const auto& t : e.tokens) EXPECT_NE(t.kind, TokenKind::emoticon);
}

TEST(Attention, SyntheticMentionsFollowPlantedAttention) {
  // Attention wanders independently of support, so the mention metric tracks attention_a.
  auto cfg = synth::calibrated(5);
  cfg.days = 30;
  const auto w = synth::generate(cfg);
  const auto m = metric_mentions(w.corpus);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.values[i]) {
      x.push_back(*m.values[i]);
      y.push_back(w.truth.attention_a[i]);
    }
  ASSERT_GE(x.size(), 25u);
  EXPECT_GT(*stats::pearson(x, y), 0.8);
}
