#include <gtest/gtest.h>

#include <sstream>

#include "optrend/corpus.hpp"

using namespace optrend;

namespace {

std::string line(const std::string& id, const std::string& user, const std::string& ts, const std::string& extra = "") {
  return R"({"tweet_id":")" + id + R"(","user_id":")" + user + R"(","timestamp":")" + ts +
         R"(","text":"hello","hashtags":["#MAGA","ImWithHer"],"mentions":[],"retweet_of":null,"reply_to":null,"quote_of":null,"source_client":"Twitter for iPhone","is_retweet":false)" +
         extra + "}";
}

LoadedCorpus load(const std::string& text, std::optional<Day> s = {}, std::optional<Day> e = {}) {
  std::istringstream in(text);
  return load_corpus(in, s, e);
}

}  // namespace

TEST(Corpus, ParsesAndNormalizesHashtags) {
  const auto r = parse_json_line(line("1", "u", "2016-06-01T10:00:00Z"));
  EXPECT_EQ(r.hashtags, (std::vector<std::string>{"maga", "imwithher"}));
  EXPECT_EQ(r.day(), parse_day("2016-06-01"));
  EXPECT_FALSE(r.retweet_of);
}

TEST(Corpus, CanonicalRoundTrip) {
  TweetRecord r;
  r.tweet_id = "42";
  r.user_id = "alice";
  r.timestamp = parse_timestamp("2016-07-04T12:34:56Z");
  r.text = "RT @bob: caf\xc3\xa9 \"quoted\"";
  r.hashtags = {"a", "b"};
  r.mentions = {"bob"};
  r.retweet_of = "bob";
  r.is_retweet = true;
  r.source_client = "TweetDeck";
  const auto s = to_json_line(r);
  EXPECT_EQ(parse_json_line(s), r);
  EXPECT_EQ(to_json_line(parse_json_line(s)), s);
  EXPECT_EQ(s.find('\n'), std::string::npos);
}

TEST(Corpus, RejectsInconsistentRetweetFlag) {
  auto bad = line("1", "u", "2016-06-01T10:00:00Z");
  bad.replace(bad.find("\"is_retweet\":false"), 18, "\"is_retweet\":true");
  EXPECT_THROW(parse_json_line(bad), std::invalid_argument);
}

TEST(Corpus, WindowBoundsAndEmptyDays) {
  const auto lc = load(line("1", "u", "2016-06-01T10:00:00Z") + "\n" + line("2", "v", "2016-06-04T00:00:00Z") + "\n");
  const auto& w = lc.window;
  EXPECT_EQ(w.start_day(), parse_day("2016-06-01"));
  EXPECT_EQ(w.end_day(), parse_day("2016-06-04"));
  EXPECT_EQ(w.num_days(), 4u);
  EXPECT_TRUE(w.on(parse_day("2016-06-02")).empty());
  EXPECT_EQ(w.size(), 2u);
  EXPECT_EQ(lc.report.loaded, 2u);
}

TEST(Corpus, ExplicitWindowCountsOutsideRecordsAsMalformed) {
  std::string text;
  for (int i = 1; i <= 9; ++i) text += line(std::to_string(i), "u", "2016-06-0" + std::to_string(i) + "T00:00:00Z") + "\n";
  const auto lc = load(text, parse_day("2016-06-03"), parse_day("2016-06-08"));
  EXPECT_EQ(lc.window.size(), 6u);
  EXPECT_EQ(lc.report.malformed, 3u);
  EXPECT_EQ(lc.window.num_days(), 6u);
}

TEST(Corpus, SkipsMalformedLinesWithDiagnostics) {
  const std::string text = line("1", "u", "2016-06-01T10:00:00Z") + "\n{not json\n\n" +
                           line("2", "u", "2016-06-01T11:00:00Z") + "\n" +
                           R"({"tweet_id":"3","user_id":"u","timestamp":"yesterday"})" + "\n" +
                           line("4", "u", "2016-06-01T12:00:00Z") + "\n";
  const auto lc = load(text);
  EXPECT_EQ(lc.window.size(), 3u);
  EXPECT_EQ(lc.report.malformed, 2u);
  EXPECT_EQ(lc.report.lines, 5u);
  ASSERT_EQ(lc.report.diagnostics.size(), 2u);
  EXPECT_EQ(lc.report.diagnostics[0].rfind("line 2:", 0), 0u);
}

TEST(Corpus, FailsWhenMostLinesAreMalformed) {
  EXPECT_THROW(load("x\ny\n" + line("1", "u", "2016-06-01T10:00:00Z") + "\n"), CorpusError);
  EXPECT_THROW(load_corpus(std::string("/nonexistent/corpus.jsonl")), CorpusError);
}

TEST(Corpus, SerializeIsStableAcrossReload) {
  const std::string text = line("1", "u", "2016-06-01T10:00:00Z") + "\n" + line("2", "v", "2016-06-02T00:00:00Z") + "\n";
  const auto a = serialize_corpus(load(text).window);
  const auto b = serialize_corpus(load(a).window);
  EXPECT_EQ(a, b);
}

TEST(Corpus, SliceAndFilter) {
  std::string text;
  for (int i = 1; i <= 5; ++i) text += line(std::to_string(i), "u" + std::to_string(i % 2), "2016-06-0" + std::to_string(i) + "T00:00:00Z") + "\n";
  const auto w = load(text).window;
  const auto s = w.slice(parse_day("2016-06-02"), parse_day("2016-06-10"));
  EXPECT_EQ(s.start_day(), parse_day("2016-06-02"));
  EXPECT_EQ(s.end_day(), parse_day("2016-06-05"));
  EXPECT_EQ(s.size(), 4u);
  const auto f = w.filtered([](const TweetRecord& r) { return r.user_id == "u1"; });
  EXPECT_EQ(f.size(), 3u);
  EXPECT_EQ(f.num_days(), w.num_days());
  TweetRecord outside;
  outside.tweet_id = "x";
  outside.timestamp = parse_timestamp("2017-01-01T00:00:00Z");
  CorpusWindow copy = w;
  EXPECT_THROW(copy.add(outside), CorpusError);
}

TEST(Filters, OfficialClients) {
  std::string text = line("1", "u", "2016-06-01T10:00:00Z") + "\n";
  auto l2 = line("2", "u", "2016-06-01T10:00:00Z");
  l2.replace(l2.find("Twitter for iPhone"), 18, "IFTTT");
  text += l2 + "\n";
  const auto r = filter_official_clients(load(text).window, FilterSpec::defaults());
  EXPECT_EQ(r.window.size(), 1u);
  EXPECT_DOUBLE_EQ(r.retention, 0.5);
  FilterSpec empty;
  EXPECT_THROW(filter_official_clients(load(text).window, empty), CorpusError);
}

TEST(Filters, StrictKeywordRules) {
  const auto spec = FilterSpec::defaults();
  EXPECT_TRUE(matches_strict_keywords("Go @realDonaldTrump", spec));
  EXPECT_TRUE(matches_strict_keywords("Donald and his pal Trump", spec));
  EXPECT_FALSE(matches_strict_keywords("trump card", spec));
  EXPECT_TRUE(matches_strict_keywords("HILLARY CLINTON rally", spec));
  EXPECT_FALSE(matches_strict_keywords("hillary only", spec));
  FilterSpec empty;
  EXPECT_THROW(filter_strict_keywords(CorpusWindow(Day{0}, Day{0}), empty), CorpusError);
  EXPECT_DOUBLE_EQ(filter_strict_keywords(CorpusWindow(Day{0}, Day{0}), spec).retention, 1.0);
}
