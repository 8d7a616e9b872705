#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "optrend/classifier.hpp"
#include "optrend/corpus.hpp"
#include "optrend/features.hpp"
#include "optrend/series.hpp"
#include "optrend/tokenizer.hpp"

namespace optrend {

struct KeywordSets {
  std::set<std::string> a, b;

  // Candidate A is the pro-Clinton side throughout the defaults.
  static KeywordSets defaults() {
    return {{"hillary", "clinton", "hillaryclinton"}, {"donald", "trump", "donaldtrump", "realdonaldtrump"}};
  }
};

struct HashtagCategories {
  std::set<std::string> pro_a, anti_b, pro_b, anti_a;

  static HashtagCategories defaults() { return {{"imwithher"}, {"nevertrump"}, {"maga"}, {"neverhillary"}}; }
};

// Words, hashtags and @-names are compared to keywords after lowercasing, plus the
// explicit mention list of the record.
inline bool mentions_any(const TweetRecord& r, const TokenStream& toks, const std::set<std::string>& keywords) {
  for (const auto& t : toks)
    if ((t.kind == TokenKind::word || t.kind == TokenKind::hashtag || t.kind == TokenKind::username) &&
        keywords.count(t.text))
      return true;
  for (const auto& m : r.mentions)
    if (keywords.count(ascii_lower(m))) return true;
  return false;
}

namespace detail {

inline std::optional<double> share(double num, double den) {
  if (den <= 0) return std::nullopt;
  return num / den;
}

// `classify` marks the author of a tweet into count slots; slots hold distinct users per day.
template <std::size_t N, typename F>
DailySeries per_day_user_metric(const CorpusWindow& c, F&& classify,
                                std::optional<double> (*combine)(const std::array<std::size_t, N>&)) {
  DailySeries out{c.start_day(), {}};
  if (c.empty_window()) return out;
  for (Day d = c.start_day(); d <= c.end_day(); ++d) {
    std::array<std::set<std::string>, N> users;
    for (const auto& r : c.on(d)) {
      const auto toks = tokenize(r.text);
      classify(r, toks, [&](std::size_t slot) { users[slot].insert(r.user_id); });
    }
    std::array<std::size_t, N> n{};
    for (std::size_t k = 0; k < N; ++k) n[k] = users[k].size();
    out.values.push_back(combine(n));
  }
  return out;
}

}  // namespace detail

// M_A(i) = N_A / (N_A + N_B) over distinct users mentioning each candidate that day.
inline DailySeries metric_mentions(const CorpusWindow& c, const KeywordSets& kw = KeywordSets::defaults()) {
  return detail::per_day_user_metric<2>(
      c,
      [&](const TweetRecord& r, const TokenStream& toks, auto mark) {
        if (mentions_any(r, toks, kw.a)) mark(0);
        if (mentions_any(r, toks, kw.b)) mark(1);
      },
      +[](const std::array<std::size_t, 2>& n) {
        return detail::share(static_cast<double>(n[0]), static_cast<double>(n[0] + n[1]));
      });
}

// M_A(i) = (N_A,pos + N_B,neg) / (N_A,pos + N_A,neg + N_B,pos + N_B,neg). The sentiment
// model's class 0 is positive and class 1 negative.
inline DailySeries metric_mentions_emotion(const CorpusWindow& c, const ModelParams& sentiment,
                                           const KeywordSets& kw = KeywordSets::defaults()) {
  if (sentiment.classes.size() != 2) throw std::invalid_argument("sentiment model must be binary");
  return detail::per_day_user_metric<4>(
      c,
      [&](const TweetRecord& r, const TokenStream& toks, auto mark) {
        const bool a = mentions_any(r, toks, kw.a), b = mentions_any(r, toks, kw.b);
        if (!a && !b) return;
        const bool negative = predict_tweet(sentiment, toks).cls == 1;
        if (a) mark(negative ? 1 : 0);
        if (b) mark(negative ? 3 : 2);
      },
      +[](const std::array<std::size_t, 4>& n) {
        return detail::share(static_cast<double>(n[0] + n[3]), static_cast<double>(n[0] + n[1] + n[2] + n[3]));
      });
}

// M_A(i) = (N_pro-A + N_anti-B) / (sum of the four category user counts).
inline DailySeries metric_hashtag_counts(const CorpusWindow& c,
                                         const HashtagCategories& cat = HashtagCategories::defaults()) {
  return detail::per_day_user_metric<4>(
      c,
      [&](const TweetRecord& r, const TokenStream& toks, auto mark) {
        std::set<std::string> tags(r.hashtags.begin(), r.hashtags.end());
        for (const auto& t : toks)
          if (t.kind == TokenKind::hashtag) tags.insert(t.text);
        for (const auto& t : tags) {
          if (cat.pro_a.count(t)) mark(0);
          if (cat.anti_b.count(t)) mark(1);
          if (cat.pro_b.count(t)) mark(2);
          if (cat.anti_a.count(t)) mark(3);
        }
      },
      +[](const std::array<std::size_t, 4>& n) {
        return detail::share(static_cast<double>(n[0] + n[1]), static_cast<double>(n[0] + n[1] + n[2] + n[3]));
      });
}

// Emoticon and emoji distant supervision: tweets with only positive (class 0) or only
// negative (class 1) emoticons; emoticons are removed from the features.
inline TrainingSet build_sentiment_training_set(const CorpusWindow& c, std::uint64_t seed,
                                                const FilterSpec* official = nullptr) {
  auto label_of = [](const TweetRecord&, const TokenStream& toks)
      -> std::optional<std::pair<int, std::vector<std::string>>> {
    bool pos = false, neg = false;
    std::vector<std::string> markers;
    for (const auto& t : toks) {
      const auto p = emoticon_polarity(t);
      if (p == Polarity::none) continue;
      (p == Polarity::positive ? pos : neg) = true;
      markers.push_back(t.text);
    }
    if (pos == neg) return std::nullopt;
    return std::make_pair(pos ? 0 : 1, markers);
  };
  auto strip = [](const Token& t) { return t.kind == TokenKind::emoticon; };
  return build_distant_set(c, {"positive", "negative"}, label_of, strip, seed, official);
}

}  // namespace optrend
