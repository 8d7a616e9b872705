#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "optrend/classifier.hpp"
#include "optrend/corpus.hpp"
#include "optrend/csv.hpp"
#include "optrend/interaction_graph.hpp"
#include "optrend/series.hpp"
#include "optrend/stats.hpp"

namespace optrend {

constexpr int kUnclassified = -1;

// Per-tweet classes aligned with the corpus day layout.
struct TweetClasses {
  Day start{};
  std::vector<std::vector<int>> by_day;
  int num_classes = 2;

  int at(Day d, std::size_t i) const { return by_day[static_cast<std::size_t>(d - start)][i]; }
};

// Classifies every tweet. With a positive abstention margin, binary predictions whose
// probability lies within the margin of 0.5 stay unclassified (off by default).
inline TweetClasses classify_corpus(const CorpusWindow& c, const ModelParams& m, double abstain_margin = 0.0) {
  TweetClasses out;
  out.start = c.start_day();
  out.num_classes = static_cast<int>(m.classes.size());
  if (c.empty_window()) return out;
  for (Day d = c.start_day(); d <= c.end_day(); ++d) {
    std::vector<int> day;
    for (const auto& r : c.on(d)) {
      const auto p = predict_tweet(m, tokenize(r.text));
      const bool abstain = abstain_margin > 0 && m.heads.size() == 1 && std::abs(p.probability - 0.5) < abstain_margin;
      day.push_back(abstain ? kUnclassified : p.cls);
    }
    out.by_day.push_back(std::move(day));
  }
  return out;
}

struct UserDayOpinion {
  std::string user_id;
  Day day{};
  int cls = kUnclassified;
  std::vector<int> counts;  // classified tweets per class
  int tweets = 0;           // all tweets that day
};

// Strict majority over classified tweets; ties (and no classified tweets) are unclassified.
inline int majority_class(const std::vector<int>& counts) {
  int best = kUnclassified, top = 0;
  bool tie = false;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > top) {
      top = counts[k];
      best = static_cast<int>(k);
      tie = false;
    } else if (counts[k] == top && top > 0) {
      tie = true;
    }
  }
  return tie ? kUnclassified : best;
}

inline UserDayOpinion assign_daily_user_opinion(const std::string& user, Day day, const std::vector<int>& counts) {
  UserDayOpinion o;
  o.user_id = user;
  o.day = day;
  o.counts = counts;
  for (int c : counts) o.tweets += c;
  o.cls = majority_class(counts);
  return o;
}

// Every user-day with at least one classified tweet, sorted by user within a day.
inline std::vector<std::vector<UserDayOpinion>> daily_user_opinions(const CorpusWindow& c, const TweetClasses& tc) {
  std::vector<std::vector<UserDayOpinion>> out;
  if (c.empty_window()) return out;
  const auto k = static_cast<std::size_t>(tc.num_classes);
  for (Day d = c.start_day(); d <= c.end_day(); ++d) {
    std::map<std::string, std::pair<std::vector<int>, int>> per_user;
    const auto& recs = c.on(d);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      auto& [counts, tweets] = per_user[recs[i].user_id];
      counts.resize(k, 0);
      ++tweets;
      const int cls = tc.at(d, i);
      if (cls != kUnclassified) ++counts[static_cast<std::size_t>(cls)];
    }
    std::vector<UserDayOpinion> day;
    for (auto& [user, ct] : per_user) {
      int classified = 0;
      for (int x : ct.first) classified += x;
      if (classified == 0) continue;
      auto o = assign_daily_user_opinion(user, d, ct.first);
      o.tweets = ct.second;
      day.push_back(std::move(o));
    }
    out.push_back(std::move(day));
  }
  return out;
}

enum class Scope { whole, scgc, wcgc };

inline const char* to_string(Scope s) {
  switch (s) {
    case Scope::whole: return "whole";
    case Scope::scgc: return "scgc";
    case Scope::wcgc: return "wcgc";
  }
  return "?";
}

inline Scope scope_from_string(const std::string& s) {
  if (s == "whole") return Scope::whole;
  if (s == "scgc") return Scope::scgc;
  if (s == "wcgc") return Scope::wcgc;
  throw std::invalid_argument("unknown scope " + s);
}

struct OpinionDay {
  Day day{};
  std::vector<std::size_t> n;  // users per class
  std::size_t n_unclassified = 0;
  std::vector<std::optional<double>> ratio;  // over classified users; undefined if none
};

struct OpinionSeries {
  std::vector<std::string> classes;
  Scope scope = Scope::whole;
  std::vector<OpinionDay> days;

  DailySeries ratio_series(std::size_t cls) const {
    DailySeries s;
    if (days.empty()) return s;
    s.start = days.front().day;
    for (const auto& d : days) s.values.push_back(d.ratio[cls]);
    return s;
  }

  std::vector<double> counts(std::size_t cls) const {
    std::vector<double> v;
    for (const auto& d : days) v.push_back(static_cast<double>(d.n[cls]));
    return v;
  }

  // Binary layout: the first two classes are A and B.
  std::string to_csv() const {
    csv::Writer w({"day", "n_A", "n_B", "n_unclassified", "r_A", "r_B", "scope"});
    for (const auto& d : days)
      w.row({format_day(d.day), std::to_string(d.n.at(0)), std::to_string(d.n.at(1)), std::to_string(d.n_unclassified),
             csv::num(d.ratio.at(0)), csv::num(d.ratio.at(1)), to_string(scope)});
    return w.str();
  }
};

// Daily users per class restricted to a scope. Component scopes need one decomposition per
// corpus day (as produced by component_size_series).
inline OpinionSeries daily_ratio_series(const CorpusWindow& c, const TweetClasses& tc,
                                        const std::vector<std::string>& classes, Scope scope = Scope::whole,
                                        const std::vector<ComponentDecomposition>* decompositions = nullptr) {
  if (scope != Scope::whole && (!decompositions || decompositions->size() != c.num_days()))
    throw std::invalid_argument("component scope requires one decomposition per day");
  OpinionSeries s;
  s.classes = classes;
  s.scope = scope;
  const auto per_day = daily_user_opinions(c, tc);
  for (std::size_t i = 0; i < per_day.size(); ++i) {
    OpinionDay od;
    od.day = c.start_day() + static_cast<std::int32_t>(i);
    od.n.assign(classes.size(), 0);
    const std::vector<std::string>* members = nullptr;
    if (scope == Scope::scgc) members = &(*decompositions)[i].scgc;
    if (scope == Scope::wcgc) members = &(*decompositions)[i].wcgc;
    for (const auto& u : per_day[i]) {
      if (members && !std::binary_search(members->begin(), members->end(), u.user_id)) continue;
      if (u.cls == kUnclassified)
        ++od.n_unclassified;
      else
        ++od.n[static_cast<std::size_t>(u.cls)];
    }
    std::size_t total = 0;
    for (auto x : od.n) total += x;
    for (auto x : od.n)
      od.ratio.push_back(total ? std::optional<double>(static_cast<double>(x) / static_cast<double>(total))
                               : std::nullopt);
    s.days.push_back(std::move(od));
  }
  return s;
}

struct CumulativeOpinion {
  std::vector<double> shares;  // per class, over all users with a classified tweet
  double unclassified_share = 0;
  std::map<std::string, int> user_class;
  std::map<std::string, int> user_tweets;
};

// Each user counted once: majority over all of their classified tweets in the window.
inline CumulativeOpinion cumulative_opinion(const CorpusWindow& c, const TweetClasses& tc) {
  CumulativeOpinion out;
  std::map<std::string, std::vector<int>> counts;
  const auto k = static_cast<std::size_t>(tc.num_classes);
  if (!c.empty_window())
    for (Day d = c.start_day(); d <= c.end_day(); ++d) {
      const auto& recs = c.on(d);
      for (std::size_t i = 0; i < recs.size(); ++i) {
        auto& v = counts[recs[i].user_id];
        v.resize(k, 0);
        ++out.user_tweets[recs[i].user_id];
        const int cls = tc.at(d, i);
        if (cls != kUnclassified) ++v[static_cast<std::size_t>(cls)];
      }
    }
  out.shares.assign(k, 0.0);
  std::size_t users = 0;
  for (const auto& [u, v] : counts) {
    int classified = 0;
    for (int x : v) classified += x;
    if (!classified) continue;
    ++users;
    const int cls = majority_class(v);
    out.user_class[u] = cls;
    if (cls == kUnclassified)
      out.unclassified_share += 1;
    else
      out.shares[static_cast<std::size_t>(cls)] += 1;
  }
  if (users) {
    for (auto& s : out.shares) s /= static_cast<double>(users);
    out.unclassified_share /= static_cast<double>(users);
  }
  return out;
}

struct CcdfPoint {
  int tweets = 0;
  double fraction = 0;  // share of the camp's users with at least `tweets` tweets
};

struct ThresholdRow {
  int min_tweets = 0;
  std::vector<std::size_t> users;  // per class, cumulative classification
  std::vector<double> shares;
};

struct ActivityProfile {
  std::vector<std::string> classes;
  std::vector<std::vector<std::optional<double>>> daily_mean;  // [class][day] tweets per user
  std::vector<double> mean_daily_mean;                         // average over defined days
  std::vector<std::vector<CcdfPoint>> ccdf;                    // [class]
  std::vector<ThresholdRow> sweep;
};

inline ActivityProfile activity_stats(const CorpusWindow& c, const TweetClasses& tc,
                                      const std::vector<std::string>& classes,
                                      const std::vector<int>& thresholds = {1, 2, 5, 10, 20, 67, 100}) {
  ActivityProfile p;
  p.classes = classes;
  const std::size_t k = classes.size();
  p.daily_mean.assign(k, {});
  const auto per_day = daily_user_opinions(c, tc);
  for (const auto& day : per_day) {
    std::vector<double> tweets(k, 0.0), users(k, 0.0);
    for (const auto& u : day) {
      if (u.cls == kUnclassified) continue;
      tweets[static_cast<std::size_t>(u.cls)] += u.tweets;
      users[static_cast<std::size_t>(u.cls)] += 1;
    }
    for (std::size_t j = 0; j < k; ++j)
      p.daily_mean[j].push_back(users[j] > 0 ? std::optional<double>(tweets[j] / users[j]) : std::nullopt);
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> v;
    for (const auto& x : p.daily_mean[j])
      if (x) v.push_back(*x);
    p.mean_daily_mean.push_back(stats::mean(v));
  }

  const auto cum = cumulative_opinion(c, tc);
  std::vector<std::vector<int>> totals(k);
  for (const auto& [u, cls] : cum.user_class)
    if (cls != kUnclassified) totals[static_cast<std::size_t>(cls)].push_back(cum.user_tweets.at(u));
  for (std::size_t j = 0; j < k; ++j) {
    auto& t = totals[j];
    std::sort(t.begin(), t.end());
    std::vector<CcdfPoint> pts;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (i == 0 || t[i] != t[i - 1])
        pts.push_back({t[i], static_cast<double>(t.size() - i) / static_cast<double>(t.size())});
    p.ccdf.push_back(std::move(pts));
  }
  for (int thr : thresholds) {
    ThresholdRow row;
    row.min_tweets = thr;
    std::size_t total = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto n = static_cast<std::size_t>(
          std::count_if(totals[j].begin(), totals[j].end(), [&](int x) { return x >= thr; }));
      row.users.push_back(n);
      total += n;
    }
    for (auto n : row.users) row.shares.push_back(total ? static_cast<double>(n) / static_cast<double>(total) : 0.0);
    p.sweep.push_back(std::move(row));
  }
  return p;
}

struct BehaviorReport {
  std::optional<double> sigma_ratio;            // sd(n_A) / sd(n_B)
  std::vector<std::optional<double>> spearman;  // per class, n_k vs r_k
  std::vector<double> cumulative_shares;
  double cumulative_unclassified = 0;
  std::vector<double> mean_daily_shares;
  std::vector<ThresholdRow> sweep;

  nlohmann::ordered_json to_json(const std::vector<std::string>& classes) const {
    auto opt = [](const std::optional<double>& v) {
      return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json j;
    j["classes"] = classes;
    j["sigma_ratio"] = opt(sigma_ratio);
    auto rho = nlohmann::ordered_json::array();
    for (const auto& r : spearman) rho.push_back(opt(r));
    j["spearman"] = std::move(rho);
    j["cumulative_shares"] = cumulative_shares;
    j["cumulative_unclassified"] = cumulative_unclassified;
    j["mean_daily_shares"] = mean_daily_shares;
    auto sw = nlohmann::ordered_json::array();
    for (const auto& row : sweep) sw.push_back({{"min_tweets", row.min_tweets}, {"users", row.users}, {"shares", row.shares}});
    j["threshold_sweep"] = std::move(sw);
    return j;
  }
};

// Requires at least three days with classified users.
inline BehaviorReport behavior_correlations(const OpinionSeries& s) {
  std::vector<std::size_t> defined;
  for (std::size_t i = 0; i < s.days.size(); ++i)
    if (s.days[i].ratio.at(0)) defined.push_back(i);
  if (defined.size() < 3) throw std::invalid_argument("behavior correlations need at least 3 days");
  BehaviorReport b;
  const std::size_t k = s.classes.size();
  std::vector<std::vector<double>> n(k), r(k);
  for (auto i : defined)
    for (std::size_t j = 0; j < k; ++j) {
      n[j].push_back(static_cast<double>(s.days[i].n[j]));
      r[j].push_back(*s.days[i].ratio[j]);
    }
  if (k >= 2) {
    const double sa = stats::stddev(n[0]), sb = stats::stddev(n[1]);
    if (sb > 0) b.sigma_ratio = sa / sb;
  }
  for (std::size_t j = 0; j < k; ++j) {
    b.spearman.push_back(stats::spearman(n[j], r[j]));
    b.mean_daily_shares.push_back(stats::mean(r[j]));
  }
  return b;
}

}  // namespace optrend
