#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "optrend/cooccurrence.hpp"
#include "optrend/corpus.hpp"
#include "optrend/csv.hpp"
#include "optrend/poll_align.hpp"
#include "optrend/propagation.hpp"
#include "optrend/series.hpp"
#include "optrend/tokenizer.hpp"

namespace optrend::synth {

// How many users of each camp are active on a day.
enum class CountModel {
  binomial,  // total ~ Poisson(users_per_day), camp 0 ~ Binomial(total, ratio_path[i])
  factor,    // n_k = base_k * (1 + s_k z_i + e_k e_k,i) with a shared persistent factor z
};

struct Config {
  std::uint64_t seed = 1;
  std::string start = "2016-06-01";
  int days = 60;
  std::vector<std::string> camps = {"clinton", "trump"};

  CountModel count_model = CountModel::binomial;
  double users_per_day = 400;
  std::vector<double> ratio_path;  // camp-0 share per day; constant 0.5 when empty
  std::vector<double> base_users = {300, 250};
  std::vector<double> common_sensitivity = {0.3, 0.15};
  std::vector<double> idiosyncratic_sd = {0.0, 0.08};
  double factor_persistence = 0.8;

  std::vector<double> tweets_per_day = {1.0, 1.0};  // mean tweets per active user-day
  double pool_multiplier = 3.0;
  double pareto_alpha = 1.5;
  double tie_rate = 0.0;  // share of user-days with exactly one tweet per side (two camps)

  // Text content.
  int words_min = 6, words_max = 12;
  double signal = 0.6;             // probability that a word comes from the author's camp vocabulary
  double neutral_fraction = 0.0;   // tweets with camp hashtags but no camp vocabulary
  int camp_vocab = 300, neutral_vocab = 1500;
  double hashtag_prob = 0.3;       // tweet carries generic camp hashtags
  int camp_tags = 30;
  double seed_tag_prob = 0.08;     // tweet carries one of its camp's seed hashtags
  double neutral_tag_prob = 0.05;  // among tweets that already carry camp hashtags
  int neutral_tags = 8;

  // Attention and sentiment, drawn independently of support when divergent.
  double mention_prob = 0.3;
  double handle_mention_prob = 0.3;  // share of candidate mentions written as @handle
  double sentiment_prob = 0.4;
  double emoticon_prob = 0.5;
  bool divergent_attention = true;

  // Interactions; index by camp.
  std::vector<double> interaction_prob = {0.1, 0.3};
  double homophily = 0.85;
  double official_client_prob = 0.92;
};

struct Truth {
  std::vector<std::string> camps;
  Day start{};
  std::map<std::string, int> user_camp;
  std::map<std::string, int> hashtag_class;  // planted camp tags and seeds; neutral tags absent
  std::vector<std::vector<int>> active;      // [day][camp] active users
  std::vector<int> tie_user_days;            // [day]
  std::vector<double> attention_a;           // [day] probability a candidate mention targets A
  std::vector<double> positive_share;        // [day] probability a sentiment-bearing tweet is positive
  std::vector<std::vector<double>> seed_use; // [day][camp] multiplier on seed hashtag use
  std::map<std::string, int> tweet_voice;    // tweet id -> camp voiced in the text (-1 plain)
  std::map<std::string, int> tweet_sentiment;  // tweet id -> +1 / -1 (absent: none)

  // Realized camp-0 share among active users.
  DailySeries true_ratio() const {
    DailySeries s{start, {}};
    for (const auto& a : active) {
      const int tot = std::accumulate(a.begin(), a.end(), 0);
      s.values.push_back(tot ? std::optional<double>(static_cast<double>(a[0]) / tot) : std::nullopt);
    }
    return s;
  }

  double realized_tie_rate() const {
    double ties = 0, tot = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      ties += tie_user_days[i];
      tot += std::accumulate(active[i].begin(), active[i].end(), 0);
    }
    return tot > 0 ? ties / tot : 0.0;
  }

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["camps"] = camps;
    j["start"] = format_day(start);
    j["users"] = user_camp;
    j["hashtags"] = hashtag_class;
    auto days = nlohmann::ordered_json::array();
    const auto ratio = true_ratio();
    for (std::size_t i = 0; i < active.size(); ++i) {
      const auto& r = ratio.values[i];
      days.push_back({{"day", format_day(start + static_cast<std::int32_t>(i))},
                      {"active", active[i]},
                      {"ties", tie_user_days[i]},
                      {"true_ratio", r ? nlohmann::ordered_json(*r) : nlohmann::ordered_json(nullptr)},
                      {"attention_a", attention_a[i]},
                      {"positive_share", positive_share[i]}});
    }
    j["days"] = std::move(days);
    return j.dump(2);
  }
};

struct World {
  CorpusWindow corpus;
  Truth truth;
  SeedAssignment seeds;
};

// ---------------------------------------------------------------------------
// Naming

namespace detail {

inline constexpr const char* kSyllables[] = {"ka", "lo", "mi", "nu", "pe", "ro", "sa", "to",
                                             "vu", "we", "xi", "yo", "za", "be", "du", "fo"};

// Distinct pronounceable token: a vocabulary prefix followed by syllables of the index.
inline std::string word(const std::string& prefix, int index) {
  std::string w = prefix;
  int v = index;
  int digits = 0;
  do {
    w += kSyllables[v % 16];
    v /= 16;
    ++digits;
  } while (v > 0 || digits < 2);
  return w;
}

inline std::string camp_prefix(std::size_t k) { return std::string(1, static_cast<char>('a' + k)); }

inline std::string user_name(int camp, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u%d%05d", camp, index);
  return buf;
}

// Zipf(1) sampler over [0, n).
class Zipf {
 public:
  explicit Zipf(int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = 1.0 / (i + 1);
    dist_ = std::discrete_distribution<int>(w.begin(), w.end());
  }
  template <typename Rng>
  int operator()(Rng& rng) {
    return dist_(rng);
  }

 private:
  std::discrete_distribution<int> dist_;
};

// Standardizes to zero mean and unit sample variance.
inline void standardize(std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double& x : v) {
    x -= m;
    ss += x * x;
  }
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  if (sd > 0)
    for (double& x : v) x /= sd;
}

// Bounded AR(1) path in [lo, hi] around `center`.
template <typename Rng>
std::vector<double> wander(Rng& rng, int n, double center, double spread, double persistence, double lo, double hi) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> out;
  double x = 0;
  const double innov = std::sqrt(1 - persistence * persistence);
  for (int i = 0; i < n; ++i) {
    x = persistence * x + innov * nd(rng);
    out.push_back(std::clamp(center + spread * x, lo, hi));
  }
  return out;
}

struct UserPool {
  std::vector<std::string> names;
  std::vector<double> weight;  // Pareto activity propensity
};

// Weighted sampling of n distinct users without replacement (exponential keys).
template <typename Rng>
std::vector<std::size_t> weighted_sample(Rng& rng, const UserPool& pool, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(pool.names.size());
  for (std::size_t i = 0; i < pool.names.size(); ++i) {
    const double r = std::max(u(rng), 1e-300);
    keys.emplace_back(std::log(r) / pool.weight[i], i);
  }
  n = std::min(n, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(keys[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string utf8(char32_t cp) {
  std::string s;
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xF0 | (cp >> 18));
    s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return s;
}

inline std::vector<std::string> emoticons(Polarity p) {
  std::vector<std::string> out;
  for (const auto& e : kAsciiEmoticons)
    if (e.polarity == p) out.emplace_back(e.text);
  const char32_t emoji[] = {0x1F600, 0x1F60A, 0x1F44D, 0x1F389, 0x1F620, 0x1F622, 0x1F44E, 0x1F612};
  for (char32_t cp : emoji)
    if (emoji_polarity(cp) == p) out.push_back(utf8(cp));
  return out;
}

}  // namespace detail

// Seed hashtags of a two-camp world: camp 0 first.
inline std::vector<std::vector<std::string>> default_seed_tags(std::size_t camps) {
  if (camps == 2) return {{"imwithher", "nevertrump"}, {"maga", "neverhillary"}};
  std::vector<std::vector<std::string>> out;
  for (std::size_t k = 0; k < camps; ++k)
    out.push_back({"s" + detail::word(detail::camp_prefix(k), 0), "s" + detail::word(detail::camp_prefix(k), 1)});
  return out;
}

inline const std::vector<std::string>& unofficial_clients() {
  static const std::vector<std::string> v = {"IFTTT", "twittbot.net", "dlvr.it", "Buffer"};
  return v;
}

// ---------------------------------------------------------------------------
// Generator

inline std::vector<std::vector<int>> daily_counts(const Config& cfg, std::mt19937_64& rng) {
  const std::size_t k = cfg.camps.size();
  std::vector<std::vector<int>> counts(static_cast<std::size_t>(cfg.days), std::vector<int>(k, 0));
  if (cfg.count_model == CountModel::binomial) {
    if (k != 2) throw std::invalid_argument("binomial count model needs two camps");
    std::poisson_distribution<int> total(cfg.users_per_day);
    for (int i = 0; i < cfg.days; ++i) {
      const double p = cfg.ratio_path.empty() ? 0.5 : cfg.ratio_path.at(static_cast<std::size_t>(i));
      const int n = total(rng);
      std::binomial_distribution<int> a(n, p);
      const int na = a(rng);
      counts[static_cast<std::size_t>(i)] = {na, n - na};
    }
    return counts;
  }
  // Factor model. Shocks are standardized and the idiosyncratic parts made orthogonal to
  // the shared factor so the planted dispersion holds exactly before rounding.
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> z = detail::wander(rng, cfg.days, 0.0, 1.0, cfg.factor_persistence, -1e9, 1e9);
  detail::standardize(z);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> e(static_cast<std::size_t>(cfg.days));
    for (auto& x : e) x = nd(rng);
    double proj = 0, zz = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      proj += e[i] * z[i];
      zz += z[i] * z[i];
    }
    for (std::size_t i = 0; i < e.size(); ++i) e[i] -= proj / zz * z[i];
    detail::standardize(e);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double v = cfg.base_users.at(c) * (1 + cfg.common_sensitivity.at(c) * z[i] + cfg.idiosyncratic_sd.at(c) * e[i]);
      counts[i][c] = std::max(1, static_cast<int>(std::lround(v)));
    }
  }
  return counts;
}

inline World generate(const Config& cfg) {
  const std::size_t K = cfg.camps.size();
  if (K < 2) throw std::invalid_argument("need at least two camps");
  if (cfg.days < 1) throw std::invalid_argument("need at least one day");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  World w;
  auto& truth = w.truth;
  truth.camps = cfg.camps;
  truth.start = parse_day(cfg.start);
  w.corpus = CorpusWindow(truth.start, truth.start + (cfg.days - 1));
  truth.active = daily_counts(cfg, rng);
  truth.tie_user_days.assign(static_cast<std::size_t>(cfg.days), 0);

  // Exogenous trajectories.
  if (cfg.divergent_attention) {
    truth.attention_a = detail::wander(rng, cfg.days, 0.5, 0.18, 0.85, 0.1, 0.9);
    truth.positive_share = detail::wander(rng, cfg.days, 0.5, 0.18, 0.85, 0.1, 0.9);
    const auto ua = detail::wander(rng, cfg.days, 1.0, 0.6, 0.85, 0.15, 2.2);
    const auto ub = detail::wander(rng, cfg.days, 1.0, 0.6, 0.85, 0.15, 2.2);
    for (int i = 0; i < cfg.days; ++i) {
      std::vector<double> row(K, 1.0);
      row[0] = ua[static_cast<std::size_t>(i)];
      row[1] = ub[static_cast<std::size_t>(i)];
      truth.seed_use.push_back(row);
    }
  } else {
    truth.attention_a.assign(static_cast<std::size_t>(cfg.days), 0.5);
    truth.positive_share.assign(static_cast<std::size_t>(cfg.days), 0.5);
    truth.seed_use.assign(static_cast<std::size_t>(cfg.days), std::vector<double>(K, 1.0));
  }

  // Vocabularies.
  std::vector<std::vector<std::string>> camp_words(K), camp_tags(K);
  for (std::size_t k = 0; k < K; ++k)
    for (int i = 0; i < cfg.camp_vocab; ++i) camp_words[k].push_back(detail::word(detail::camp_prefix(k), i));
  std::vector<std::string> neutral_words, pos_words, neg_words, neutral_tags;
  for (int i = 0; i < cfg.neutral_vocab; ++i) neutral_words.push_back(detail::word("n", i));
  for (int i = 0; i < 40; ++i) {
    pos_words.push_back(detail::word("p", i));
    neg_words.push_back(detail::word("q", i));
  }
  const auto seed_tags = default_seed_tags(K);
  for (std::size_t k = 0; k < K; ++k) {
    for (int i = 0; i < cfg.camp_tags; ++i) camp_tags[k].push_back("t" + detail::word(detail::camp_prefix(k), i));
    for (const auto& t : camp_tags[k]) truth.hashtag_class[t] = static_cast<int>(k);
    for (const auto& t : seed_tags[k]) truth.hashtag_class[t] = static_cast<int>(k);
  }
  for (int i = 0; i < cfg.neutral_tags; ++i) neutral_tags.push_back("t" + detail::word("n", i));
  w.seeds.classes = cfg.camps;
  w.seeds.seeds = seed_tags;

  detail::Zipf word_zipf(cfg.camp_vocab), neutral_zipf(cfg.neutral_vocab), tag_zipf(cfg.camp_tags),
      ntag_zipf(cfg.neutral_tags), sent_zipf(40);
  const std::vector<std::vector<std::string>> candidate_words = {{"hillary", "clinton"}, {"trump", "donald"}};
  const std::vector<std::string> candidate_handles = {"hillaryclinton", "realdonaldtrump"};
  const auto pos_emo = detail::emoticons(Polarity::positive), neg_emo = detail::emoticons(Polarity::negative);
  const auto official = FilterSpec::defaults().official_clients;
  const std::vector<std::string> official_list(official.begin(), official.end());

  // User pools with Pareto propensities.
  std::vector<detail::UserPool> pools(K);
  for (std::size_t k = 0; k < K; ++k) {
    int peak = 1;
    for (const auto& day : truth.active) peak = std::max(peak, day[k]);
    const int m = std::max(peak + 1, static_cast<int>(std::ceil(cfg.pool_multiplier * peak)));
    for (int i = 0; i < m; ++i) {
      pools[k].names.push_back(detail::user_name(static_cast<int>(k), i));
      pools[k].weight.push_back(std::pow(1.0 - U(rng), -1.0 / cfg.pareto_alpha));
    }
  }

  struct Draft {
    TweetRecord rec;
    int voice = 0;
    bool plain = false;
    int sentiment = 0;
  };

  for (int i = 0; i < cfg.days; ++i) {
    const Day day = truth.start + i;
    const auto di = static_cast<std::size_t>(i);
    std::vector<std::vector<std::string>> active(K);
    for (std::size_t k = 0; k < K; ++k)
      for (auto idx : detail::weighted_sample(rng, pools[k], static_cast<std::size_t>(truth.active[di][k]))) {
        active[k].push_back(pools[k].names[idx]);
        truth.user_camp[pools[k].names[idx]] = static_cast<int>(k);
      }

    std::vector<Draft> drafts;
    // `plain` tweets keep the voice's hashtags but draw every word from the shared vocabulary.
    auto compose = [&](const std::string& user, std::size_t camp, int voice, bool plain) {
      Draft d;
      d.voice = voice;
      d.plain = plain;
      auto& r = d.rec;
      r.user_id = user;
      r.timestamp = static_cast<std::int64_t>(day.serial) * 86400 + static_cast<std::int64_t>(U(rng) * 86400);
      std::vector<std::string> words;
      const int len = cfg.words_min + static_cast<int>(U(rng) * (cfg.words_max - cfg.words_min + 1));
      for (int j = 0; j < len; ++j) {
        if (!plain && U(rng) < cfg.signal)
          words.push_back(camp_words[static_cast<std::size_t>(voice)][static_cast<std::size_t>(word_zipf(rng))]);
        else
          words.push_back(neutral_words[static_cast<std::size_t>(neutral_zipf(rng))]);
      }
      if (U(rng) < cfg.mention_prob) {
        const std::size_t cand = U(rng) < truth.attention_a[di] ? 0 : 1;
        if (U(rng) < cfg.handle_mention_prob) {
          r.mentions.push_back(candidate_handles[cand]);
          words.insert(words.begin(), "@" + candidate_handles[cand]);
        } else {
          const auto& cw = candidate_words[cand];
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(U(rng) * static_cast<double>(words.size())),
                       cw[static_cast<std::size_t>(U(rng) * static_cast<double>(cw.size()))]);
        }
      }
      if (U(rng) < cfg.sentiment_prob) {
        const bool pos = U(rng) < truth.positive_share[di];
        d.sentiment = pos ? 1 : -1;
        const auto& sw = pos ? pos_words : neg_words;
        const int n = 1 + (U(rng) < 0.5);
        for (int j = 0; j < n; ++j) words.push_back(sw[static_cast<std::size_t>(sent_zipf(rng))]);
        if (U(rng) < cfg.emoticon_prob) {
          const auto& em = pos ? pos_emo : neg_emo;
          words.push_back(em[static_cast<std::size_t>(U(rng) * static_cast<double>(em.size()))]);
        }
      }
      std::vector<std::string> tags;
      {
        const auto v = static_cast<std::size_t>(voice);
        if (U(rng) < cfg.hashtag_prob) {
          const int n = 1 + static_cast<int>(U(rng) * 3);
          for (int j = 0; j < n; ++j) tags.push_back(camp_tags[v][static_cast<std::size_t>(tag_zipf(rng))]);
        }
        if (U(rng) < cfg.seed_tag_prob * truth.seed_use[di][v]) {
          // Slogans are rarely posted alone.
          if (tags.empty() && U(rng) < 0.8) tags.push_back(camp_tags[v][static_cast<std::size_t>(tag_zipf(rng))]);
          tags.push_back(seed_tags[v][static_cast<std::size_t>(U(rng) * static_cast<double>(seed_tags[v].size()))]);
        }
      }
      // Event tags ride along with partisan ones, which links the camps in the co-occurrence graph.
      if (!tags.empty() && U(rng) < cfg.neutral_tag_prob)
        tags.push_back(neutral_tags[static_cast<std::size_t>(ntag_zipf(rng))]);
      std::sort(tags.begin(), tags.end());
      tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
      std::shuffle(tags.begin(), tags.end(), rng);
      for (const auto& t : tags) words.push_back("#" + t);
      r.hashtags = tags;
      std::sort(r.hashtags.begin(), r.hashtags.end());

      // Interactions point at today's active users; targets share the author's camp with
      // probability `homophily`.
      if (U(rng) < cfg.interaction_prob.at(camp)) {
        std::size_t tc = camp;
        if (U(rng) >= cfg.homophily) tc = (camp + 1 + static_cast<std::size_t>(U(rng) * static_cast<double>(K - 1))) % K;
        if (!active[tc].empty()) {
          const auto& target = active[tc][static_cast<std::size_t>(U(rng) * static_cast<double>(active[tc].size()))];
          if (target != user) {
            const double kind = U(rng);
            if (kind < 0.5) {
              r.is_retweet = true;
              r.retweet_of = target;
              words.insert(words.begin(), "RT @" + target + ":");
            } else if (kind < 0.7) {
              r.reply_to = target;
            } else if (kind < 0.9) {
              r.mentions.push_back(target);
              words.insert(words.begin(), "@" + target);
            } else {
              r.quote_of = target;
            }
          }
        }
      }
      std::string text;
      for (const auto& x : words) {
        if (!text.empty()) text += ' ';
        text += x;
      }
      r.text = std::move(text);
      r.source_client = U(rng) < cfg.official_client_prob
                            ? official_list[static_cast<std::size_t>(U(rng) * static_cast<double>(official_list.size()))]
                            : unofficial_clients()[static_cast<std::size_t>(U(rng) * unofficial_clients().size())];
      drafts.push_back(std::move(d));
    };

    for (std::size_t k = 0; k < K; ++k) {
      std::poisson_distribution<int> extra(std::max(0.0, cfg.tweets_per_day.at(k) - 1.0));
      for (const auto& user : active[k]) {
        if (K == 2 && cfg.tie_rate > 0 && U(rng) < cfg.tie_rate) {
          ++truth.tie_user_days[di];
          compose(user, k, static_cast<int>(k), false);
          compose(user, k, static_cast<int>(1 - k), false);
          continue;
        }
        const int n = 1 + (cfg.tweets_per_day.at(k) > 1.0 ? extra(rng) : 0);
        for (int t = 0; t < n; ++t) compose(user, k, static_cast<int>(k), U(rng) < cfg.neutral_fraction);
      }
    }
    std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
      return std::tie(a.rec.timestamp, a.rec.user_id) < std::tie(b.rec.timestamp, b.rec.user_id);
    });
    for (auto& d : drafts) {
      d.rec.tweet_id = std::to_string(1000000000LL + static_cast<long long>(w.corpus.size()));
      truth.tweet_voice[d.rec.tweet_id] = d.plain ? -1 : d.voice;
      if (d.sentiment) truth.tweet_sentiment[d.rec.tweet_id] = d.sentiment;
      w.corpus.add(std::move(d.rec));
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Polls

struct PollOptions {
  double A = 0.185, b = 0.415;
  int T_d = 14;  // total lead of the twitter series
  int w = 9;     // width of the centered smoothing applied to the support ratio
  double noise_sd = 0.002;
  double other_share = 0.08;
  std::uint64_t seed = 7;
};

// y(i) = A * centered-mean_w(ratio)(i - T_d) + b + noise, on days whose source window lies
// inside the ratio series.
inline PollSeries make_polls(const DailySeries& ratio, const PollOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> noise(0.0, o.noise_sd);
  const DailySeries smooth = centered_moving_average(ratio, o.w);
  const int h = (o.w - 1) / 2;
  PollSeries p;
  p.share_a.start = ratio.start + (o.T_d + h);
  for (Day d = p.share_a.start; d <= ratio.end(); ++d) {
    const auto x = smooth.at(d - o.T_d);
    const double e = o.noise_sd > 0 ? noise(rng) : 0.0;
    p.share_a.values.push_back(x ? std::optional<double>(o.A * *x + o.b + e) : std::nullopt);
  }
  return p;
}

inline std::string polls_csv(const PollSeries& p, double other_share = 0.08) {
  csv::Writer w({"day", "share_A", "share_B", "share_other"});
  for (std::size_t i = 0; i < p.share_a.size(); ++i) {
    const auto& v = p.share_a.values[i];
    if (!v) continue;
    w.row({format_day(p.share_a.start + static_cast<std::int32_t>(i)), csv::num(*v * (1 - other_share)),
           csv::num((1 - *v) * (1 - other_share)), csv::num(other_share)});
  }
  return w.str();
}

// ---------------------------------------------------------------------------
// Presets

// Two camps at the published activity rates (2.6 vs 3.9 tweets per user-day), daily camp
// counts with a 2.1 dispersion ratio, text tuned for a cross-validated F1 near 0.8, and
// attention signals that wander independently of support.
inline Config calibrated(std::uint64_t seed) {
  Config c;
  c.seed = seed;
  c.days = 90;
  c.count_model = CountModel::factor;
  // sd(n_A) / sd(n_B) = 150 * 0.3 / (126 * sqrt(0.15^2 + 0.08^2)) = 2.1
  c.base_users = {150, 126};
  c.common_sensitivity = {0.3, 0.15};
  c.idiosyncratic_sd = {0.0, 0.08};
  c.tweets_per_day = {2.6, 3.9};
  c.signal = 0.45;
  c.neutral_fraction = 0.35;
  c.hashtag_prob = 0.06;
  c.seed_tag_prob = 0.05;
  return c;
}

// Same dispersion and activity structure with a clean text signal.
inline Config behavior(std::uint64_t seed) {
  Config c = calibrated(seed);
  c.days = 120;
  c.signal = 0.8;
  c.neutral_fraction = 0.0;
  c.hashtag_prob = 0.1;
  return c;
}

// Single-tweet users at a fixed 60/40 split with planted ties.
inline Config planted_60_40(std::uint64_t seed, double tie_rate = 0.05) {
  Config c;
  c.seed = seed;
  c.days = 60;
  c.users_per_day = 600;
  c.ratio_path.assign(static_cast<std::size_t>(c.days), 0.6);
  c.tweets_per_day = {1.0, 1.0};
  c.tie_rate = tie_rate;
  c.signal = 0.8;
  c.hashtag_prob = 0.15;
  c.neutral_tag_prob = 0.1;
  return c;
}

// Support oscillates with a randomized phase so the series turns at least once in the
// forecast period.
inline Config trend_reversal(std::uint64_t seed) {
  Config c;
  c.seed = seed;
  c.days = 150;
  c.users_per_day = 500;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> phase(0.0, 2 * M_PI);
  const double ph = phase(rng);
  for (int i = 0; i < c.days; ++i) c.ratio_path.push_back(0.55 + 0.08 * std::sin(2 * M_PI * i / 70.0 + ph));
  c.tweets_per_day = {1.5, 1.5};
  c.signal = 0.8;
  c.hashtag_prob = 0.15;
  return c;
}

// About ten thousand tweets over 75 days; long enough for the poll fit. Used for
// end-to-end runs.
inline Config fixture(std::uint64_t seed = 11) {
  Config c = calibrated(seed);
  c.days = 75;
  c.base_users = {23, 20};
  c.hashtag_prob = 0.3;
  c.seed_tag_prob = 0.1;
  // A small corpus needs denser event tags to link the camps significantly.
  c.neutral_tag_prob = 0.15;
  c.neutral_tags = 4;
  return c;
}

inline Config preset(const std::string& name, std::uint64_t seed) {
  if (name == "calibrated") return calibrated(seed);
  if (name == "behavior") return behavior(seed);
  if (name == "planted-60-40") return planted_60_40(seed);
  if (name == "trend-reversal") return trend_reversal(seed);
  if (name == "fixture") return fixture(seed);
  throw std::invalid_argument("unknown preset " + name +
                              " (calibrated, behavior, planted-60-40, trend-reversal, fixture)");
}

// Simulated analyst who knows the planted classes: accepts a candidate iff the proposed
// class is the planted one.
class OracleCuration : public CurationSource {
 public:
  explicit OracleCuration(std::map<std::string, int> truth) : truth_(std::move(truth)) {}
  std::vector<Decision> decide(const PropagationState& st) override {
    std::vector<Decision> d;
    for (const auto& c : st.candidates) {
      auto it = truth_.find(c.hashtag);
      d.push_back({c.hashtag, it != truth_.end() && it->second == c.cls ? Verdict::accept : Verdict::reject});
    }
    return d;
  }

 private:
  std::map<std::string, int> truth_;
};

// ---------------------------------------------------------------------------
// Planted co-occurrence graphs

struct PlantedGraph {
  std::shared_ptr<SignificantGraph> graph;
  std::map<std::string, int> truth;
  SeedAssignment seeds;
};

// Block model: tags within a class link with probability p_in and strong weights, across
// classes with probability p_out and weaker weights. The two most frequent tags of each
// class are its seeds.
inline PlantedGraph planted_cooccurrence_graph(std::size_t classes, int tags_per_class, double p_in, double p_out,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::exponential_distribution<double> strong(1.0 / 8.0), weak(1.0 / 3.0);
  PlantedGraph pg;
  pg.graph = std::make_shared<SignificantGraph>();
  auto& g = *pg.graph;
  struct Tag {
    std::string name;
    int cls;
    std::int64_t count;
  };
  std::vector<Tag> tags;
  for (std::size_t k = 0; k < classes; ++k) {
    for (int i = 0; i < tags_per_class; ++i) {
      // Counts stay within [200, 1e5] so the default occurrence filter never removes a tag.
      const auto count = static_cast<std::int64_t>(std::min(1e5, 200 * std::pow(1.0 - U(rng), -1.0 / 1.2)));
      tags.push_back({"t" + detail::word(detail::camp_prefix(k), i), static_cast<int>(k), count});
    }
    pg.seeds.classes.push_back(std::string(1, static_cast<char>('A' + k)));
  }
  std::sort(tags.begin(), tags.end(), [](const Tag& a, const Tag& b) { return a.name < b.name; });
  for (const auto& t : tags) {
    g.vertices.push_back(t.name);
    g.counts.push_back(t.count);
    pg.truth[t.name] = t.cls;
  }
  const double log_p0 = std::log(g.p0);
  for (std::uint32_t a = 0; a < tags.size(); ++a)
    for (std::uint32_t b = a + 1; b < tags.size(); ++b) {
      const bool same = tags[a].cls == tags[b].cls;
      if (U(rng) >= (same ? p_in : p_out)) continue;
      const double s = 0.5 + (same ? strong(rng) : weak(rng));
      g.edges.push_back({a, b, 1 + static_cast<std::int64_t>(s), log_p0 - s, s});
    }
  g.total_tweets = 100000;
  g.raw_vertices = g.vertices.size();
  g.raw_edges = g.edges.size();
  g.rebuild_adjacency();
  for (std::size_t k = 0; k < classes; ++k) {
    std::vector<const Tag*> mine;
    for (const auto& t : tags)
      if (t.cls == static_cast<int>(k)) mine.push_back(&t);
    std::sort(mine.begin(), mine.end(), [](const Tag* a, const Tag* b) {
      return a->count != b->count ? a->count > b->count : a->name < b->name;
    });
    pg.seeds.seeds.push_back({mine[0]->name, mine[1]->name});
  }
  return pg;
}

}  // namespace optrend::synth
