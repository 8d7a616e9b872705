#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "optrend/day.hpp"

namespace optrend {

struct CorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TweetRecord {
  std::string tweet_id;
  std::string user_id;
  std::int64_t timestamp = 0;  // Unix seconds, UTC
  std::string text;
  std::vector<std::string> hashtags;  // lowercase, no '#'
  std::vector<std::string> mentions;
  std::optional<std::string> retweet_of;
  std::optional<std::string> reply_to;
  std::optional<std::string> quote_of;
  std::string source_client;
  bool is_retweet = false;

  Day day() const { return day_of(timestamp); }

  bool operator==(const TweetRecord&) const = default;
};

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string normalize_hashtag(std::string_view tag) {
  while (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return ascii_lower(tag);
}

// Day-indexed store. Days without records are kept as empty slots.
class CorpusWindow {
 public:
  CorpusWindow() = default;
  CorpusWindow(Day start, Day end) : start_(start), end_(end) {
    if (end < start) throw CorpusError("corpus window end precedes start");
    days_.resize(static_cast<std::size_t>(end - start) + 1);
  }

  Day start_day() const { return start_; }
  Day end_day() const { return end_; }
  bool empty_window() const { return days_.empty(); }
  std::size_t num_days() const { return days_.size(); }
  bool contains(Day d) const { return !days_.empty() && d >= start_ && d <= end_; }

  void add(TweetRecord rec) {
    const Day d = rec.day();
    if (!contains(d)) throw CorpusError("record " + rec.tweet_id + " outside corpus window");
    days_[static_cast<std::size_t>(d - start_)].push_back(std::move(rec));
  }

  const std::vector<TweetRecord>& on(Day d) const {
    static const std::vector<TweetRecord> kEmpty;
    if (!contains(d)) return kEmpty;
    return days_[static_cast<std::size_t>(d - start_)];
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& d : days_) n += d.size();
    return n;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& day : days_)
      for (const auto& rec : day) f(rec);
  }

  // Keeps records satisfying the predicate; window bounds unchanged.
  template <typename Pred>
  CorpusWindow filtered(Pred&& keep) const {
    CorpusWindow out(start_, end_);
    for (std::size_t i = 0; i < days_.size(); ++i)
      for (const auto& rec : days_[i])
        if (keep(rec)) out.days_[i].push_back(rec);
    return out;
  }

  // Sub-window [from, to] clipped to this window.
  CorpusWindow slice(Day from, Day to) const {
    from = std::max(from, start_);
    to = std::min(to, end_);
    if (to < from) return CorpusWindow(from, from);
    CorpusWindow out(from, to);
    for (Day d = from; d <= to; ++d) out.days_[static_cast<std::size_t>(d - from)] = on(d);
    return out;
  }

  bool operator==(const CorpusWindow&) const = default;

 private:
  Day start_{};
  Day end_{};
  std::vector<std::vector<TweetRecord>> days_;
};

struct FilterSpec {
  std::set<std::string> official_clients;
  // Each rule is one keyword or a pair that must both appear.
  std::vector<std::vector<std::string>> strict_keywords;

  static FilterSpec defaults() {
    FilterSpec f;
    f.official_clients = {"Twitter for iPhone", "Twitter for Android", "Twitter Web Client",
                          "Twitter for iPad",   "TweetDeck",           "Twitter Lite",
                          "Twitter for Mac",    "Twitter for Windows", "Mobile Web (M5)",
                          "Twitter for BlackBerry", "Twitter Web App"};
    f.strict_keywords = {{"realdonaldtrump"}, {"hillaryclinton"}, {"donaldtrump"},
                         {"trump", "donald"}, {"hillary", "clinton"}};
    return f;
  }
};

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw std::invalid_argument(std::string(key) + " must be string or null");
  return it->get<std::string>();
}

inline nlohmann::json opt_json(const std::optional<std::string>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

// Canonical single-line form with a fixed field order.
inline std::string to_json_line(const TweetRecord& r) {
  nlohmann::ordered_json j;
  j["tweet_id"] = r.tweet_id;
  j["user_id"] = r.user_id;
  j["timestamp"] = format_timestamp(r.timestamp);
  j["text"] = r.text;
  j["hashtags"] = r.hashtags;
  j["mentions"] = r.mentions;
  j["retweet_of"] = detail::opt_json(r.retweet_of);
  j["reply_to"] = detail::opt_json(r.reply_to);
  j["quote_of"] = detail::opt_json(r.quote_of);
  j["source_client"] = r.source_client;
  j["is_retweet"] = r.is_retweet;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

// Throws std::invalid_argument (or a json exception) on a malformed line.
inline TweetRecord parse_json_line(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  TweetRecord r;
  r.tweet_id = j.at("tweet_id").get<std::string>();
  r.user_id = j.at("user_id").get<std::string>();
  if (r.tweet_id.empty() || r.user_id.empty()) throw std::invalid_argument("empty id");
  r.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
  r.text = j.value("text", std::string());
  if (auto it = j.find("hashtags"); it != j.end())
    for (const auto& h : *it) {
      auto tag = normalize_hashtag(h.get<std::string>());
      if (!tag.empty()) r.hashtags.push_back(std::move(tag));
    }
  if (auto it = j.find("mentions"); it != j.end())
    for (const auto& m : *it) r.mentions.push_back(m.get<std::string>());
  r.retweet_of = detail::opt_string(j, "retweet_of");
  r.reply_to = detail::opt_string(j, "reply_to");
  r.quote_of = detail::opt_string(j, "quote_of");
  r.source_client = j.value("source_client", std::string());
  r.is_retweet = j.value("is_retweet", false);
  if (r.is_retweet != r.retweet_of.has_value())
    throw std::invalid_argument("is_retweet inconsistent with retweet_of");
  return r;
}

struct LoadReport {
  std::size_t lines = 0;
  std::size_t loaded = 0;
  std::size_t malformed = 0;
  std::vector<std::string> diagnostics;  // first few problems, "line N: reason"
};

struct LoadedCorpus {
  CorpusWindow window;
  LoadReport report;
};

// Loads a line-delimited record stream. The window is the [min, max] day seen unless
// explicit bounds are given, in which case out-of-window records count as malformed.
inline LoadedCorpus load_corpus(std::istream& in, std::optional<Day> start = std::nullopt,
                                std::optional<Day> end = std::nullopt) {
  LoadReport rep;
  std::vector<TweetRecord> records;
  std::string line;
  auto note = [&](std::size_t n, const std::string& why) {
    ++rep.malformed;
    if (rep.diagnostics.size() < 20) rep.diagnostics.push_back("line " + std::to_string(n) + ": " + why);
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++rep.lines;
    try {
      TweetRecord r = parse_json_line(line);
      const Day d = r.day();
      if ((start && d < *start) || (end && d > *end)) {
        note(rep.lines, "timestamp outside window");
        continue;
      }
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      note(rep.lines, e.what());
    }
  }
  if (rep.lines > 0 && rep.malformed * 2 > rep.lines) {
    std::string msg = "more than half of the lines are malformed (" + std::to_string(rep.malformed) + "/" +
                      std::to_string(rep.lines) + ")";
    if (!rep.diagnostics.empty()) msg += "; first: " + rep.diagnostics.front();
    throw CorpusError(msg);
  }
  Day lo = start.value_or(Day{0});
  Day hi = end.value_or(Day{0});
  if (!start || !end) {
    if (records.empty()) {
      if (!start && !end) return {CorpusWindow{}, rep};
    } else {
      auto [mn, mx] = std::minmax_element(records.begin(), records.end(),
                                          [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
      if (!start) lo = mn->day();
      if (!end) hi = mx->day();
    }
  }
  CorpusWindow w(lo, hi);
  for (auto& r : records) w.add(std::move(r));
  rep.loaded = w.size();
  return {std::move(w), rep};
}

inline LoadedCorpus load_corpus(const std::string& path, std::optional<Day> start = std::nullopt,
                                std::optional<Day> end = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open corpus file " + path);
  return load_corpus(in, start, end);
}

inline std::string serialize_corpus(const CorpusWindow& c) {
  std::string out;
  c.for_each([&](const TweetRecord& r) {
    out += to_json_line(r);
    out += '\n';
  });
  return out;
}

// ---------------------------------------------------------------------------
// Filters

struct FilterResult {
  CorpusWindow window;
  double retention = 1.0;  // kept / input; 1 for an empty input
};

inline FilterResult filter_official_clients(const CorpusWindow& c, const FilterSpec& spec) {
  if (spec.official_clients.empty()) throw CorpusError("official client set is empty");
  auto out = c.filtered([&](const TweetRecord& r) { return spec.official_clients.count(r.source_client) > 0; });
  const std::size_t before = c.size();
  const double retention = before ? static_cast<double>(out.size()) / static_cast<double>(before) : 1.0;
  return {std::move(out), retention};
}

inline bool matches_strict_keywords(std::string_view text, const FilterSpec& spec) {
  const std::string folded = ascii_lower(text);
  for (const auto& rule : spec.strict_keywords) {
    bool all = !rule.empty();
    for (const auto& kw : rule) all = all && folded.find(ascii_lower(kw)) != std::string::npos;
    if (all) return true;
  }
  return false;
}

inline FilterResult filter_strict_keywords(const CorpusWindow& c, const FilterSpec& spec) {
  if (spec.strict_keywords.empty()) throw CorpusError("strict keyword rule set is empty");
  auto out = c.filtered([&](const TweetRecord& r) { return matches_strict_keywords(r.text, spec); });
  const std::size_t before = c.size();
  const double retention = before ? static_cast<double>(out.size()) / static_cast<double>(before) : 1.0;
  return {std::move(out), retention};
}

}  // namespace optrend
