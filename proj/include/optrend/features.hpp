#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "optrend/corpus.hpp"
#include "optrend/hash.hpp"
#include "optrend/propagation.hpp"
#include "optrend/tokenizer.hpp"

namespace optrend {

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingExample {
  std::string tweet_id;
  int label = 0;
  TokenStream tokens;                   // label markers already removed
  std::vector<std::string> label_tags;  // markers that justified the label
};

struct TrainingSet {
  std::vector<std::string> classes;
  std::vector<TrainingExample> examples;
  std::uint64_t seed = 0;  // downsampling seed

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> c(classes.size(), 0);
    for (const auto& e : examples) ++c[static_cast<std::size_t>(e.label)];
    return c;
  }
};

// Downsamples every class to the size of the smallest by seeded uniform sampling.
// Input pairs carry the corpus position; output is in corpus order.
inline std::vector<TrainingExample> balance_classes(
    std::vector<std::vector<std::pair<std::size_t, TrainingExample>>> by_class, std::uint64_t seed,
    const std::vector<std::string>& names) {
  std::size_t m = SIZE_MAX;
  for (std::size_t k = 0; k < by_class.size(); ++k) {
    if (by_class[k].empty()) throw TrainingError("no training examples for class '" + names[k] + "'");
    m = std::min(m, by_class[k].size());
  }
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::size_t, TrainingExample>> kept;
  for (auto& cls : by_class) {
    std::vector<std::size_t> idx(cls.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(m);
    for (auto i : idx) kept.push_back(std::move(cls[i]));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<TrainingExample> out;
  out.reserve(kept.size());
  for (auto& [pos, ex] : kept) out.push_back(std::move(ex));
  return out;
}

// Distant supervision over a corpus. `label_of` returns the class (and justifying markers)
// for a record's tokens or nullopt to skip; `strip` removes label markers from features.
template <typename LabelFn, typename StripFn>
TrainingSet build_distant_set(const CorpusWindow& c, const std::vector<std::string>& classes, LabelFn&& label_of,
                              StripFn&& strip, std::uint64_t seed, const FilterSpec* official = nullptr) {
  std::vector<std::vector<std::pair<std::size_t, TrainingExample>>> by_class(classes.size());
  std::size_t position = 0;
  c.for_each([&](const TweetRecord& r) {
    ++position;
    if (r.is_retweet) return;
    if (official && !official->official_clients.count(r.source_client)) return;
    TokenStream toks = tokenize(r.text);
    std::optional<std::pair<int, std::vector<std::string>>> lab = label_of(r, toks);
    if (!lab) return;
    TrainingExample ex;
    ex.tweet_id = r.tweet_id;
    ex.label = lab->first;
    ex.label_tags = std::move(lab->second);
    for (auto& t : toks)
      if (!strip(t)) ex.tokens.push_back(std::move(t));
    by_class[static_cast<std::size_t>(ex.label)].emplace_back(position, std::move(ex));
  });
  TrainingSet ts;
  ts.classes = classes;
  ts.seed = seed;
  ts.examples = balance_classes(std::move(by_class), seed, classes);
  return ts;
}

// Non-retweet (official-client, when given) tweets whose assigned hashtags all fall in one
// class. Every assigned hashtag is removed from the features.
inline TrainingSet build_training_set(const CorpusWindow& c, const ClassAssignment& assignment, std::uint64_t seed,
                                      const FilterSpec* official = nullptr) {
  if (assignment.classes.size() < 2) throw TrainingError("assignment needs at least two classes");
  auto label_of = [&](const TweetRecord& r, const TokenStream& toks)
      -> std::optional<std::pair<int, std::vector<std::string>>> {
    std::set<int> cls;
    std::vector<std::string> markers;
    auto consider = [&](const std::string& tag) {
      if (auto k = assignment.class_of(tag)) {
        cls.insert(*k);
        if (std::find(markers.begin(), markers.end(), tag) == markers.end()) markers.push_back(tag);
      }
    };
    for (const auto& h : r.hashtags) consider(h);
    for (const auto& t : toks)
      if (t.kind == TokenKind::hashtag) consider(t.text);
    if (cls.size() != 1) return std::nullopt;
    return std::make_pair(*cls.begin(), markers);
  };
  auto strip = [&](const Token& t) { return t.kind == TokenKind::hashtag && assignment.tags.count(t.text) > 0; };
  return build_distant_set(c, assignment.classes, label_of, strip, seed, official);
}

inline std::string training_set_jsonl(const TrainingSet& ts) {
  std::string out;
  for (const auto& e : ts.examples) {
    nlohmann::ordered_json j;
    j["class"] = ts.classes[static_cast<std::size_t>(e.label)];
    auto toks = nlohmann::ordered_json::array();
    for (const auto& t : e.tokens) toks.push_back({to_string(t.kind), t.text});
    j["tokens"] = std::move(toks);
    j["tweet_id"] = e.tweet_id;
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary and vectors

inline std::vector<std::string> feature_strings(const TokenStream& ts) {
  std::vector<std::string> f;
  f.reserve(ts.size() * 2);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    f.push_back(ts[i].feature());
    if (i + 1 < ts.size()) f.push_back(ts[i].feature() + " " + ts[i + 1].feature());
  }
  return f;
}

class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary build(const TrainingSet& ts) {
    std::set<std::string> all;
    for (const auto& e : ts.examples)
      for (auto& f : feature_strings(e.tokens)) all.insert(std::move(f));
    return Vocabulary(std::vector<std::string>(all.begin(), all.end()));
  }

  explicit Vocabulary(std::vector<std::string> sorted_features) : features_(std::move(sorted_features)) {
    index_.reserve(features_.size());
    for (std::size_t i = 0; i < features_.size(); ++i) index_.emplace(features_[i], static_cast<std::uint32_t>(i));
  }

  std::size_t size() const { return features_.size(); }
  const std::string& feature(std::uint32_t id) const { return features_[id]; }
  const std::vector<std::string>& features() const { return features_; }

  std::optional<std::uint32_t> id(const std::string& f) const {
    auto it = index_.find(f);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t hash() const {
    std::uint64_t h = fnv1a64("vocab");
    for (const auto& f : features_) {
      h = fnv1a64(f, h);
      h = fnv1a64(std::string_view("\n"), h);
    }
    return h;
  }

  std::string table_csv() const {
    std::string out = "id\tfeature\n";
    for (std::size_t i = 0; i < features_.size(); ++i) out += std::to_string(i) + "\t" + features_[i] + "\n";
    return out;
  }

 private:
  std::vector<std::string> features_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Sorted, unique ids of present unigrams and adjacent bigrams; unknown features dropped.
using FeatureVector = std::vector<std::uint32_t>;

inline FeatureVector vectorize(const TokenStream& ts, const Vocabulary& vocab) {
  FeatureVector fv;
  for (const auto& f : feature_strings(ts))
    if (auto id = vocab.id(f)) fv.push_back(*id);
  std::sort(fv.begin(), fv.end());
  fv.erase(std::unique(fv.begin(), fv.end()), fv.end());
  return fv;
}

}  // namespace optrend
