#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "optrend/corpus.hpp"
#include "optrend/csv.hpp"
#include "optrend/hypergeometric.hpp"

namespace optrend {

struct HashtagStats {
  std::map<std::string, std::int64_t> occurrences;  // c_i: tweets containing tag i
  std::int64_t total_tweets = 0;                     // N

  std::int64_t count(const std::string& tag) const {
    auto it = occurrences.find(tag);
    return it == occurrences.end() ? 0 : it->second;
  }
};

namespace detail {

inline std::vector<std::string> distinct_tags(const TweetRecord& r) {
  std::vector<std::string> tags = r.hashtags;
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  return tags;
}

}  // namespace detail

inline HashtagStats count_hashtags(const CorpusWindow& c) {
  HashtagStats s;
  c.for_each([&](const TweetRecord& r) {
    ++s.total_tweets;
    for (const auto& t : detail::distinct_tags(r)) ++s.occurrences[t];
  });
  return s;
}

struct SignificantEdge {
  std::uint32_t a = 0, b = 0;  // vertex indices, a < b
  std::int64_t k = 0;          // co-occurrences
  double log_p = 0;            // natural log of the tail p-value
  double s = 0;                // log(p0 / p)
};

struct CooccurrenceOptions {
  double p0 = 1e-6;
  std::size_t max_tags_per_tweet = 20;  // tweets above this are left out of pair counting
};

struct SignificantGraph {
  double p0 = 1e-6;
  std::vector<std::string> vertices;  // sorted
  std::vector<std::int64_t> counts;   // c_i per vertex
  std::vector<SignificantEdge> edges;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // neighbor, s
  std::int64_t total_tweets = 0;
  std::size_t raw_vertices = 0, raw_edges = 0;

  std::size_t num_vertices() const { return vertices.size(); }

  std::optional<std::uint32_t> find(const std::string& tag) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), tag);
    if (it == vertices.end() || *it != tag) return std::nullopt;
    return static_cast<std::uint32_t>(it - vertices.begin());
  }

  void rebuild_adjacency() {
    adj.assign(vertices.size(), {});
    for (const auto& e : edges) {
      adj[e.a].emplace_back(e.b, e.s);
      adj[e.b].emplace_back(e.a, e.s);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
  }
};

// Raw co-occurrence counts keyed by (smaller tag, larger tag).
inline std::map<std::pair<std::string, std::string>, std::int64_t> cooccurrence_counts(
    const CorpusWindow& c, std::size_t max_tags_per_tweet = 20) {
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::string> names;
  std::unordered_map<std::uint64_t, std::int64_t> pairs;
  c.for_each([&](const TweetRecord& r) {
    const auto tags = detail::distinct_tags(r);
    if (tags.size() < 2 || tags.size() > max_tags_per_tweet) return;
    std::vector<std::uint32_t> tid;
    for (const auto& t : tags) {
      auto [it, inserted] = ids.try_emplace(t, static_cast<std::uint32_t>(names.size()));
      if (inserted) names.push_back(t);
      tid.push_back(it->second);
    }
    for (std::size_t i = 0; i < tid.size(); ++i)
      for (std::size_t j = i + 1; j < tid.size(); ++j) {
        auto a = std::min(tid[i], tid[j]), b = std::max(tid[i], tid[j]);
        ++pairs[(std::uint64_t{a} << 32) | b];
      }
  });
  std::map<std::pair<std::string, std::string>, std::int64_t> out;
  for (const auto& [key, k] : pairs) {
    const auto& x = names[key >> 32];
    const auto& y = names[key & 0xffffffffu];
    out[{std::min(x, y), std::max(x, y)}] = k;
  }
  return out;
}

// Keeps edges with p < p0, restricts to the largest connected component and assigns
// s = log(p0/p).
inline SignificantGraph build_significant_graph(const CorpusWindow& c, const CooccurrenceOptions& opt = {}) {
  if (!(opt.p0 > 0 && opt.p0 < 1)) throw std::invalid_argument("p0 must lie in (0,1)");
  const HashtagStats stats = count_hashtags(c);
  const auto pairs = cooccurrence_counts(c, opt.max_tags_per_tweet);
  const double log_p0 = std::log(opt.p0);

  SignificantGraph g;
  g.p0 = opt.p0;
  g.total_tweets = stats.total_tweets;
  g.raw_edges = pairs.size();
  {
    std::set<std::string> raw;
    for (const auto& [key, k] : pairs) {
      raw.insert(key.first);
      raw.insert(key.second);
    }
    g.raw_vertices = raw.size();
  }

  struct Kept {
    std::string a, b;
    std::int64_t k;
    double log_p;
  };
  std::vector<Kept> kept;
  for (const auto& [key, k] : pairs) {
    const double lp = log_edge_significance(k, stats.count(key.first), stats.count(key.second), stats.total_tweets);
    if (lp < log_p0) kept.push_back({key.first, key.second, k, lp});
  }

  // Largest connected component of the filtered graph.
  std::vector<std::string> verts;
  for (const auto& e : kept) {
    verts.push_back(e.a);
    verts.push_back(e.b);
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  auto idx = [&](const std::string& t) {
    return static_cast<std::uint32_t>(std::lower_bound(verts.begin(), verts.end(), t) - verts.begin());
  };
  std::vector<std::uint32_t> parent(verts.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : kept) {
    auto a = find(idx(e.a)), b = find(idx(e.b));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::uint32_t, std::size_t> sizes;  // root (smallest member) -> size
  for (std::uint32_t v = 0; v < verts.size(); ++v) ++sizes[find(v)];
  std::uint32_t best_root = 0;
  std::size_t best_size = 0;
  for (const auto& [root, sz] : sizes)
    if (sz > best_size) {
      best_size = sz;
      best_root = root;
    }

  for (std::uint32_t v = 0; v < verts.size(); ++v)
    if (find(v) == best_root) g.vertices.push_back(verts[v]);
  for (const auto& t : g.vertices) g.counts.push_back(stats.count(t));
  for (const auto& e : kept) {
    auto a = g.find(e.a), b = g.find(e.b);
    if (!a || !b) continue;
    g.edges.push_back({*a, *b, e.k, e.log_p, log_p0 - e.log_p});
  }
  g.rebuild_adjacency();
  return g;
}

// ---------------------------------------------------------------------------
// Exports

inline std::string edges_csv(const SignificantGraph& g) {
  csv::Writer w({"tag_a", "tag_b", "k", "p", "s"});
  for (const auto& e : g.edges)
    w.row({g.vertices[e.a], g.vertices[e.b], std::to_string(e.k), csv::num(std::exp(e.log_p)), csv::num(e.s)});
  return w.str();
}

inline std::string vertices_csv(const SignificantGraph& g, const std::vector<int>& community = {}) {
  csv::Writer w({"tag", "count", "community"});
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    w.row({g.vertices[i], std::to_string(g.counts[i]),
           community.empty() ? std::string("NA") : std::to_string(community[i])});
  return w.str();
}

// Node-link document for the curation view. `assignment` maps tag -> class name.
inline nlohmann::ordered_json node_link_json(const SignificantGraph& g, const std::vector<int>& community = {},
                                             const std::map<std::string, std::string>& assignment = {}) {
  nlohmann::ordered_json doc;
  doc["p0"] = g.p0;
  doc["total_tweets"] = g.total_tweets;
  auto nodes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    nlohmann::ordered_json n;
    n["id"] = g.vertices[i];
    n["count"] = g.counts[i];
    n["community"] = community.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(community[i]);
    auto it = assignment.find(g.vertices[i]);
    n["class"] = it == assignment.end() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(it->second);
    nodes.push_back(std::move(n));
  }
  auto links = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    nlohmann::ordered_json l;
    l["source"] = g.vertices[e.a];
    l["target"] = g.vertices[e.b];
    l["k"] = e.k;
    l["log_p"] = e.log_p;
    l["s"] = e.s;
    links.push_back(std::move(l));
  }
  doc["nodes"] = std::move(nodes);
  doc["links"] = std::move(links);
  return doc;
}

// Reads back the edge and vertex tables written by edges_csv / vertices_csv.
inline SignificantGraph read_significant_graph(const std::string& vertices_text, const std::string& edges_text,
                                               double p0, std::int64_t total_tweets) {
  SignificantGraph g;
  g.p0 = p0;
  g.total_tweets = total_tweets;
  std::istringstream vin(vertices_text);
  std::string line;
  std::getline(vin, line);
  std::vector<std::pair<std::string, std::int64_t>> vs;
  while (std::getline(vin, line)) {
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() < 2) throw std::invalid_argument("bad vertex row: " + line);
    vs.emplace_back(f[0], std::stoll(f[1]));
  }
  std::sort(vs.begin(), vs.end());
  for (auto& [t, c] : vs) {
    g.vertices.push_back(t);
    g.counts.push_back(c);
  }
  std::istringstream ein(edges_text);
  std::getline(ein, line);
  const double log_p0 = std::log(p0);
  while (std::getline(ein, line)) {
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() < 5) throw std::invalid_argument("bad edge row: " + line);
    auto a = g.find(f[0]), b = g.find(f[1]);
    if (!a || !b) throw std::invalid_argument("edge references unknown tag: " + line);
    const double s = csv::parse_double(f[4]);
    SignificantEdge e{std::min(*a, *b), std::max(*a, *b), std::stoll(f[2]), log_p0 - s, s};
    g.edges.push_back(e);
  }
  g.raw_vertices = g.vertices.size();
  g.raw_edges = g.edges.size();
  g.rebuild_adjacency();
  return g;
}

}  // namespace optrend
