#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>
#include <vector>

#include "optrend/cooccurrence.hpp"

namespace optrend {

// Undirected weighted graph in adjacency form. Self-loop weight w on node i is stored once
// in `self` and contributes 2w to the node degree, as in the aggregated Louvain graph.
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self;

  std::size_t size() const { return adj.size(); }

  static WeightedGraph from(const SignificantGraph& g) {
    WeightedGraph w;
    w.adj = g.adj;
    w.self.assign(g.num_vertices(), 0.0);
    return w;
  }

  double degree(std::uint32_t v) const {
    double d = 2.0 * self[v];
    for (const auto& [u, wt] : adj[v]) d += wt;
    return d;
  }

  double total_weight() const {  // m
    double m = 0;
    for (std::uint32_t v = 0; v < size(); ++v) m += degree(v);
    return m / 2.0;
  }
};

struct CommunityPartition {
  std::vector<int> community;  // per vertex, relabeled 0.. in order of first vertex
  double modularity = 0;

  int num_communities() const {
    return community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
  }
};

inline double modularity(const WeightedGraph& g, const std::vector<int>& comm, double resolution = 1.0) {
  const double m = g.total_weight();
  if (m <= 0) return 0.0;
  std::unordered_map<int, double> in, tot;
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    tot[comm[v]] += g.degree(v);
    in[comm[v]] += 2.0 * g.self[v];
    for (const auto& [u, w] : g.adj[v])
      if (comm[u] == comm[v]) in[comm[v]] += w;
  }
  double q = 0;
  for (const auto& [c, t] : tot) q += in[c] / (2 * m) - resolution * (t / (2 * m)) * (t / (2 * m));
  return q;
}

namespace detail {

inline std::vector<int> relabel(const std::vector<int>& comm) {
  std::unordered_map<int, int> map;
  std::vector<int> out(comm.size());
  for (std::size_t i = 0; i < comm.size(); ++i) {
    auto [it, ins] = map.try_emplace(comm[i], static_cast<int>(map.size()));
    out[i] = it->second;
  }
  return out;
}

// One level of local moving. Returns true when any node changed community.
inline bool louvain_local_moves(const WeightedGraph& g, std::vector<int>& comm, double resolution,
                                std::mt19937_64& rng) {
  const std::size_t n = g.size();
  const double m2 = 2.0 * g.total_weight();
  if (m2 <= 0) return false;
  std::vector<double> deg(n), tot(n, 0.0);
  for (std::uint32_t v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    tot[comm[v]] += deg[v];
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);

  bool changed_any = false;
  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (std::uint32_t v : order) {
      const int own = comm[v];
      touched.clear();
      for (const auto& [u, w] : g.adj[v]) {
        if (u == v) continue;
        if (link[comm[u]] == 0.0) touched.push_back(comm[u]);
        link[comm[u]] += w;
      }
      tot[own] -= deg[v];
      int best = own;
      double best_gain = link[own] - resolution * tot[own] * deg[v] / m2;
      std::sort(touched.begin(), touched.end());
      for (int c : touched) {
        const double gain = link[c] - resolution * tot[c] * deg[v] / m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += deg[v];
      for (int c : touched) link[c] = 0.0;
      link[own] = 0.0;
      if (best != own) {
        comm[v] = best;
        moved = true;
        changed_any = true;
      }
    }
    if (!moved) break;
  }
  return changed_any;
}

inline WeightedGraph aggregate(const WeightedGraph& g, const std::vector<int>& comm, int k) {
  WeightedGraph out;
  out.adj.assign(static_cast<std::size_t>(k), {});
  out.self.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<std::map<std::uint32_t, double>> acc(static_cast<std::size_t>(k));
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    const auto cv = static_cast<std::uint32_t>(comm[v]);
    out.self[cv] += g.self[v];
    for (const auto& [u, w] : g.adj[v]) {
      const auto cu = static_cast<std::uint32_t>(comm[u]);
      if (cu == cv)
        out.self[cv] += w / 2.0;  // each internal edge is visited from both ends
      else
        acc[cv][cu] += w;
    }
  }
  for (std::size_t c = 0; c < acc.size(); ++c)
    for (const auto& [d, w] : acc[c]) out.adj[c].emplace_back(d, w);
  return out;
}

}  // namespace detail

// Multi-level greedy modularity optimization on the s-weighted graph. Node visiting order
// is a seeded shuffle, so the result is deterministic for a given seed.
inline CommunityPartition detect_communities(const SignificantGraph& sg, std::uint64_t seed, double resolution = 1.0) {
  if (sg.num_vertices() == 0) throw std::invalid_argument("community detection on an empty graph");
  std::mt19937_64 rng(seed);
  const WeightedGraph base = WeightedGraph::from(sg);
  WeightedGraph g = base;
  std::vector<int> membership(base.size());
  std::iota(membership.begin(), membership.end(), 0);
  for (int level = 0; level < 64; ++level) {
    std::vector<int> comm(g.size());
    std::iota(comm.begin(), comm.end(), 0);
    if (!detail::louvain_local_moves(g, comm, resolution, rng)) break;
    comm = detail::relabel(comm);
    const int k = *std::max_element(comm.begin(), comm.end()) + 1;
    for (auto& m : membership) m = comm[static_cast<std::size_t>(m)];
    if (static_cast<std::size_t>(k) == g.size()) break;
    g = detail::aggregate(g, comm, k);
  }
  CommunityPartition p;
  p.community = detail::relabel(membership);
  p.modularity = modularity(base, p.community, resolution);
  return p;
}

// Weighted asynchronous label propagation, kept as a cross-check on Louvain.
inline CommunityPartition label_propagation_communities(const SignificantGraph& sg, std::uint64_t seed,
                                                        int max_sweeps = 100) {
  if (sg.num_vertices() == 0) throw std::invalid_argument("community detection on an empty graph");
  std::mt19937_64 rng(seed);
  const std::size_t n = sg.num_vertices();
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    bool changed = false;
    for (auto v : order) {
      std::map<int, double> votes;
      for (const auto& [u, w] : sg.adj[v]) votes[label[u]] += w;
      if (votes.empty()) continue;
      int best = label[v];
      double best_w = votes.count(best) ? votes[best] : -1.0;
      for (const auto& [l, w] : votes)
        if (w > best_w + 1e-12) {
          best_w = w;
          best = l;
        }
      if (best != label[v]) {
        label[v] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  CommunityPartition p;
  p.community = detail::relabel(label);
  p.modularity = modularity(WeightedGraph::from(sg), p.community);
  return p;
}

}  // namespace optrend
