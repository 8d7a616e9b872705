#include <gtest/gtest.h>

#include "optrend/community.hpp"
#include "optrend/synth.hpp"

using namespace optrend;

namespace {

SignificantGraph graph_of(std::size_t n, const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges) {
  SignificantGraph g;
  for (std::size_t i = 0; i < n; ++i) {
    g.vertices.push_back("v" + std::string(1, static_cast<char>('a' + i)));
    g.counts.push_back(10);
  }
  for (auto [a, b, w] : edges) g.edges.push_back({a, b, 1, 0.0, w});
  g.rebuild_adjacency();
  return g;
}

// Q from the dense definition.
double dense_modularity(const SignificantGraph& g, const std::vector<int>& c) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  for (const auto& e : g.edges) A[e.a][e.b] = A[e.b][e.a] = e.s;
  std::vector<double> k(n, 0.0);
  double two_m = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      k[i] += A[i][j];
      two_m += A[i][j];
    }
  double q = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (c[i] == c[j]) q += A[i][j] - k[i] * k[j] / two_m;
  return q / two_m;
}

}  // namespace

TEST(Community, ModularityMatchesDenseFormula) {
  const auto g = graph_of(5, {{0, 1, 2.0}, {1, 2, 1.0}, {2, 3, 0.5}, {3, 4, 3.0}, {0, 2, 1.5}});
  for (const std::vector<int>& c : {std::vector<int>{0, 0, 0, 1, 1}, {0, 1, 0, 1, 0}, {0, 0, 0, 0, 0}})
    EXPECT_NEAR(modularity(WeightedGraph::from(g), c), dense_modularity(g, c), 1e-12);
}

TEST(Community, TwoCliquesJoinedByABridge) {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> e;
  for (std::uint32_t i = 0; i < 5; ++i)
    for (std::uint32_t j = i + 1; j < 5; ++j) {
      e.emplace_back(i, j, 5.0);
      e.emplace_back(i + 5, j + 5, 5.0);
    }
  e.emplace_back(4, 5, 1.0);
  const auto g = graph_of(10, e);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto p = detect_communities(g, seed);
    EXPECT_EQ(p.num_communities(), 2);
    EXPECT_EQ(p.community, (std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));
    EXPECT_NEAR(p.modularity, dense_modularity(g, p.community), 1e-12);
    const auto lp = label_propagation_communities(g, seed);
    EXPECT_EQ(lp.community, p.community);
  }
}

TEST(Community, RecoversPlantedBlocksAndIsDeterministic) {
  const auto pg = synth::planted_cooccurrence_graph(3, 25, 0.5, 0.03, 9);
  const auto& g = *pg.graph;
  const auto p = detect_communities(g, 4);
  EXPECT_EQ(p.community, detect_communities(g, 4).community);
  // Each planted class should be (nearly) one community: majority label purity.
  std::size_t agree = 0;
  for (int k = 0; k < 3; ++k) {
    std::map<int, std::size_t> votes;
    std::size_t members = 0;
    for (std::size_t v = 0; v < g.num_vertices(); ++v)
      if (pg.truth.at(g.vertices[v]) == k) {
        ++votes[p.community[v]];
        ++members;
      }
    std::size_t best = 0;
    for (auto& [c, n] : votes) best = std::max(best, n);
    agree += best;
    EXPECT_GE(static_cast<double>(best) / static_cast<double>(members), 0.9);
  }
  EXPECT_GE(p.num_communities(), 3);
  EXPECT_GT(p.modularity, 0.3);
  EXPECT_GE(agree, 68u);
}

TEST(Community, EmptyGraphIsAnError) {
  SignificantGraph g;
  EXPECT_THROW(detect_communities(g, 1), std::invalid_argument);
  EXPECT_THROW(label_propagation_communities(g, 1), std::invalid_argument);
}
