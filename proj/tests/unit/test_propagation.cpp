#include <gtest/gtest.h>

#include <sstream>

#include "optrend/propagation.hpp"
#include "optrend/synth.hpp"

using namespace optrend;

namespace {

std::shared_ptr<SignificantGraph> graph_of(
    const std::vector<std::pair<std::string, std::int64_t>>& vertices,
    const std::vector<std::tuple<std::string, std::string, double>>& edges) {
  auto g = std::make_shared<SignificantGraph>();
  auto vs = vertices;
  std::sort(vs.begin(), vs.end());
  for (const auto& [t, c] : vs) {
    g->vertices.push_back(t);
    g->counts.push_back(c);
  }
  for (const auto& [a, b, s] : edges) {
    auto x = *g->find(a), y = *g->find(b);
    g->edges.push_back({std::min(x, y), std::max(x, y), 1, std::log(g->p0) - s, s});
  }
  g->rebuild_adjacency();
  return g;
}

SeedAssignment seeds_of(std::vector<std::string> a, std::vector<std::string> b) {
  return {{"A", "B"}, {std::move(a), std::move(b)}};
}

// a1 - a2 - a3 - b2 - b1 chain plus x tied between a1 and b1.
std::shared_ptr<SignificantGraph> chain_graph() {
  return graph_of({{"a1", 100}, {"a2", 50}, {"a3", 40}, {"b1", 90}, {"b2", 60}, {"x", 30}},
                  {{"a1", "a2", 5}, {"a2", "a3", 3}, {"b1", "b2", 4}, {"a3", "b2", 1}, {"x", "a1", 2}, {"x", "b1", 2}});
}

std::vector<std::string> names(const std::vector<Candidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.hashtag);
  return out;
}

}  // namespace

TEST(Propagation, StrictArgmax) {
  EXPECT_EQ(detail::strict_argmax({1.0, 2.0}), 1);
  EXPECT_EQ(detail::strict_argmax({2.0, 2.0}), -1);
  EXPECT_EQ(detail::strict_argmax({0.0, 0.0}), -1);
  EXPECT_EQ(detail::strict_argmax({3.0, 1.0, 3.0}), -1);
  EXPECT_EQ(detail::strict_argmax({3.0, 1.0, 2.0}), 0);
}

TEST(Propagation, FirstIterationProposalsSkipTies) {
  const auto st = start_propagation(chain_graph(), seeds_of({"a1"}, {"b1"}), 0.001);
  EXPECT_EQ(st.iteration, 1);
  EXPECT_EQ(names(st.candidates), (std::vector<std::string>{"a2", "b2"}));
  EXPECT_EQ(st.candidates[0].cls, 0);
  EXPECT_EQ(st.candidates[0].scores, (std::vector<double>{5.0, 0.0}));
  EXPECT_EQ(st.candidates[1].cls, 1);
}

TEST(Propagation, AutoAcceptRunsToStability) {
  AutoAcceptCuration cur;
  const auto res = run_until_stable(chain_graph(), seeds_of({"a1"}, {"b1"}), 0.001, cur);
  EXPECT_TRUE(res.stable);
  EXPECT_EQ(res.iterations, 3);
  const auto m = res.assignment.as_names();
  EXPECT_EQ(m, (std::map<std::string, std::string>{{"a1", "A"}, {"a2", "A"}, {"a3", "A"}, {"b1", "B"}, {"b2", "B"}}));
  EXPECT_EQ(res.assignment.tags.at("a2").provenance, Provenance::propagated);
  EXPECT_EQ(res.assignment.tags.at("a3").iteration, 2);
  EXPECT_EQ(replay_audit(res.audit), m);
  EXPECT_EQ(replay_audit(res.audit, 1).size(), 4u);
}

TEST(Propagation, OccurrenceFilterIsStrict) {
  // a1 has 1000 occurrences; r = 0.01 needs c > 10.
  auto g = graph_of({{"a1", 1000}, {"b1", 1000}, {"p", 10}, {"q", 11}},
                    {{"a1", "p", 3}, {"a1", "q", 3}, {"b1", "p", 0.1}, {"b1", "q", 0.1}});
  const auto st = start_propagation(g, seeds_of({"a1"}, {"b1"}), 0.01);
  EXPECT_EQ(names(st.candidates), (std::vector<std::string>{"q"}));
  EXPECT_THROW(occurrence_filter({}, {}, st.assignment, 0.0), std::invalid_argument);
  EXPECT_THROW(occurrence_filter({}, {}, st.assignment, 1.0), std::invalid_argument);
  // The filtered tag is in the audit.
  bool seen = false;
  for (const auto& l : st.audit) seen |= l.find("\"filtered\"") != std::string::npos && l.find("\"p\"") != std::string::npos;
  EXPECT_TRUE(seen);
}

TEST(Propagation, ConsistencyPruneRemovesTagsThatLoseTheirMajority) {
  auto g = graph_of({{"a1", 100}, {"b1", 100}, {"t", 50}, {"u", 50}, {"v", 50}},
                    {{"a1", "t", 5}, {"t", "u", 3}, {"t", "v", 3}, {"u", "b1", 10}, {"v", "b1", 10}});
  auto st = start_propagation(g, seeds_of({"a1"}, {"b1"}), 0.001);
  EXPECT_EQ(names(st.candidates), (std::vector<std::string>{"t", "u", "v"}));
  apply_curation(st, {{"t", Verdict::accept}, {"u", Verdict::accept}, {"v", Verdict::accept}});
  EXPECT_EQ(st.assignment.tags.at("t").cls, 0);
  advance_iteration(st);
  EXPECT_FALSE(st.assignment.tags.count("t"));
  EXPECT_FALSE(st.stable);
  ASSERT_EQ(names(st.candidates), (std::vector<std::string>{"t"}));
  EXPECT_EQ(st.candidates[0].cls, 1);
  apply_curation(st, {{"t", Verdict::accept}});
  advance_iteration(st);
  EXPECT_FALSE(st.stable);
  advance_iteration(st);
  EXPECT_TRUE(st.stable);
  EXPECT_EQ(st.assignment.tags.at("t").cls, 1);
  EXPECT_EQ(st.assignment.tags.at("t").provenance, Provenance::curated_in);
}

TEST(Propagation, RejectedTagsAreNeverProposedAgain) {
  auto st = start_propagation(chain_graph(), seeds_of({"a1"}, {"b1"}), 0.001);
  const auto out = apply_curation(st, {{"a2", Verdict::reject}, {"b2", Verdict::accept}, {"nope", Verdict::accept}});
  EXPECT_EQ(out.accepted, 1u);
  EXPECT_EQ(out.rejected, 1u);
  ASSERT_EQ(out.diagnostics.size(), 1u);
  advance_iteration(st);
  for (int i = 0; i < 5 && !st.stable; ++i) {
    for (const auto& c : st.candidates) EXPECT_NE(c.hashtag, "a2");
    AutoAcceptCuration a;
    apply_curation(st, a.decide(st), true);
    advance_iteration(st);
  }
  EXPECT_TRUE(st.stable);
  EXPECT_FALSE(st.assignment.tags.count("a2"));
  // a3 reaches B through b2 once a2 is out of the picture.
  EXPECT_EQ(st.assignment.tags.at("a3").cls, 1);
}

TEST(Propagation, DecisionFileDrivesBatchCuration) {
  std::istringstream in("iteration,hashtag,decision\n1,A2,accept\n1,b2,reject\n2,a3,accept\n");
  DecisionFileCuration cur(in);
  const auto res = run_until_stable(chain_graph(), seeds_of({"a1"}, {"b1"}), 0.001, cur);
  EXPECT_TRUE(res.stable);
  const auto m = res.assignment.as_names();
  EXPECT_EQ(m.at("a2"), "A");
  EXPECT_EQ(m.at("a3"), "A");
  EXPECT_FALSE(m.count("b2"));
  EXPECT_EQ(res.assignment.tags.at("a2").provenance, Provenance::curated_in);
  // The audit round-trips to an equivalent decisions file.
  std::istringstream again(decisions_from_audit(res.audit));
  DecisionFileCuration cur2(again);
  EXPECT_EQ(run_until_stable(chain_graph(), seeds_of({"a1"}, {"b1"}), 0.001, cur2).assignment, res.assignment);
  std::istringstream bad("1,a2,maybe\n");
  EXPECT_THROW(DecisionFileCuration{bad}, PropagationError);
}

TEST(Propagation, IterationCapStopsUnstableRuns) {
  AutoAcceptCuration cur;
  const auto res = run_until_stable(chain_graph(), seeds_of({"a1"}, {"b1"}), 0.001, cur, 1);
  EXPECT_FALSE(res.stable);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_EQ(res.assignment.tags.size(), 4u);
}

TEST(Propagation, SeedValidation) {
  auto g = chain_graph();
  EXPECT_THROW(start_propagation(g, seeds_of({"a1"}, {"zz"}), 0.001), PropagationError);
  EXPECT_THROW(start_propagation(g, seeds_of({"a1"}, {"a1"}), 0.001), PropagationError);
  EXPECT_THROW(start_propagation(g, seeds_of({"a1"}, {}), 0.001), PropagationError);
  EXPECT_THROW(start_propagation(g, SeedAssignment{{"A"}, {{"a1"}}}, 0.001), PropagationError);
}

TEST(Propagation, SeedsFileFormat) {
  std::istringstream in("// camps\nclinton: #ImWithHer, nevertrump\n\ntrump: maga neverhillary\r\n");
  const auto s = parse_seeds(in);
  EXPECT_EQ(s.classes, (std::vector<std::string>{"clinton", "trump"}));
  EXPECT_EQ(s.seeds[0], (std::vector<std::string>{"imwithher", "nevertrump"}));
  std::istringstream again(format_seeds(s));
  const auto t = parse_seeds(again);
  EXPECT_EQ(t.seeds, s.seeds);
  std::istringstream bad("no colon here\n");
  EXPECT_THROW(parse_seeds(bad), PropagationError);
}

TEST(Propagation, AssignmentCsvRoundTrip) {
  AutoAcceptCuration cur;
  const auto res = run_until_stable(chain_graph(), seeds_of({"a1"}, {"b1"}), 0.001, cur);
  std::istringstream in(assignment_csv(res.assignment));
  EXPECT_EQ(read_assignment_csv(in), res.assignment);
  const auto table = sublabel_table_csv(res.assignment, {{"a1", "pro_A"}, {"a2", "pro_A"}, {"b1", "anti_A"}});
  EXPECT_EQ(table, "anti_A,pro_A\nb1,a1\n,a2\n");
}

TEST(Propagation, SubsampleKeepsFractionPerClass) {
  ClassAssignment a;
  a.classes = {"A", "B"};
  for (int i = 0; i < 20; ++i) a.tags["a" + std::to_string(i)] = {0, Provenance::propagated, 1};
  for (int i = 0; i < 3; ++i) a.tags["b" + std::to_string(i)] = {1, Provenance::propagated, 1};
  const auto s = subsample_assignment(a, 0.9, 5);
  int na = 0, nb = 0;
  for (const auto& [t, x] : s.tags) (x.cls == 0 ? na : nb)++;
  EXPECT_EQ(na, 18);
  EXPECT_EQ(nb, 3);
  EXPECT_NE(subsample_assignment(a, 0.5, 1).tags, subsample_assignment(a, 0.5, 2).tags);
}

TEST(Propagation, RecoversPlantedTwoCampGraphs) {
  std::size_t right = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto pg = synth::planted_cooccurrence_graph(2, 40, 0.3, 0.03, seed);
    AutoAcceptCuration cur;
    const auto res = run_until_stable(pg.graph, pg.seeds, 0.001, cur);
    EXPECT_TRUE(res.stable);
    for (const auto& [tag, cls] : pg.truth) {
      ++total;
      auto got = res.assignment.class_of(tag);
      right += got && *got == cls;
    }
  }
  EXPECT_GE(static_cast<double>(right) / static_cast<double>(total), 0.95);
}

TEST(Propagation, RecoversThreeClasses) {
  const auto pg = synth::planted_cooccurrence_graph(3, 30, 0.3, 0.03, 77);
  AutoAcceptCuration cur;
  const auto res = run_until_stable(pg.graph, pg.seeds, 0.001, cur);
  std::vector<int> per_class(3, 0);
  std::size_t right = 0;
  for (const auto& [tag, cls] : pg.truth) {
    auto got = res.assignment.class_of(tag);
    if (got) ++per_class[static_cast<std::size_t>(*got)];
    right += got && *got == cls;
  }
  for (int c : per_class) EXPECT_GE(c, 25);
  EXPECT_GE(static_cast<double>(right) / 90.0, 0.95);
}
