#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "optrend/cooccurrence.hpp"
#include "optrend/csv.hpp"

namespace optrend {

struct PropagationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Provenance { seed, propagated, curated_in };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::seed: return "seed";
    case Provenance::propagated: return "propagated";
    case Provenance::curated_in: return "curated-in";
  }
  return "?";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "seed") return Provenance::seed;
  if (s == "propagated") return Provenance::propagated;
  if (s == "curated-in") return Provenance::curated_in;
  throw std::invalid_argument("unknown provenance " + s);
}

struct SeedAssignment {
  std::vector<std::string> classes;             // K >= 2 names
  std::vector<std::vector<std::string>> seeds;  // per class, non-empty, disjoint

  std::size_t num_classes() const { return classes.size(); }
};

// Seeds file: one line per class, "class: tag1 tag2 ...". Blank lines and lines starting
// with "//" are skipped; commas between tags are accepted.
inline SeedAssignment parse_seeds(std::istream& in) {
  SeedAssignment s;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.rfind("//", 0) == 0) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw PropagationError("seeds line without ':': " + line);
    std::string name = line.substr(0, colon);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    std::string rest = line.substr(colon + 1);
    std::replace(rest.begin(), rest.end(), ',', ' ');
    std::istringstream tags(rest);
    std::vector<std::string> list;
    for (std::string t; tags >> t;) list.push_back(normalize_hashtag(t));
    s.classes.push_back(name);
    s.seeds.push_back(std::move(list));
  }
  return s;
}

inline std::string format_seeds(const SeedAssignment& s) {
  std::string out;
  for (std::size_t k = 0; k < s.classes.size(); ++k) {
    out += s.classes[k] + ":";
    for (const auto& t : s.seeds[k]) out += " " + t;
    out += "\n";
  }
  return out;
}

struct AssignedTag {
  int cls = 0;
  Provenance provenance = Provenance::seed;
  int iteration = 0;
  bool operator==(const AssignedTag&) const = default;
};

struct ClassAssignment {
  std::vector<std::string> classes;
  std::map<std::string, AssignedTag> tags;

  std::optional<int> class_of(const std::string& tag) const {
    auto it = tags.find(tag);
    if (it == tags.end()) return std::nullopt;
    return it->second.cls;
  }
  int class_index(const std::string& name) const {
    auto it = std::find(classes.begin(), classes.end(), name);
    if (it == classes.end()) throw std::invalid_argument("unknown class " + name);
    return static_cast<int>(it - classes.begin());
  }
  std::map<std::string, std::string> as_names() const {
    std::map<std::string, std::string> out;
    for (const auto& [t, a] : tags) out[t] = classes[static_cast<std::size_t>(a.cls)];
    return out;
  }
  std::map<std::string, int> as_classes() const {
    std::map<std::string, int> out;
    for (const auto& [t, a] : tags) out[t] = a.cls;
    return out;
  }
  bool operator==(const ClassAssignment&) const = default;
};

inline std::string assignment_csv(const ClassAssignment& a) {
  csv::Writer w({"hashtag", "class", "provenance", "iteration"});
  for (const auto& [t, x] : a.tags)
    w.row({t, a.classes[static_cast<std::size_t>(x.cls)], to_string(x.provenance), std::to_string(x.iteration)});
  return w.str();
}

inline ClassAssignment read_assignment_csv(std::istream& in) {
  ClassAssignment a;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() < 4) throw PropagationError("bad assignment row: " + line);
    auto it = std::find(a.classes.begin(), a.classes.end(), f[1]);
    int cls;
    if (it == a.classes.end()) {
      cls = static_cast<int>(a.classes.size());
      a.classes.push_back(f[1]);
    } else {
      cls = static_cast<int>(it - a.classes.begin());
    }
    a.tags[f[0]] = {cls, provenance_from_string(f[2]), std::stoi(f[3])};
  }
  return a;
}

// Table with one column per curator sub-label (e.g. pro/anti for each of two camps);
// tags without a sub-label are left out.
inline std::string sublabel_table_csv(const ClassAssignment& a, const std::map<std::string, std::string>& sublabel) {
  std::map<std::string, std::vector<std::string>> cols;
  for (const auto& [tag, x] : a.tags) {
    auto it = sublabel.find(tag);
    if (it != sublabel.end()) cols[it->second].push_back(tag);
  }
  std::vector<std::string> header;
  std::size_t rows = 0;
  for (const auto& [name, tags] : cols) {
    header.push_back(name);
    rows = std::max(rows, tags.size());
  }
  csv::Writer w(header);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<std::string> row;
    for (const auto& [name, tags] : cols) row.push_back(i < tags.size() ? tags[i] : "");
    w.row(row);
  }
  return w.str();
}

struct Candidate {
  std::string hashtag;
  int cls = 0;
  std::vector<double> scores;  // S_k per class
  std::int64_t count = 0;
  bool operator==(const Candidate&) const = default;
};

enum class Verdict { accept, reject };

struct Decision {
  std::string hashtag;
  Verdict verdict = Verdict::accept;
};

struct PropagationState {
  std::shared_ptr<const SignificantGraph> graph;
  ClassAssignment assignment;
  std::vector<Candidate> candidates;  // current iteration proposals after filtering
  std::set<std::string> rejected;
  int iteration = 0;
  bool stable = false;
  double r = 0.001;
  std::map<std::string, int> snapshot;  // assignment at iteration start
  std::vector<std::string> audit;       // one JSON document per line
};

namespace detail {

inline void audit(PropagationState& st, nlohmann::ordered_json ev) {
  st.audit.push_back(ev.dump());
}

inline nlohmann::ordered_json event(int iteration, const char* kind) {
  nlohmann::ordered_json ev;
  ev["iteration"] = iteration;
  ev["event"] = kind;
  return ev;
}

// S_k for vertex v over assigned neighbors, optionally skipping v itself.
inline std::vector<double> class_scores(const SignificantGraph& g, const ClassAssignment& a, std::uint32_t v) {
  std::vector<double> s(a.classes.size(), 0.0);
  for (const auto& [u, w] : g.adj[v]) {
    auto c = a.class_of(g.vertices[u]);
    if (c) s[static_cast<std::size_t>(*c)] += w;
  }
  return s;
}

// Index of the strict maximum, or -1 on a tie for the top score.
inline int strict_argmax(const std::vector<double>& s) {
  int best = -1;
  double top = -1.0;
  bool tie = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] > top) {
      top = s[k];
      best = static_cast<int>(k);
      tie = false;
    } else if (s[k] == top) {
      tie = true;
    }
  }
  return tie || top <= 0.0 ? -1 : best;
}

}  // namespace detail

// Proposes every unassigned, non-rejected neighbor of the assigned set for its
// strict-maximum class. Sorted by hashtag.
inline std::vector<Candidate> propagate_step(const PropagationState& st) {
  const auto& g = *st.graph;
  std::set<std::uint32_t> frontier;
  for (const auto& [tag, x] : st.assignment.tags) {
    auto v = g.find(tag);
    if (!v) continue;
    for (const auto& [u, w] : g.adj[*v])
      if (!st.assignment.tags.count(g.vertices[u]) && !st.rejected.count(g.vertices[u])) frontier.insert(u);
  }
  std::vector<Candidate> out;
  for (auto v : frontier) {
    auto scores = detail::class_scores(g, st.assignment, v);
    const int k = detail::strict_argmax(scores);
    if (k < 0) continue;
    out.push_back({g.vertices[v], k, std::move(scores), g.counts[v]});
  }
  return out;
}

// Keeps candidate i for class k iff c_i > r * max_{assigned j in k} c_j.
inline std::vector<Candidate> occurrence_filter(const std::vector<Candidate>& candidates,
                                                const std::map<std::string, std::int64_t>& counts,
                                                const ClassAssignment& assignment, double r) {
  if (!(r > 0 && r < 1)) throw std::invalid_argument("occurrence threshold r must lie in (0,1)");
  std::vector<std::int64_t> class_max(assignment.classes.size(), 0);
  for (const auto& [tag, x] : assignment.tags) {
    auto it = counts.find(tag);
    const std::int64_t c = it == counts.end() ? 0 : it->second;
    auto& m = class_max[static_cast<std::size_t>(x.cls)];
    m = std::max(m, c);
  }
  std::vector<Candidate> out;
  for (const auto& cand : candidates) {
    auto it = counts.find(cand.hashtag);
    const std::int64_t c = it == counts.end() ? cand.count : it->second;
    if (static_cast<double>(c) > r * static_cast<double>(class_max[static_cast<std::size_t>(cand.cls)]))
      out.push_back(cand);
  }
  return out;
}

inline std::map<std::string, std::int64_t> graph_counts(const SignificantGraph& g) {
  std::map<std::string, std::int64_t> m;
  for (std::size_t i = 0; i < g.vertices.size(); ++i) m[g.vertices[i]] = g.counts[i];
  return m;
}

inline void validate_seeds(const SignificantGraph& g, const SeedAssignment& seeds) {
  if (seeds.num_classes() < 2) throw PropagationError("at least two seed classes are required");
  if (seeds.seeds.size() != seeds.classes.size()) throw PropagationError("seed class/list count mismatch");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < seeds.num_classes(); ++k) {
    if (seeds.seeds[k].empty()) throw PropagationError("class " + seeds.classes[k] + " has no seeds");
    for (const auto& t : seeds.seeds[k]) {
      if (!seen.insert(t).second) throw PropagationError("seed " + t + " appears in more than one class");
      if (!g.find(t)) throw PropagationError("seed " + t + " is not in the significant graph");
    }
  }
}

// Computes and filters proposals for the current iteration.
inline void open_iteration(PropagationState& st) {
  const auto proposals = propagate_step(st);
  for (const auto& c : proposals) {
    auto ev = detail::event(st.iteration, "propose");
    ev["hashtag"] = c.hashtag;
    ev["class"] = st.assignment.classes[static_cast<std::size_t>(c.cls)];
    ev["scores"] = c.scores;
    ev["count"] = c.count;
    detail::audit(st, std::move(ev));
  }
  st.candidates = occurrence_filter(proposals, graph_counts(*st.graph), st.assignment, st.r);
  std::set<std::string> kept;
  for (const auto& c : st.candidates) kept.insert(c.hashtag);
  for (const auto& c : proposals)
    if (!kept.count(c.hashtag)) {
      auto ev = detail::event(st.iteration, "filtered");
      ev["hashtag"] = c.hashtag;
      detail::audit(st, std::move(ev));
    }
}

inline PropagationState start_propagation(std::shared_ptr<const SignificantGraph> graph, const SeedAssignment& seeds,
                                          double r) {
  validate_seeds(*graph, seeds);
  PropagationState st;
  st.graph = std::move(graph);
  st.r = r;
  st.assignment.classes = seeds.classes;
  for (std::size_t k = 0; k < seeds.num_classes(); ++k)
    for (const auto& t : seeds.seeds[k]) {
      st.assignment.tags[t] = {static_cast<int>(k), Provenance::seed, 0};
      auto ev = detail::event(0, "seed");
      ev["hashtag"] = t;
      ev["class"] = seeds.classes[k];
      detail::audit(st, std::move(ev));
    }
  st.iteration = 1;
  st.snapshot = st.assignment.as_classes();
  open_iteration(st);
  return st;
}

struct CurationOutcome {
  std::size_t accepted = 0, rejected = 0;
  std::vector<std::string> diagnostics;  // decisions about non-candidates
};

// `automatic` marks accepts made without a human (provenance "propagated").
inline CurationOutcome apply_curation(PropagationState& st, const std::vector<Decision>& decisions,
                                      bool automatic = false) {
  CurationOutcome out;
  for (const auto& d : decisions) {
    auto it = std::find_if(st.candidates.begin(), st.candidates.end(),
                           [&](const Candidate& c) { return c.hashtag == d.hashtag; });
    if (it == st.candidates.end()) {
      out.diagnostics.push_back("'" + d.hashtag + "' is not a current candidate");
      continue;
    }
    auto ev = detail::event(st.iteration, "decision");
    ev["hashtag"] = d.hashtag;
    ev["class"] = st.assignment.classes[static_cast<std::size_t>(it->cls)];
    ev["decision"] = d.verdict == Verdict::accept ? "accept" : "reject";
    detail::audit(st, std::move(ev));
    if (d.verdict == Verdict::accept) {
      st.assignment.tags[d.hashtag] = {it->cls, automatic ? Provenance::propagated : Provenance::curated_in,
                                       st.iteration};
      ++out.accepted;
    } else {
      st.rejected.insert(d.hashtag);
      ++out.rejected;
    }
    st.candidates.erase(it);
  }
  return out;
}

// Removes non-seed tags whose own class is no longer the strict maximum of their
// neighbor scores; repeats until no tag is removed. Returns the pruned tags.
inline std::vector<std::string> consistency_prune(PropagationState& st) {
  const auto& g = *st.graph;
  std::vector<std::string> pruned;
  for (;;) {
    std::vector<std::string> violators;
    for (const auto& [tag, x] : st.assignment.tags) {
      if (x.provenance == Provenance::seed) continue;
      auto v = g.find(tag);
      if (!v) {
        violators.push_back(tag);
        continue;
      }
      if (detail::strict_argmax(detail::class_scores(g, st.assignment, *v)) != x.cls) violators.push_back(tag);
    }
    if (violators.empty()) break;
    for (const auto& t : violators) {
      auto ev = detail::event(st.iteration, "prune");
      ev["hashtag"] = t;
      ev["class"] = st.assignment.classes[static_cast<std::size_t>(st.assignment.tags[t].cls)];
      detail::audit(st, std::move(ev));
      st.assignment.tags.erase(t);
      pruned.push_back(t);
    }
  }
  return pruned;
}

// Closes the current iteration (prune, stability check) and opens the next one unless stable.
inline void advance_iteration(PropagationState& st) {
  consistency_prune(st);
  st.candidates.clear();
  st.stable = st.assignment.as_classes() == st.snapshot;
  auto ev = detail::event(st.iteration, "end");
  ev["assigned"] = st.assignment.tags.size();
  ev["stable"] = st.stable;
  detail::audit(st, std::move(ev));
  if (st.stable) return;
  ++st.iteration;
  st.snapshot = st.assignment.as_classes();
  open_iteration(st);
}

// Where curation decisions come from in batch runs.
class CurationSource {
 public:
  virtual ~CurationSource() = default;
  virtual std::vector<Decision> decide(const PropagationState& st) = 0;
  virtual bool automatic() const { return false; }
};

class AutoAcceptCuration : public CurationSource {
 public:
  std::vector<Decision> decide(const PropagationState& st) override {
    std::vector<Decision> d;
    for (const auto& c : st.candidates) d.push_back({c.hashtag, Verdict::accept});
    return d;
  }
  bool automatic() const override { return true; }
};

// Decisions file rows: iteration,hashtag,accept|reject (a header line is allowed).
class DecisionFileCuration : public CurationSource {
 public:
  DecisionFileCuration() = default;
  explicit DecisionFileCuration(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.rfind("iteration", 0) == 0) continue;
      auto f = csv::split(line);
      if (f.size() != 3) throw PropagationError("bad decisions row: " + line);
      Verdict v;
      if (f[2] == "accept")
        v = Verdict::accept;
      else if (f[2] == "reject")
        v = Verdict::reject;
      else
        throw PropagationError("decision must be accept or reject: " + line);
      by_iteration_[std::stoi(f[0])].push_back({normalize_hashtag(f[1]), v});
    }
  }
  std::vector<Decision> decide(const PropagationState& st) override {
    auto it = by_iteration_.find(st.iteration);
    return it == by_iteration_.end() ? std::vector<Decision>{} : it->second;
  }

 private:
  std::map<int, std::vector<Decision>> by_iteration_;
};

struct PropagationResult {
  ClassAssignment assignment;
  bool stable = false;
  int iterations = 0;
  std::vector<std::string> audit;
  std::vector<std::string> diagnostics;
};

inline PropagationResult run_until_stable(std::shared_ptr<const SignificantGraph> graph, const SeedAssignment& seeds,
                                          double r, CurationSource& curation, int max_iterations = 20) {
  PropagationState st = start_propagation(std::move(graph), seeds, r);
  PropagationResult res;
  for (;;) {
    auto outcome = apply_curation(st, curation.decide(st), curation.automatic());
    for (auto& d : outcome.diagnostics) res.diagnostics.push_back("iteration " + std::to_string(st.iteration) + ": " + d);
    const int current = st.iteration;
    advance_iteration(st);
    if (st.stable) break;
    if (current >= max_iterations) {
      st.candidates.clear();
      break;
    }
  }
  res.assignment = st.assignment;
  res.stable = st.stable;
  res.iterations = st.stable ? st.iteration : st.iteration - 1;
  res.audit = std::move(st.audit);
  return res;
}

// Rebuilds the assignment (tag -> class name) after `through_iteration` from an audit log.
inline std::map<std::string, std::string> replay_audit(const std::vector<std::string>& audit,
                                                       int through_iteration = INT32_MAX) {
  std::map<std::string, std::string> a;
  for (const auto& line : audit) {
    const auto ev = nlohmann::json::parse(line);
    if (ev.at("iteration").get<int>() > through_iteration) break;
    const auto kind = ev.at("event").get<std::string>();
    if (kind == "seed")
      a[ev.at("hashtag").get<std::string>()] = ev.at("class").get<std::string>();
    else if (kind == "decision" && ev.at("decision") == "accept")
      a[ev.at("hashtag").get<std::string>()] = ev.at("class").get<std::string>();
    else if (kind == "prune")
      a.erase(ev.at("hashtag").get<std::string>());
  }
  return a;
}

// Decisions file equivalent to the decision events of an audit log.
inline std::string decisions_from_audit(const std::vector<std::string>& audit) {
  std::string out = "iteration,hashtag,decision\n";
  for (const auto& line : audit) {
    const auto ev = nlohmann::json::parse(line);
    if (ev.at("event") != "decision") continue;
    out += std::to_string(ev.at("iteration").get<int>()) + "," + ev.at("hashtag").get<std::string>() + "," +
           ev.at("decision").get<std::string>() + "\n";
  }
  return out;
}

// Random subsample holding `fraction` of the tags of each class (at least one per class).
inline ClassAssignment subsample_assignment(const ClassAssignment& a, double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ClassAssignment out;
  out.classes = a.classes;
  for (std::size_t k = 0; k < a.classes.size(); ++k) {
    std::vector<std::string> tags;
    for (const auto& [t, x] : a.tags)
      if (x.cls == static_cast<int>(k)) tags.push_back(t);
    std::shuffle(tags.begin(), tags.end(), rng);
    const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(tags.size()))));
    for (std::size_t i = 0; i < std::min(keep, tags.size()); ++i) out.tags[tags[i]] = a.tags.at(tags[i]);
  }
  return out;
}

}  // namespace optrend
