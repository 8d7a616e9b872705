#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "optrend/corpus.hpp"
#include "optrend/csv.hpp"

namespace optrend {

inline const std::set<std::string>& default_excluded_accounts() {
  static const std::set<std::string> kAccounts = {"realdonaldtrump", "hillaryclinton"};
  return kAccounts;
}

// Directed influence graph of one day. Edge u -> v means v retweeted, replied to,
// mentioned or quoted u. Node ids are indices into the sorted `users` vector.
struct DailyGraph {
  Day day{};
  std::vector<std::string> users;                 // sorted, unique
  std::vector<std::vector<std::uint32_t>> out;    // sorted, unique, no self-loops

  std::size_t num_nodes() const { return users.size(); }
  std::size_t num_edges() const {
    std::size_t n = 0;
    for (const auto& o : out) n += o.size();
    return n;
  }
  std::uint32_t index_of(const std::string& user) const {
    auto it = std::lower_bound(users.begin(), users.end(), user);
    if (it == users.end() || *it != user) throw std::out_of_range("unknown user " + user);
    return static_cast<std::uint32_t>(it - users.begin());
  }
};

// Builds a graph from explicit (from, to) pairs plus isolated interacting nodes.
inline DailyGraph make_graph(Day day, const std::vector<std::pair<std::string, std::string>>& edges,
                             const std::vector<std::string>& extra_nodes = {}) {
  DailyGraph g;
  g.day = day;
  for (const auto& [a, b] : edges) {
    g.users.push_back(a);
    g.users.push_back(b);
  }
  g.users.insert(g.users.end(), extra_nodes.begin(), extra_nodes.end());
  std::sort(g.users.begin(), g.users.end());
  g.users.erase(std::unique(g.users.begin(), g.users.end()), g.users.end());
  g.out.assign(g.users.size(), {});
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    g.out[g.index_of(a)].push_back(g.index_of(b));
  }
  for (auto& o : g.out) {
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
  }
  return g;
}

inline DailyGraph build_daily_graph(const CorpusWindow& c, Day day,
                                    const std::set<std::string>& excluded = default_excluded_accounts()) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> interacting;
  for (const auto& r : c.on(day)) {
    if (excluded.count(r.user_id)) continue;
    bool any = false;
    auto link = [&](const std::string& target) {
      if (target == r.user_id) return;
      any = true;
      if (!excluded.count(target)) edges.emplace_back(target, r.user_id);
    };
    if (r.retweet_of) link(*r.retweet_of);
    if (r.reply_to) link(*r.reply_to);
    if (r.quote_of) link(*r.quote_of);
    for (const auto& m : r.mentions) link(m);
    if (any) interacting.push_back(r.user_id);
  }
  return make_graph(day, edges, interacting);
}

// Strongly connected components, iterative Tarjan. Returns component id per node.
inline std::vector<std::uint32_t> strongly_connected_components(const DailyGraph& g, std::uint32_t* count = nullptr) {
  const auto n = static_cast<std::uint32_t>(g.num_nodes());
  constexpr std::uint32_t kUnset = UINT32_MAX;
  std::vector<std::uint32_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<std::uint32_t> stack;
  std::vector<bool> on_stack(n, false);
  struct Frame {
    std::uint32_t v;
    std::size_t next;
  };
  std::vector<Frame> call;
  std::uint32_t next_index = 0, next_comp = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& adj = g.out[f.v];
      if (f.next < adj.size()) {
        const std::uint32_t w = adj[f.next++];
        if (index[w] == kUnset) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::uint32_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != v);
        ++next_comp;
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

// Weakly connected components via union-find.
inline std::vector<std::uint32_t> weakly_connected_components(const DailyGraph& g) {
  const auto n = static_cast<std::uint32_t>(g.num_nodes());
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::uint32_t v = 0; v < n; ++v)
    for (std::uint32_t w : g.out[v]) {
      auto a = find(v), b = find(w);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::uint32_t> comp(n);
  for (std::uint32_t v = 0; v < n; ++v) comp[v] = find(v);
  return comp;
}

struct ComponentDecomposition {
  std::vector<std::string> scgc;    // sorted
  std::vector<std::string> wcgc;    // sorted, superset of scgc
  std::vector<std::string> corona;  // sorted, interacting nodes outside wcgc
};

namespace detail {

// Picks the label with the most members among nodes where `eligible` holds; ties go to
// the component whose smallest member id sorts first. Components below min_size are ignored.
template <typename Eligible>
std::vector<std::uint32_t> largest_component(const std::vector<std::uint32_t>& label, std::size_t min_size,
                                             Eligible&& eligible) {
  std::unordered_map<std::uint32_t, std::pair<std::size_t, std::uint32_t>> stats;  // size, min node
  for (std::uint32_t v = 0; v < label.size(); ++v) {
    if (!eligible(v)) continue;
    auto [it, inserted] = stats.try_emplace(label[v], 0, v);
    ++it->second.first;
    it->second.second = std::min(it->second.second, v);
  }
  bool found = false;
  std::uint32_t best = 0;
  std::pair<std::size_t, std::uint32_t> best_stat{0, 0};
  for (const auto& [lab, st] : stats) {
    if (st.first < min_size) continue;
    if (!found || st.first > best_stat.first || (st.first == best_stat.first && st.second < best_stat.second)) {
      found = true;
      best = lab;
      best_stat = st;
    }
  }
  std::vector<std::uint32_t> members;
  if (!found) return members;
  for (std::uint32_t v = 0; v < label.size(); ++v)
    if (eligible(v) && label[v] == best) members.push_back(v);
  return members;
}

}  // namespace detail

// WCGC is the largest weakly connected component with at least two nodes; SCGC is the
// largest strongly connected component with at least two nodes inside the WCGC.
inline ComponentDecomposition decompose_components(const DailyGraph& g) {
  ComponentDecomposition d;
  const auto weak = weakly_connected_components(g);
  const auto wc = detail::largest_component(weak, 2, [](std::uint32_t) { return true; });
  std::vector<bool> in_wc(g.num_nodes(), false);
  for (auto v : wc) in_wc[v] = true;
  const auto strong = strongly_connected_components(g);
  const auto sc = detail::largest_component(strong, 2, [&](std::uint32_t v) { return in_wc[v]; });
  for (auto v : sc) d.scgc.push_back(g.users[v]);
  for (auto v : wc) d.wcgc.push_back(g.users[v]);
  for (std::uint32_t v = 0; v < g.num_nodes(); ++v)
    if (!in_wc[v]) d.corona.push_back(g.users[v]);
  return d;
}

struct ComponentDayRow {
  Day day{};
  std::size_t scgc_size = 0, wcgc_size = 0, corona_size = 0;
  std::size_t scgc_new = 0, wcgc_new = 0, corona_new = 0;
};

struct ComponentSeries {
  std::vector<ComponentDayRow> rows;

  std::string to_csv() const {
    csv::Writer w({"day", "scgc_size", "wcgc_size", "corona_size", "scgc_new", "wcgc_new", "corona_new"});
    for (const auto& r : rows)
      w.row({format_day(r.day), std::to_string(r.scgc_size), std::to_string(r.wcgc_size),
             std::to_string(r.corona_size), std::to_string(r.scgc_new), std::to_string(r.wcgc_new),
             std::to_string(r.corona_new)});
    return w.str();
  }
};

// Per-day component sizes. A user is "new" on the first day they appear in any daily
// graph and is credited to every compartment holding them that day (SCGC members also
// count toward the WCGC).
inline ComponentSeries component_size_series(const CorpusWindow& c,
                                             std::vector<ComponentDecomposition>* decompositions = nullptr,
                                             const std::set<std::string>& excluded = default_excluded_accounts()) {
  ComponentSeries s;
  std::unordered_set<std::string> seen;
  if (c.empty_window()) return s;
  for (Day d = c.start_day(); d <= c.end_day(); ++d) {
    const auto dec = decompose_components(build_daily_graph(c, d, excluded));
    ComponentDayRow row;
    row.day = d;
    row.scgc_size = dec.scgc.size();
    row.wcgc_size = dec.wcgc.size();
    row.corona_size = dec.corona.size();
    std::unordered_set<std::string> fresh;
    for (const auto* part : {&dec.wcgc, &dec.corona})
      for (const auto& u : *part)
        if (!seen.count(u)) fresh.insert(u);
    for (const auto& u : dec.scgc) row.scgc_new += fresh.count(u);
    for (const auto& u : dec.wcgc) row.wcgc_new += fresh.count(u);
    for (const auto& u : dec.corona) row.corona_new += fresh.count(u);
    seen.insert(fresh.begin(), fresh.end());
    s.rows.push_back(row);
    if (decompositions) decompositions->push_back(dec);
  }
  return s;
}

}  // namespace optrend
