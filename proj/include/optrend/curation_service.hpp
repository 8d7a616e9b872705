#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "optrend/cooccurrence.hpp"
#include "optrend/csv.hpp"
#include "optrend/hash.hpp"
#include "optrend/pipeline.hpp"
#include "optrend/propagation.hpp"

namespace optrend {

// CSV text to an array of row objects; numeric fields become numbers and "NA" null.
inline nlohmann::ordered_json csv_to_json(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto rows = nlohmann::ordered_json::array();
  if (!std::getline(in, line)) return rows;
  const auto header = csv::split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < header.size() && i < f.size(); ++i) {
      if (f[i] == "NA") {
        row[header[i]] = nullptr;
        continue;
      }
      try {
        row[header[i]] = csv::parse_double(f[i]);
      } catch (const std::exception&) {
        row[header[i]] = f[i];
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// One interactive curation session over a significance graph plus read-only series
// documents. Reads may run concurrently; state changes hold an exclusive lock.
class CurationService {
 public:
  CurationService(std::shared_ptr<const SignificantGraph> graph, const SeedAssignment& seeds, double r,
                  std::vector<int> community = {}, std::string audit_path = {}, int max_iterations = 20)
      : community_(std::move(community)), audit_path_(std::move(audit_path)), max_iterations_(max_iterations) {
    state_ = start_propagation(std::move(graph), seeds, r);
    session_id_ = "session-" + sha256_hex(format_seeds(seeds) + std::to_string(r)).substr(0, 12);
    if (!audit_path_.empty()) std::ofstream(audit_path_, std::ios::trunc);
    flush_audit();
  }

  void set_series(const std::string& name, nlohmann::ordered_json doc) {
    std::unique_lock lock(mu_);
    series_[name] = std::move(doc);
  }

  nlohmann::ordered_json state() const {
    std::shared_lock lock(mu_);
    return state_locked();
  }

  nlohmann::ordered_json candidates() const {
    std::shared_lock lock(mu_);
    return candidates_locked();
  }

  nlohmann::ordered_json graph() const {
    std::shared_lock lock(mu_);
    return node_link_json(*state_.graph, community_, state_.assignment.as_names());
  }

  std::optional<nlohmann::ordered_json> series(const std::string& name) const {
    std::shared_lock lock(mu_);
    auto it = series_.find(name);
    if (it == series_.end()) return std::nullopt;
    return it->second;
  }

  const PropagationState& raw_state() const { return state_; }
  std::vector<std::string> audit() const {
    std::shared_lock lock(mu_);
    return state_.audit;
  }

  // Body: {"iteration": n (optional), "decisions": [{"hashtag": "...", "decision": "accept"|"reject"}]}.
  // Every item must name a current candidate, otherwise nothing is applied and 409 returned.
  std::pair<int, nlohmann::ordered_json> post_decisions(const std::string& body) {
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(body);
    } catch (const std::exception& e) {
      return {400, error("malformed JSON body: " + std::string(e.what()))};
    }
    std::vector<Decision> decisions;
    try {
      for (const auto& d : req.at("decisions")) {
        const auto verdict = d.at("decision").get<std::string>();
        if (verdict != "accept" && verdict != "reject") return {400, error("decision must be accept or reject")};
        decisions.push_back({normalize_hashtag(d.at("hashtag").get<std::string>()),
                             verdict == "accept" ? Verdict::accept : Verdict::reject});
      }
    } catch (const std::exception& e) {
      return {400, error("bad decisions body: " + std::string(e.what()))};
    }
    std::unique_lock lock(mu_);
    if (finished()) return {409, error("session has ended")};
    if (req.contains("iteration") && req["iteration"].get<int>() != state_.iteration)
      return {409, error("stale iteration " + std::to_string(req["iteration"].get<int>()) + ", current is " +
                         std::to_string(state_.iteration))};
    std::set<std::string> seen;
    for (const auto& d : decisions) {
      const bool candidate = std::any_of(state_.candidates.begin(), state_.candidates.end(),
                                         [&](const Candidate& c) { return c.hashtag == d.hashtag; });
      if (!candidate) return {409, error("'" + d.hashtag + "' is not a current candidate")};
      if (!seen.insert(d.hashtag).second) return {409, error("duplicate decision for '" + d.hashtag + "'")};
    }
    const auto outcome = apply_curation(state_, decisions, false);
    flush_audit();
    auto res = state_locked();
    res["accepted"] = outcome.accepted;
    res["rejected_now"] = outcome.rejected;
    return {200, res};
  }

  // Closes the iteration: prune, stability check, next proposals.
  std::pair<int, nlohmann::ordered_json> post_iterate() {
    std::unique_lock lock(mu_);
    if (finished()) return {409, error("session has ended")};
    const int current = state_.iteration;
    advance_iteration(state_);
    if (!state_.stable && current >= max_iterations_) {
      state_.candidates.clear();
      capped_ = true;
    }
    flush_audit();
    return {200, state_locked()};
  }

  void mount(httplib::Server& srv) {
    auto send = [](httplib::Response& res, int status, const nlohmann::ordered_json& body) {
      res.status = status;
      res.set_content(body.dump(), "application/json");
    };
    srv.Get("/session/state", [this, send](const httplib::Request&, httplib::Response& res) { send(res, 200, state()); });
    srv.Get("/session/candidates",
            [this, send](const httplib::Request&, httplib::Response& res) { send(res, 200, candidates()); });
    srv.Get("/session/graph", [this, send](const httplib::Request&, httplib::Response& res) { send(res, 200, graph()); });
    srv.Post("/session/decisions", [this, send](const httplib::Request& req, httplib::Response& res) {
      auto [status, body] = post_decisions(req.body);
      send(res, status, body);
    });
    srv.Post("/session/iterate", [this, send](const httplib::Request&, httplib::Response& res) {
      auto [status, body] = post_iterate();
      send(res, status, body);
    });
    for (const auto* name : {"opinion", "polls", "fit", "baselines"}) {
      srv.Get(std::string("/series/") + name, [this, send, name](const httplib::Request&, httplib::Response& res) {
        if (auto doc = series(name))
          send(res, 200, *doc);
        else
          send(res, 404, error(std::string("series '") + name + "' is not available"));
      });
    }
  }

  // Fills the series documents from a pipeline output directory; absent artifacts are skipped.
  void load_series(const std::filesystem::path& dir, const std::string& scope = "whole") {
    auto csv_doc = [&](const std::string& artifact) -> std::optional<nlohmann::ordered_json> {
      auto p = manifest_artifact(dir, artifact);
      if (!p) return std::nullopt;
      return csv_to_json(read_file(p->string()));
    };
    auto json_doc = [&](const std::string& artifact) -> std::optional<nlohmann::ordered_json> {
      auto p = manifest_artifact(dir, artifact);
      if (!p) return std::nullopt;
      return nlohmann::ordered_json::parse(read_file(p->string()));
    };
    if (auto d = csv_doc("opinion_" + scope + ".csv")) set_series("opinion", {{"scope", scope}, {"rows", *d}});
    if (auto d = csv_doc("polls.csv")) set_series("polls", {{"rows", *d}});
    if (auto f = json_doc("fit.json")) {
      nlohmann::ordered_json doc{{"fit", *f}};
      if (auto s = csv_doc("sweep.csv")) doc["sweep"] = *s;
      if (auto p = csv_doc("fit_plot.csv")) doc["rows"] = *p;
      if (auto fc = json_doc("forecast.json")) doc["forecast"] = *fc;
      set_series("fit", std::move(doc));
    }
    if (auto b = csv_doc("baselines.csv")) {
      nlohmann::ordered_json doc{{"rows", *b}};
      if (auto f = json_doc("baselines.json")) doc["fits"] = *f;
      set_series("baselines", std::move(doc));
    }
  }

 private:
  static nlohmann::ordered_json error(const std::string& msg) { return {{"error", msg}}; }

  bool finished() const { return state_.stable || capped_; }

  nlohmann::ordered_json state_locked() const {
    nlohmann::ordered_json j;
    j["session_id"] = session_id_;
    j["iteration"] = state_.iteration;
    j["stable"] = state_.stable;
    j["finished"] = finished();
    j["r"] = state_.r;
    j["classes"] = state_.assignment.classes;
    auto tags = nlohmann::ordered_json::array();
    for (const auto& [t, a] : state_.assignment.tags)
      tags.push_back({{"hashtag", t},
                      {"class", state_.assignment.classes[static_cast<std::size_t>(a.cls)]},
                      {"provenance", to_string(a.provenance)},
                      {"iteration", a.iteration}});
    j["assignment"] = std::move(tags);
    j["rejected"] = state_.rejected;
    j["pending_candidates"] = state_.candidates.size();
    j["audit_events"] = state_.audit.size();
    return j;
  }

  nlohmann::ordered_json candidates_locked() const {
    const auto& g = *state_.graph;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : state_.candidates) {
      std::vector<std::pair<double, std::string>> nb;
      if (auto v = g.find(c.hashtag))
        for (const auto& [u, s] : g.adj[*v])
          if (state_.assignment.tags.count(g.vertices[u])) nb.emplace_back(s, g.vertices[u]);
      std::sort(nb.begin(), nb.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      if (nb.size() > 5) nb.resize(5);
      auto top = nlohmann::ordered_json::array();
      for (const auto& [s, t] : nb)
        top.push_back({{"hashtag", t},
                       {"class", state_.assignment.classes[static_cast<std::size_t>(*state_.assignment.class_of(t))]},
                       {"s", s}});
      arr.push_back({{"hashtag", c.hashtag},
                     {"class", state_.assignment.classes[static_cast<std::size_t>(c.cls)]},
                     {"count", c.count},
                     {"scores", c.scores},
                     {"top_neighbors", std::move(top)}});
    }
    return {{"iteration", state_.iteration}, {"candidates", std::move(arr)}};
  }

  void flush_audit() {
    if (audit_path_.empty()) {
      written_ = state_.audit.size();
      return;
    }
    std::ofstream out(audit_path_, std::ios::app);
    for (; written_ < state_.audit.size(); ++written_) out << state_.audit[written_] << '\n';
  }

  mutable std::shared_mutex mu_;
  PropagationState state_;
  std::vector<int> community_;
  std::string audit_path_;
  std::size_t written_ = 0;
  int max_iterations_;
  bool capped_ = false;
  std::string session_id_;
  std::map<std::string, nlohmann::ordered_json> series_;
};

}  // namespace optrend
