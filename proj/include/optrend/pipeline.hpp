#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "optrend/attention.hpp"
#include "optrend/classifier.hpp"
#include "optrend/community.hpp"
#include "optrend/cooccurrence.hpp"
#include "optrend/corpus.hpp"
#include "optrend/features.hpp"
#include "optrend/hash.hpp"
#include "optrend/interaction_graph.hpp"
#include "optrend/opinion_series.hpp"
#include "optrend/poll_align.hpp"
#include "optrend/propagation.hpp"

namespace optrend {

struct PipelineError : std::runtime_error {
  std::string stage;
  PipelineError(std::string stage_name, const std::string& what)
      : std::runtime_error("stage '" + stage_name + "' failed: " + what), stage(std::move(stage_name)) {}
};

struct PipelineConfig {
  std::string corpus;
  std::string polls;
  std::string seeds;
  std::string decisions;  // required when curation = "file"
  std::string output_dir = "optrend-out";
  std::string start, end;    // corpus window; empty = span of the data
  std::string train_until;   // forecast split; empty = two thirds into the poll span

  std::string curation = "file";  // file | auto
  double p0 = 1e-6;
  double r = 0.001;
  int window = 13;
  std::string windows = "1:2:41";
  int td_min = 0, td_max = 30;
  int horizon = 7;
  int forecast_window = 9;
  std::string lambdas = "1e-6,1e-5,1e-4,1e-3,1e-2,1e-1,1,10,100";
  int folds = 10;
  std::uint64_t seed = 1;
  std::string scope = "whole";
  bool official_only_training = true;
  double abstain_margin = 0.0;
  double sentiment_lambda = 1e-3;

  std::string host = "127.0.0.1";
  int port = 8080;

  std::vector<double> lambda_grid() const {
    std::vector<double> out;
    for (const auto& f : csv::split(lambdas, ',')) out.push_back(csv::parse_double(f));
    if (out.empty()) throw std::invalid_argument("empty lambda grid");
    for (double l : out)
      if (!(l > 0)) throw std::invalid_argument("lambda values must be positive");
    return out;
  }

  // Checks parameter domains and the inputs needed before the first stage. The poll file is
  // checked by the fit stage, so that a missing poll feed still yields every earlier artifact.
  void validate() const {
    namespace fs = std::filesystem;
    auto need = [](const std::string& what, const std::string& p) {
      if (p.empty()) throw std::invalid_argument(what + " path is not set");
      if (!fs::exists(p)) throw std::invalid_argument(what + " file does not exist: " + p);
    };
    need("corpus", corpus);
    need("seeds", seeds);
    if (curation == "file")
      need("decisions", decisions);
    else if (curation != "auto")
      throw std::invalid_argument("curation must be 'file' or 'auto'");
    if (!(p0 > 0 && p0 < 1)) throw std::invalid_argument("p0 must lie in (0,1)");
    if (!(r > 0 && r < 1)) throw std::invalid_argument("r must lie in (0,1)");
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("window must be odd and positive");
    if (forecast_window < 1 || forecast_window % 2 == 0)
      throw std::invalid_argument("forecast window must be odd and positive");
    if (td_min < 0 || td_min > td_max) throw std::invalid_argument("bad delay range");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
    parse_window_grid(windows);
    lambda_grid();
    scope_from_string(scope);
    if (!start.empty()) parse_day(start);
    if (!end.empty()) parse_day(end);
    if (!train_until.empty()) parse_day(train_until);
  }

  nlohmann::ordered_json to_json() const {
    return {{"corpus", corpus},       {"polls", polls},
            {"seeds", seeds},         {"decisions", decisions},
            {"output_dir", output_dir}, {"start", start},
            {"end", end},             {"train_until", train_until},
            {"curation", curation},   {"p0", p0},
            {"r", r},                 {"window", window},
            {"windows", windows},     {"td_min", td_min},
            {"td_max", td_max},       {"horizon", horizon},
            {"forecast_window", forecast_window}, {"lambdas", lambdas},
            {"folds", folds},         {"seed", seed},
            {"scope", scope},         {"official_only_training", official_only_training},
            {"abstain_margin", abstain_margin}, {"sentiment_lambda", sentiment_lambda}};
  }
};

// Content-addressed output directory. Every artifact is written once under a name that
// embeds its SHA-256 prefix; the manifest maps stages to their artifacts.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    manifest_["format"] = "optrend-manifest";
    manifest_["version"] = 1;
    manifest_["stages"] = nlohmann::ordered_json::array();
  }

  const std::filesystem::path& dir() const { return dir_; }

  void begin_stage(const std::string& stage, nlohmann::ordered_json parameters = nlohmann::ordered_json::object()) {
    current_ = {{"stage", stage}, {"status", "running"}, {"parameters", std::move(parameters)},
                {"artifacts", nlohmann::ordered_json::array()}};
  }

  std::filesystem::path put(const std::string& name, const std::string& content) {
    const std::string digest = sha256_hex(content);
    const auto dot = name.find('.');
    const std::string stem = name.substr(0, dot), ext = dot == std::string::npos ? "" : name.substr(dot);
    const std::string file = stem + "." + digest.substr(0, 16) + ext;
    const auto path = dir_ / file;
    if (!std::filesystem::exists(path)) write_file(path.string(), content);
    current_["artifacts"].push_back({{"name", name}, {"path", file}, {"sha256", digest}, {"bytes", content.size()}});
    return path;
  }

  void end_stage(const std::string& status, const std::string& error = {}) {
    current_["status"] = status;
    if (!error.empty()) current_["error"] = error;
    manifest_["stages"].push_back(current_);
    save();
  }

  void set(const std::string& key, nlohmann::ordered_json value) { manifest_[key] = std::move(value); }

  void save() const { write_file((dir_ / "manifest.json").string(), manifest_.dump(2) + "\n"); }

  const nlohmann::ordered_json& manifest() const { return manifest_; }

 private:
  std::filesystem::path dir_;
  nlohmann::ordered_json manifest_;
  nlohmann::ordered_json current_;
};

// Looks up an artifact path recorded in a manifest file.
inline std::optional<std::filesystem::path> manifest_artifact(const std::filesystem::path& dir,
                                                              const std::string& name) {
  const auto mpath = dir / "manifest.json";
  if (!std::filesystem::exists(mpath)) return std::nullopt;
  const auto m = nlohmann::json::parse(read_file(mpath.string()));
  for (const auto& st : m.at("stages"))
    for (const auto& a : st.at("artifacts"))
      if (a.at("name") == name) return dir / a.at("path").get<std::string>();
  return std::nullopt;
}

inline std::optional<nlohmann::json> manifest_stage_parameters(const std::filesystem::path& dir,
                                                               const std::string& stage) {
  const auto mpath = dir / "manifest.json";
  if (!std::filesystem::exists(mpath)) return std::nullopt;
  const auto m = nlohmann::json::parse(read_file(mpath.string()));
  for (const auto& st : m.at("stages"))
    if (st.at("stage") == stage) return st.at("parameters");
  return std::nullopt;
}

// Everything a run produced, kept in memory for callers such as the HTTP service.
struct PipelineProducts {
  CorpusWindow corpus;
  std::vector<ComponentDecomposition> decompositions;
  std::shared_ptr<SignificantGraph> graph;
  CommunityPartition communities;
  PropagationResult propagation;
  TrainingSet training;
  CVReport cv;
  ModelParams model;
  OpinionSeries opinion;
  std::optional<PollSeries> polls;
  std::optional<AlignedFit> fit;
  std::vector<AlignedFit> sweep;
  std::optional<ForecastReport> forecast;
  std::optional<std::string> forecast_skipped;
  std::map<std::string, DailySeries> metrics;  // opinion plus the three attention baselines
  nlohmann::ordered_json baseline_fits;
};

// Smoothed metric against polls, with its own delayed affine fit and the raw correlation.
inline nlohmann::ordered_json metric_against_polls(const DailySeries& metric, const DailySeries& polls, int w,
                                                   DelayRange range) {
  nlohmann::ordered_json j;
  const auto smooth = backward_moving_average(metric, w);
  std::vector<std::optional<double>> x, y;
  for (std::size_t i = 0; i < polls.size(); ++i) {
    x.push_back(smooth.at(polls.start + static_cast<std::int32_t>(i)));
    y.push_back(polls.values[i]);
  }
  try {
    const auto pr = pearson_rmse(x, y);
    j["unfitted_pearson_r"] = pr.r ? nlohmann::ordered_json(*pr.r) : nlohmann::ordered_json(nullptr);
  } catch (const std::exception&) {
    j["unfitted_pearson_r"] = nullptr;
  }
  try {
    j["fit"] = fit_affine_delay(smooth, polls, w, range).to_json();
  } catch (const FitError& e) {
    j["fit"] = nullptr;
    j["fit_error"] = e.what();
  }
  return j;
}

namespace detail {

template <typename F>
void run_stage(ArtifactStore& store, const std::string& stage, nlohmann::ordered_json params, F&& body) {
  store.begin_stage(stage, std::move(params));
  try {
    body();
  } catch (const std::exception& e) {
    store.end_stage("failed", e.what());
    throw PipelineError(stage, e.what());
  }
  store.end_stage("ok");
}

inline std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

// corpus -> graphs -> cooccur -> propagate -> trainset -> train -> opinion -> fit -> baselines
inline PipelineProducts run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  ArtifactStore store(cfg.output_dir);
  store.set("seed", cfg.seed);
  store.set("config", cfg.to_json());
  PipelineProducts out;
  const FilterSpec filter = FilterSpec::defaults();

  detail::run_stage(store, "corpus", {{"start", cfg.start}, {"end", cfg.end}}, [&] {
    std::optional<Day> s, e;
    if (!cfg.start.empty()) s = parse_day(cfg.start);
    if (!cfg.end.empty()) e = parse_day(cfg.end);
    auto loaded = load_corpus(cfg.corpus, s, e);
    if (loaded.window.size() == 0) throw CorpusError("corpus holds no records");
    out.corpus = std::move(loaded.window);
    store.put("corpus.jsonl", serialize_corpus(out.corpus));
    store.put("load_report.json", detail::json_text({{"lines", loaded.report.lines},
                                                     {"loaded", loaded.report.loaded},
                                                     {"malformed", loaded.report.malformed},
                                                     {"diagnostics", loaded.report.diagnostics}}));
  });

  detail::run_stage(store, "graphs", {{"excluded", default_excluded_accounts()}}, [&] {
    store.put("components.csv", component_size_series(out.corpus, &out.decompositions).to_csv());
  });

  detail::run_stage(store, "cooccur", {{"p0", cfg.p0}, {"seed", cfg.seed}}, [&] {
    CooccurrenceOptions opt;
    opt.p0 = cfg.p0;
    out.graph = std::make_shared<SignificantGraph>(build_significant_graph(out.corpus, opt));
    out.communities = detect_communities(*out.graph, cfg.seed);
    store.put("edges.csv", edges_csv(*out.graph));
    store.put("vertices.csv", vertices_csv(*out.graph, out.communities.community));
    store.put("graph.json", detail::json_text({{"p0", out.graph->p0},
                                               {"total_tweets", out.graph->total_tweets},
                                               {"raw_vertices", out.graph->raw_vertices},
                                               {"raw_edges", out.graph->raw_edges},
                                               {"vertices", out.graph->num_vertices()},
                                               {"edges", out.graph->edges.size()},
                                               {"modularity", out.communities.modularity},
                                               {"communities", out.communities.num_communities()}}));
  });

  detail::run_stage(store, "propagate", {{"r", cfg.r}, {"curation", cfg.curation}}, [&] {
    std::ifstream sin(cfg.seeds);
    const auto seeds = parse_seeds(sin);
    std::unique_ptr<CurationSource> source;
    if (cfg.curation == "auto") {
      source = std::make_unique<AutoAcceptCuration>();
    } else {
      std::ifstream din(cfg.decisions);
      source = std::make_unique<DecisionFileCuration>(din);
    }
    out.propagation = run_until_stable(out.graph, seeds, cfg.r, *source);
    store.put("assignment.csv", assignment_csv(out.propagation.assignment));
    std::string audit;
    for (const auto& l : out.propagation.audit) audit += l + "\n";
    store.put("audit.jsonl", audit);
    store.put("propagation.json", detail::json_text({{"stable", out.propagation.stable},
                                                     {"iterations", out.propagation.iterations},
                                                     {"assigned", out.propagation.assignment.tags.size()},
                                                     {"diagnostics", out.propagation.diagnostics}}));
  });

  detail::run_stage(store, "trainset", {{"seed", cfg.seed}, {"official_only", cfg.official_only_training}}, [&] {
    out.training = build_training_set(out.corpus, out.propagation.assignment, cfg.seed,
                                      cfg.official_only_training ? &filter : nullptr);
    store.put("trainset.jsonl", training_set_jsonl(out.training));
  });

  detail::run_stage(store, "train", {{"lambdas", cfg.lambdas}, {"folds", cfg.folds}, {"seed", cfg.seed}}, [&] {
    out.cv = cross_validate(out.training, cfg.lambda_grid(), cfg.folds, cfg.seed);
    out.model = train(out.training, out.cv.chosen_lambda, cfg.seed);
    store.put("cv.json", detail::json_text(cv_report_json(out.cv)));
    store.put("model.json", model_to_json(out.model));
  });

  detail::run_stage(store, "opinion", {{"scope", cfg.scope}, {"abstain_margin", cfg.abstain_margin}}, [&] {
    const auto tc = classify_corpus(out.corpus, out.model, cfg.abstain_margin);
    for (const auto* s : {"whole", "wcgc", "scgc"}) {
      auto series = daily_ratio_series(out.corpus, tc, out.model.classes, scope_from_string(s), &out.decompositions);
      store.put(std::string("opinion_") + s + ".csv", series.to_csv());
      if (cfg.scope == s) out.opinion = std::move(series);
    }
    const auto cum = cumulative_opinion(out.corpus, tc);
    const auto act = activity_stats(out.corpus, tc, out.model.classes);
    auto beh = behavior_correlations(out.opinion);
    beh.cumulative_shares = cum.shares;
    beh.cumulative_unclassified = cum.unclassified_share;
    beh.sweep = act.sweep;
    auto bj = beh.to_json(out.model.classes);
    bj["mean_tweets_per_user_day"] = act.mean_daily_mean;
    store.put("behavior.json", detail::json_text(bj));
  });

  const DelayRange range{cfg.td_min, cfg.td_max};
  detail::run_stage(store, "fit",
                    {{"window", cfg.window},
                     {"windows", cfg.windows},
                     {"td_min", cfg.td_min},
                     {"td_max", cfg.td_max},
                     {"horizon", cfg.horizon},
                     {"forecast_window", cfg.forecast_window},
                     {"train_until", cfg.train_until}},
                    [&] {
                      if (cfg.polls.empty()) throw FitError("polls path is not set");
                      if (!std::filesystem::exists(cfg.polls)) throw FitError("poll file does not exist: " + cfg.polls);
                      out.polls = load_polls_csv(read_file(cfg.polls));
                      if (out.polls->share_a.empty()) throw FitError("poll file holds no usable rows");
                      store.put("polls.csv", out.polls->to_csv());
                      const auto raw = out.opinion.ratio_series(0);
                      const auto smooth = backward_moving_average(raw, cfg.window);
                      out.fit = fit_affine_delay(smooth, out.polls->share_a, cfg.window, range);
                      const auto fit_b = fit_affine_delay(smooth.complement(), out.polls->share_b(), cfg.window, range);
                      store.put("fit.json", detail::json_text({{"A", out.fit->to_json()}, {"B", fit_b.to_json()}}));
                      store.put("fit_plot.csv", fit_plot_csv(smooth, out.polls->share_a, *out.fit));
                      out.sweep = sweep_window(raw, out.polls->share_a, parse_window_grid(cfg.windows), range);
                      store.put("sweep.csv", sweep_csv(out.sweep));
                      Day split = cfg.train_until.empty()
                                      ? out.polls->share_a.start +
                                            static_cast<std::int32_t>(2 * out.polls->share_a.size() / 3)
                                      : parse_day(cfg.train_until);
                      // A lead too short for the horizon is a property of the data, not a failure
                      // of the fit, so it is reported alongside the other artifacts.
                      try {
                        out.forecast =
                            forecast(raw, out.polls->share_a, split, cfg.forecast_window, cfg.horizon, range);
                        store.put("forecast.csv", out.forecast->to_csv());
                        store.put("forecast.json", detail::json_text(out.forecast->to_json()));
                      } catch (const ForecastError& e) {
                        out.forecast_skipped = e.what();
                        store.put("forecast.json", detail::json_text({{"skipped", e.what()},
                                                                     {"horizon", cfg.horizon},
                                                                     {"train_until", format_day(split)}}));
                      }
                    });

  detail::run_stage(store, "baselines", {{"sentiment_lambda", cfg.sentiment_lambda}, {"window", cfg.window}}, [&] {
    const auto sent_set = build_sentiment_training_set(out.corpus, cfg.seed,
                                                       cfg.official_only_training ? &filter : nullptr);
    const auto sentiment = train(sent_set, cfg.sentiment_lambda, cfg.seed);
    store.put("sentiment_model.json", model_to_json(sentiment));
    out.metrics["opinion"] = out.opinion.ratio_series(0);
    out.metrics["mentions"] = metric_mentions(out.corpus);
    out.metrics["mentions_emotion"] = metric_mentions_emotion(out.corpus, sentiment);
    out.metrics["hashtags"] = metric_hashtag_counts(out.corpus);
    csv::Writer w({"day", "opinion_A", "mentions_A", "mentions_emotion_A", "hashtags_A"});
    const auto& base = out.metrics["opinion"];
    for (std::size_t i = 0; i < base.size(); ++i) {
      const Day d = base.start + static_cast<std::int32_t>(i);
      w.row({format_day(d), csv::num(base.values[i]), csv::num(out.metrics["mentions"].at(d)),
             csv::num(out.metrics["mentions_emotion"].at(d)), csv::num(out.metrics["hashtags"].at(d))});
    }
    store.put("baselines.csv", w.str());
    out.baseline_fits = nlohmann::ordered_json::object();
    for (const auto& [name, series] : out.metrics)
      out.baseline_fits[name] = metric_against_polls(series, out.polls->share_a, cfg.window, range);
    store.put("baselines.json", detail::json_text(out.baseline_fits));
  });
  return out;
}

}  // namespace optrend
