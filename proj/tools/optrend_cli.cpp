// Command-line front end for the optrend pipeline.

#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "optrend/curation_service.hpp"
#include "optrend/optrend.hpp"

namespace fs = std::filesystem;
using namespace optrend;

namespace {

std::optional<Day> opt_day(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_day(s);
}

CorpusWindow load_or_die(const std::string& path, const std::string& start = {}, const std::string& end = {}) {
  auto loaded = load_corpus(path, opt_day(start), opt_day(end));
  if (loaded.report.malformed)
    std::cerr << "corpus: skipped " << loaded.report.malformed << " malformed line(s); first: "
              << loaded.report.diagnostics.front() << "\n";
  return std::move(loaded.window);
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    write_file(path, content);
  }
}

ClassAssignment load_assignment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open assignment " + path);
  return read_assignment_csv(in);
}

SeedAssignment load_seeds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open seeds file " + path);
  return parse_seeds(in);
}

DailySeries opinion_ratio_from_csv(const std::string& path) {
  // Opinion series tables keep r_A in column 4; plain day,value tables use column 1.
  const std::string text = read_file(path);
  const auto header = csv::split(text.substr(0, text.find('\n')));
  std::size_t col = 1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "r_A") col = i;
  return read_series_csv(text, col);
}

std::string toml_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("optrend: opinion trends from partisan hashtags, aligned with polls");
  app.set_config("--config", "", "TOML/INI file; keys live in a section named after the subcommand");
  app.require_subcommand(1);

  // ---- synth
  std::string syn_preset = "fixture", syn_out = "world";
  std::uint64_t syn_seed = 11;
  int syn_days = 0;
  synth::PollOptions poll_opt;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic world: corpus, truth, seeds, polls, decisions, config");
  syn->add_option("--preset", syn_preset, "calibrated | behavior | planted-60-40 | trend-reversal | fixture")
      ->capture_default_str();
  syn->add_option("--seed", syn_seed)->capture_default_str();
  syn->add_option("--days", syn_days, "Override the preset's number of days");
  syn->add_option("--out", syn_out, "Output directory")->capture_default_str();
  syn->add_option("--poll-lead", poll_opt.T_d, "Lead of the twitter series over the polls (days)")->capture_default_str();
  syn->add_option("--poll-window", poll_opt.w, "Centered smoothing of the planted poll series")->capture_default_str();
  syn->add_option("--poll-noise", poll_opt.noise_sd)->capture_default_str();
  syn->callback([&] {
    auto cfg = synth::preset(syn_preset, syn_seed);
    if (syn_days > 0) {
      cfg.days = syn_days;
      if (!cfg.ratio_path.empty()) cfg.ratio_path.resize(static_cast<std::size_t>(syn_days), cfg.ratio_path.back());
    }
    const auto world = synth::generate(cfg);
    fs::create_directories(syn_out);
    const fs::path out(syn_out);
    write_file((out / "corpus.jsonl").string(), serialize_corpus(world.corpus));
    write_file((out / "truth.json").string(), world.truth.to_json() + "\n");
    write_file((out / "seeds.txt").string(), format_seeds(world.seeds));
    poll_opt.seed = syn_seed;
    write_file((out / "polls.csv").string(),
               synth::polls_csv(synth::make_polls(world.truth.true_ratio(), poll_opt), poll_opt.other_share));
    // Decisions of an analyst who knows the planted classes.
    auto graph = std::make_shared<SignificantGraph>(build_significant_graph(world.corpus));
    synth::OracleCuration oracle(world.truth.hashtag_class);
    const auto pr = run_until_stable(graph, world.seeds, 0.001, oracle);
    write_file((out / "decisions.csv").string(), decisions_from_audit(pr.audit));
    const auto abs = [&](const char* f) { return toml_string(fs::absolute(out / f).string()); };
    std::string conf = "[run-all]\n";
    conf += "corpus = " + abs("corpus.jsonl") + "\n";
    conf += "polls = " + abs("polls.csv") + "\n";
    conf += "seeds = " + abs("seeds.txt") + "\n";
    conf += "decisions = " + abs("decisions.csv") + "\n";
    conf += "output-dir = " + abs("run") + "\n";
    conf += "seed = " + std::to_string(syn_seed) + "\n";
    conf += "\n[serve]\n";
    conf += "output-dir = " + abs("run") + "\n";
    conf += "seeds = " + abs("seeds.txt") + "\n";
    conf += "audit = " + abs("run/session_audit.jsonl") + "\n";
    write_file((out / "optrend.toml").string(), conf);
    std::cout << "wrote " << world.corpus.size() << " tweets over " << world.corpus.num_days() << " days to "
              << syn_out << "\n";
  });

  // ---- corpus
  std::string c_in, c_out = "-", c_start, c_end;
  bool c_official = false, c_strict = false;
  auto* corpus = app.add_subcommand("corpus", "Load, window and filter a corpus; writes canonical JSONL");
  corpus->add_option("--corpus", c_in)->required();
  corpus->add_option("--start", c_start, "First day (YYYY-MM-DD)");
  corpus->add_option("--end", c_end, "Last day (YYYY-MM-DD)");
  corpus->add_flag("--official-only", c_official, "Keep only tweets from official clients");
  corpus->add_flag("--strict-keywords", c_strict, "Keep only tweets matching the strict keyword rules");
  corpus->add_option("--out", c_out)->capture_default_str();
  corpus->callback([&] {
    auto c = load_or_die(c_in, c_start, c_end);
    const auto spec = FilterSpec::defaults();
    if (c_official) {
      auto r = filter_official_clients(c, spec);
      std::cerr << "official-client filter kept " << r.retention * 100 << "%\n";
      c = std::move(r.window);
    }
    if (c_strict) {
      auto r = filter_strict_keywords(c, spec);
      std::cerr << "strict keyword filter kept " << r.retention * 100 << "%\n";
      c = std::move(r.window);
    }
    emit(c_out, serialize_corpus(c));
  });

  // ---- graph
  std::string g_in, g_out = "-";
  auto* graph = app.add_subcommand("graph", "Daily interaction graphs: SCGC / WCGC / corona sizes");
  graph->add_option("--corpus", g_in)->required();
  graph->add_option("--out", g_out)->capture_default_str();
  graph->callback([&] { emit(g_out, component_size_series(load_or_die(g_in)).to_csv()); });

  // ---- cooccur
  std::string co_in, co_out = "cooccur";
  double co_p0 = 1e-6;
  std::uint64_t co_seed = 1;
  auto* cooccur = app.add_subcommand("cooccur", "Significant hashtag co-occurrence graph with communities");
  cooccur->add_option("--corpus", co_in)->required();
  cooccur->add_option("--p0", co_p0)->capture_default_str();
  cooccur->add_option("--seed", co_seed)->capture_default_str();
  cooccur->add_option("--out-dir", co_out)->capture_default_str();
  cooccur->callback([&] {
    CooccurrenceOptions opt;
    opt.p0 = co_p0;
    const auto g = build_significant_graph(load_or_die(co_in), opt);
    const auto comm = detect_communities(g, co_seed);
    fs::create_directories(co_out);
    write_file((fs::path(co_out) / "edges.csv").string(), edges_csv(g));
    write_file((fs::path(co_out) / "vertices.csv").string(), vertices_csv(g, comm.community));
    write_file((fs::path(co_out) / "graph.json").string(), node_link_json(g, comm.community).dump(1) + "\n");
    std::cerr << g.num_vertices() << " vertices, " << g.edges.size() << " edges (of " << g.raw_vertices << " / "
              << g.raw_edges << " before filtering), " << comm.num_communities() << " communities, Q = "
              << comm.modularity << "\n";
  });

  // ---- propagate
  std::string pr_in, pr_seeds, pr_decisions, pr_out = "propagation";
  double pr_r = 0.001, pr_p0 = 1e-6;
  bool pr_auto = false;
  int pr_max = 20;
  auto* propagate = app.add_subcommand("propagate", "Seeded hashtag class propagation with curation");
  propagate->add_option("--corpus", pr_in)->required();
  propagate->add_option("--seeds", pr_seeds)->required();
  auto* dec_opt = propagate->add_option("--decisions", pr_decisions, "CSV iteration,hashtag,accept|reject");
  propagate->add_flag("--auto", pr_auto, "Accept every filtered candidate")->excludes(dec_opt);
  propagate->add_option("--r", pr_r, "Occurrence filter threshold")->capture_default_str();
  propagate->add_option("--p0", pr_p0)->capture_default_str();
  propagate->add_option("--max-iterations", pr_max)->capture_default_str();
  propagate->add_option("--out-dir", pr_out)->capture_default_str();
  propagate->callback([&] {
    if (!pr_auto && pr_decisions.empty()) throw CLI::ValidationError("--decisions", "required unless --auto is given");
    CooccurrenceOptions opt;
    opt.p0 = pr_p0;
    auto g = std::make_shared<SignificantGraph>(build_significant_graph(load_or_die(pr_in), opt));
    std::unique_ptr<CurationSource> src;
    std::ifstream din;
    if (pr_auto) {
      src = std::make_unique<AutoAcceptCuration>();
    } else {
      din.open(pr_decisions);
      if (!din) throw std::runtime_error("cannot open decisions " + pr_decisions);
      src = std::make_unique<DecisionFileCuration>(din);
    }
    const auto res = run_until_stable(g, load_seeds(pr_seeds), pr_r, *src, pr_max);
    fs::create_directories(pr_out);
    write_file((fs::path(pr_out) / "assignment.csv").string(), assignment_csv(res.assignment));
    std::string audit;
    for (const auto& l : res.audit) audit += l + "\n";
    write_file((fs::path(pr_out) / "audit.jsonl").string(), audit);
    for (const auto& d : res.diagnostics) std::cerr << "warning: " << d << "\n";
    std::cerr << res.assignment.tags.size() << " hashtags assigned after " << res.iterations << " iteration(s)"
              << (res.stable ? "" : " (iteration cap reached)") << "\n";
  });

  // ---- trainset
  std::string ts_in, ts_assign, ts_out = "-";
  std::uint64_t ts_seed = 1;
  bool ts_all_clients = false;
  auto* trainset = app.add_subcommand("trainset", "Distant-supervision training set from assigned hashtags");
  trainset->add_option("--corpus", ts_in)->required();
  trainset->add_option("--assignment", ts_assign)->required();
  trainset->add_option("--seed", ts_seed)->capture_default_str();
  trainset->add_flag("--all-clients", ts_all_clients, "Do not restrict to official clients");
  trainset->add_option("--out", ts_out)->capture_default_str();
  trainset->callback([&] {
    const auto f = FilterSpec::defaults();
    const auto ts = build_training_set(load_or_die(ts_in), load_assignment(ts_assign), ts_seed,
                                       ts_all_clients ? nullptr : &f);
    const auto counts = ts.class_counts();
    std::cerr << ts.examples.size() << " examples (" << counts.front() << " per class)\n";
    emit(ts_out, training_set_jsonl(ts));
  });

  // ---- classifier
  std::string cl_in, cl_assign, cl_out = "classifier";
  std::string cl_lambdas = "1e-6,1e-5,1e-4,1e-3,1e-2,1e-1,1,10,100";
  int cl_folds = 10;
  std::uint64_t cl_seed = 1;
  bool cl_all_clients = false;
  auto* classifier = app.add_subcommand("classifier", "Cross-validate the regularization grid and train the model");
  classifier->add_option("--corpus", cl_in)->required();
  classifier->add_option("--assignment", cl_assign)->required();
  classifier->add_option("--lambdas", cl_lambdas)->capture_default_str();
  classifier->add_option("--folds", cl_folds)->capture_default_str();
  classifier->add_option("--seed", cl_seed)->capture_default_str();
  classifier->add_flag("--all-clients", cl_all_clients, "Do not restrict training to official clients");
  classifier->add_option("--out-dir", cl_out)->capture_default_str();
  classifier->callback([&] {
    PipelineConfig pc;
    pc.lambdas = cl_lambdas;
    const auto f = FilterSpec::defaults();
    const auto ts = build_training_set(load_or_die(cl_in), load_assignment(cl_assign), cl_seed,
                                       cl_all_clients ? nullptr : &f);
    const auto cv = cross_validate(ts, pc.lambda_grid(), cl_folds, cl_seed);
    const auto model = train(ts, cv.chosen_lambda, cl_seed);
    fs::create_directories(cl_out);
    write_file((fs::path(cl_out) / "cv.json").string(), cv_report_json(cv).dump(2) + "\n");
    write_file((fs::path(cl_out) / "model.json").string(), model_to_json(model));
    write_file((fs::path(cl_out) / "vocabulary.tsv").string(), model.vocab.table_csv());
    std::cerr << "lambda = " << cv.chosen_lambda << ", F1 = " << cv.mean.f1 << ", accuracy = " << cv.mean.accuracy
              << "\n";
  });

  // ---- opinion
  std::string op_in, op_model, op_scope = "whole", op_out = "-", op_behavior;
  double op_margin = 0;
  auto* opinion = app.add_subcommand("opinion", "Daily user opinion series and behavior report");
  opinion->add_option("--corpus", op_in)->required();
  opinion->add_option("--model", op_model)->required();
  opinion->add_option("--scope", op_scope, "whole | scgc | wcgc")->capture_default_str();
  opinion->add_option("--abstain-margin", op_margin, "Leave tweets with |p - 0.5| below this unclassified");
  opinion->add_option("--out", op_out)->capture_default_str();
  opinion->add_option("--behavior", op_behavior, "Write the behavior report (JSON) here");
  opinion->callback([&] {
    const auto c = load_or_die(op_in);
    const auto model = model_from_json(read_file(op_model));
    const auto tc = classify_corpus(c, model, op_margin);
    const auto scope = scope_from_string(op_scope);
    std::vector<ComponentDecomposition> decs;
    if (scope != Scope::whole) component_size_series(c, &decs);
    const auto series = daily_ratio_series(c, tc, model.classes, scope, &decs);
    emit(op_out, series.to_csv());
    if (!op_behavior.empty()) {
      auto beh = behavior_correlations(series);
      const auto cum = cumulative_opinion(c, tc);
      const auto act = activity_stats(c, tc, model.classes);
      beh.cumulative_shares = cum.shares;
      beh.cumulative_unclassified = cum.unclassified_share;
      beh.sweep = act.sweep;
      auto j = beh.to_json(model.classes);
      j["mean_tweets_per_user_day"] = act.mean_daily_mean;
      auto ccdf = nlohmann::ordered_json::array();
      for (const auto& pts : act.ccdf) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : pts) arr.push_back({p.tweets, p.fraction});
        ccdf.push_back(std::move(arr));
      }
      j["ccdf"] = std::move(ccdf);
      emit(op_behavior, j.dump(2) + "\n");
    }
  });

  // ---- fit / sweep / forecast share their inputs
  std::string fi_opinion, fi_polls, fi_plot, sw_windows = "1:2:41", fc_until, fc_out;
  int fi_window = 13, fi_td_min = 0, fi_td_max = 30, fc_horizon = 7, fc_window = 9;
  auto add_series_inputs = [&](CLI::App* sub) {
    sub->add_option("--opinion", fi_opinion, "Opinion series CSV (r_A column) or day,value CSV")->required();
    sub->add_option("--polls", fi_polls, "Poll CSV day,share_A,share_B,share_other")->required();
    sub->add_option("--td-min", fi_td_min)->capture_default_str();
    sub->add_option("--td-max", fi_td_max)->capture_default_str();
  };
  auto* fit = app.add_subcommand("fit", "Delayed affine fit of polls on the smoothed opinion series");
  add_series_inputs(fit);
  fit->add_option("--window", fi_window)->capture_default_str();
  fit->add_option("--plot", fi_plot, "Write plot data CSV here");
  fit->callback([&] {
    const auto raw = opinion_ratio_from_csv(fi_opinion);
    const auto polls = load_polls_csv(read_file(fi_polls));
    const auto smooth = backward_moving_average(raw, fi_window);
    const auto a = fit_affine_delay(smooth, polls.share_a, fi_window, {fi_td_min, fi_td_max});
    const auto b = fit_affine_delay(smooth.complement(), polls.share_b(), fi_window, {fi_td_min, fi_td_max});
    std::cout << nlohmann::ordered_json{{"A", a.to_json()}, {"B", b.to_json()}}.dump(2) << "\n";
    if (!fi_plot.empty()) emit(fi_plot, fit_plot_csv(smooth, polls.share_a, a));
  });

  auto* sweep = app.add_subcommand("sweep", "Fit quality across moving-average windows");
  add_series_inputs(sweep);
  sweep->add_option("--windows", sw_windows, "lo:step:hi or a comma list of odd widths")->capture_default_str();
  sweep->callback([&] {
    const auto raw = opinion_ratio_from_csv(fi_opinion);
    const auto polls = load_polls_csv(read_file(fi_polls));
    std::cout << sweep_csv(sweep_window(raw, polls.share_a, parse_window_grid(sw_windows), {fi_td_min, fi_td_max}));
  });

  auto* fc = app.add_subcommand("forecast", "Forecast polls h days ahead against linear and constant baselines");
  add_series_inputs(fc);
  fc->add_option("--train-until", fc_until, "Last day of the fitting period")->required();
  fc->add_option("--horizon", fc_horizon)->capture_default_str();
  fc->add_option("--window", fc_window)->capture_default_str();
  fc->add_option("--out", fc_out, "Write per-day predictions CSV here");
  fc->callback([&] {
    const auto raw = opinion_ratio_from_csv(fi_opinion);
    const auto polls = load_polls_csv(read_file(fi_polls));
    const auto rep = forecast(raw, polls.share_a, parse_day(fc_until), fc_window, fc_horizon, {fi_td_min, fi_td_max});
    std::cout << rep.to_json().dump(2) << "\n";
    if (!fc_out.empty()) emit(fc_out, rep.to_csv());
  });

  // ---- benchmark
  std::string bm_corpus, bm_opinion, bm_polls, bm_out;
  int bm_window = 13;
  double bm_lambda = 1e-3;
  std::uint64_t bm_seed = 1;
  auto* bench = app.add_subcommand("benchmark", "Attention baselines (mentions, mentions with emotion, hashtags) vs polls");
  bench->add_option("--corpus", bm_corpus)->required();
  bench->add_option("--opinion", bm_opinion, "Opinion series CSV to compare alongside the baselines");
  bench->add_option("--polls", bm_polls)->required();
  bench->add_option("--window", bm_window)->capture_default_str();
  bench->add_option("--sentiment-lambda", bm_lambda)->capture_default_str();
  bench->add_option("--seed", bm_seed)->capture_default_str();
  bench->add_option("--out", bm_out, "Write the metric series CSV here");
  bench->callback([&] {
    const auto c = load_or_die(bm_corpus);
    const auto polls = load_polls_csv(read_file(bm_polls));
    const auto f = FilterSpec::defaults();
    const auto sentiment = train(build_sentiment_training_set(c, bm_seed, &f), bm_lambda, bm_seed);
    std::map<std::string, DailySeries> metrics{{"mentions", metric_mentions(c)},
                                               {"mentions_emotion", metric_mentions_emotion(c, sentiment)},
                                               {"hashtags", metric_hashtag_counts(c)}};
    if (!bm_opinion.empty()) metrics["opinion"] = opinion_ratio_from_csv(bm_opinion);
    nlohmann::ordered_json j;
    for (const auto& [name, s] : metrics) j[name] = metric_against_polls(s, polls.share_a, bm_window, {});
    std::cout << j.dump(2) << "\n";
    if (!bm_out.empty()) {
      csv::Writer w({"day", "mentions_A", "mentions_emotion_A", "hashtags_A"});
      const auto& m = metrics.at("mentions");
      for (std::size_t i = 0; i < m.size(); ++i) {
        const Day d = m.start + static_cast<std::int32_t>(i);
        w.row({format_day(d), csv::num(m.values[i]), csv::num(metrics.at("mentions_emotion").at(d)),
               csv::num(metrics.at("hashtags").at(d))});
      }
      emit(bm_out, w.str());
    }
  });

  // ---- serve
  std::string sv_dir = "optrend-out", sv_seeds, sv_audit, sv_host = "127.0.0.1", sv_scope = "whole";
  double sv_r = 0.001;
  int sv_port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP curation API over a run's co-occurrence graph");
  serve->add_option("--output-dir", sv_dir, "Directory of a completed run (needs the cooccur stage)")->capture_default_str();
  serve->add_option("--seeds", sv_seeds)->required();
  serve->add_option("--r", sv_r)->capture_default_str();
  serve->add_option("--audit", sv_audit, "Audit log path (JSONL)");
  serve->add_option("--scope", sv_scope)->capture_default_str();
  serve->add_option("--host", sv_host)->capture_default_str();
  serve->add_option("--port", sv_port)->capture_default_str();
  serve->callback([&] {
    const auto vp = manifest_artifact(sv_dir, "vertices.csv"), ep = manifest_artifact(sv_dir, "edges.csv");
    const auto params = manifest_stage_parameters(sv_dir, "cooccur");
    const auto gp = manifest_artifact(sv_dir, "graph.json");
    if (!vp || !ep || !params || !gp) throw std::runtime_error("no co-occurrence artifacts under " + sv_dir);
    const auto meta = nlohmann::json::parse(read_file(gp->string()));
    auto g = std::make_shared<SignificantGraph>(read_significant_graph(
        read_file(vp->string()), read_file(ep->string()), meta.at("p0").get<double>(),
        meta.at("total_tweets").get<std::int64_t>()));
    std::vector<int> community;
    for (const auto& row : csv_to_json(read_file(vp->string())))
      community.push_back(row["community"].is_null() ? -1 : static_cast<int>(row["community"].get<double>()));
    CurationService svc(g, load_seeds(sv_seeds), sv_r, community,
                        sv_audit.empty() ? (fs::path(sv_dir) / "session_audit.jsonl").string() : sv_audit);
    svc.load_series(sv_dir, sv_scope);
    httplib::Server srv;
    svc.mount(srv);
    std::cerr << "listening on http://" << sv_host << ":" << sv_port << "\n";
    if (!srv.listen(sv_host, sv_port)) throw std::runtime_error("cannot bind " + sv_host + ":" + std::to_string(sv_port));
  });

  // ---- run-all
  PipelineConfig pc;
  auto* run = app.add_subcommand("run-all", "Run every stage; artifacts are content-hashed and listed in manifest.json");
  run->add_option("--corpus", pc.corpus);
  run->add_option("--polls", pc.polls);
  run->add_option("--seeds", pc.seeds);
  run->add_option("--decisions", pc.decisions);
  run->add_option("--output-dir", pc.output_dir)->capture_default_str();
  run->add_option("--start", pc.start);
  run->add_option("--end", pc.end);
  run->add_option("--train-until", pc.train_until);
  run->add_option("--curation", pc.curation, "file | auto")->capture_default_str();
  run->add_option("--p0", pc.p0)->capture_default_str();
  run->add_option("--r", pc.r)->capture_default_str();
  run->add_option("--window", pc.window)->capture_default_str();
  run->add_option("--windows", pc.windows)->capture_default_str();
  run->add_option("--td-min", pc.td_min)->capture_default_str();
  run->add_option("--td-max", pc.td_max)->capture_default_str();
  run->add_option("--horizon", pc.horizon)->capture_default_str();
  run->add_option("--forecast-window", pc.forecast_window)->capture_default_str();
  run->add_option("--lambdas", pc.lambdas)->capture_default_str();
  run->add_option("--folds", pc.folds)->capture_default_str();
  run->add_option("--seed", pc.seed)->capture_default_str();
  run->add_option("--scope", pc.scope)->capture_default_str();
  run->add_option("--official-only-training", pc.official_only_training)->capture_default_str();
  run->add_option("--abstain-margin", pc.abstain_margin)->capture_default_str();
  run->add_option("--sentiment-lambda", pc.sentiment_lambda)->capture_default_str();
  run->callback([&] {
    const auto t0 = std::chrono::steady_clock::now();
    run_pipeline(pc);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "run-all finished in " << secs << " s; manifest at " << (fs::path(pc.output_dir) / "manifest.json")
              << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
