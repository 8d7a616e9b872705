#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <future>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "optrend/features.hpp"

namespace optrend {

// Binary problem over sparse presence features. Labels are 0/1.
struct SparseDataset {
  std::vector<FeatureVector> x;
  std::vector<int> y;
  std::size_t dim = 0;

  std::size_t size() const { return x.size(); }
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Mean logistic loss plus lambda * ||w||^2; the bias is the last coordinate and is not penalized.
class LogisticObjective {
 public:
  LogisticObjective(const SparseDataset& data, double lambda) : data_(data), lambda_(lambda) {}

  std::size_t num_params() const { return data_.dim + 1; }

  double value_and_gradient(const std::vector<double>& params, std::vector<double>& grad) const {
    const std::size_t d = data_.dim;
    grad.assign(d + 1, 0.0);
    double loss = 0;
    const double inv_n = data_.size() ? 1.0 / static_cast<double>(data_.size()) : 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      double z = params[d];
      for (auto f : data_.x[i]) z += params[f];
      // loss_i = softplus(z) - y z ; dloss/dz = sigmoid(z) - y
      loss += softplus(z) - (data_.y[i] ? z : 0.0);
      const double g = (sigmoid(z) - data_.y[i]) * inv_n;
      for (auto f : data_.x[i]) grad[f] += g;
      grad[d] += g;
    }
    loss *= inv_n;
    for (std::size_t j = 0; j < d; ++j) {
      loss += lambda_ * params[j] * params[j];
      grad[j] += 2.0 * lambda_ * params[j];
    }
    return loss;
  }

  double value(const std::vector<double>& params) const {
    std::vector<double> g;
    return value_and_gradient(params, g);
  }

 private:
  const SparseDataset& data_;
  double lambda_;
};

struct OptimizerOptions {
  int max_iterations = 1000;
  double relative_tolerance = 1e-10;  // stop after two consecutive iterations below this
  double gradient_tolerance = 1e-9;   // max-norm of the gradient
  int memory = 10;
};

struct OptimizerReport {
  double loss = 0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace detail

// Limited-memory BFGS with a backtracking Armijo line search. Deterministic.
inline OptimizerReport minimize_lbfgs(const LogisticObjective& obj, std::vector<double>& x,
                                      const OptimizerOptions& opt = {}) {
  const std::size_t n = obj.num_params();
  x.resize(n, 0.0);
  std::vector<double> g, g_new, x_new(n), dir(n);
  double f = obj.value_and_gradient(x, g);
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  OptimizerReport rep;
  int small_steps = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    rep.iterations = it;
    if (detail::max_abs(g) <= opt.gradient_tolerance) {
      rep.converged = true;
      break;
    }
    // Two-loop recursion.
    dir = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * detail::dot(s_hist[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[k] * y_hist[k][i];
    }
    if (!s_hist.empty()) {
      const double gamma = detail::dot(s_hist.back(), y_hist.back()) / detail::dot(y_hist.back(), y_hist.back());
      for (auto& v : dir) v *= gamma;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * detail::dot(y_hist[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += s_hist[k][i] * (alpha[k] - beta);
    }
    for (auto& v : dir) v = -v;
    double slope = detail::dot(g, dir);
    if (!(slope < 0)) {  // not a descent direction: restart from steepest descent
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      slope = detail::dot(g, dir);
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::max(1e-12, std::sqrt(-slope))) : 1.0;
    double f_new = 0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
      f_new = obj.value_and_gradient(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease is representable at this precision: treat as converged if the gradient
      // is already tiny relative to the loss, otherwise report divergence.
      if (detail::max_abs(g) <= 1e-6 * std::max(1.0, std::abs(f))) {
        rep.converged = true;
        break;
      }
      throw TrainingError("line search failed to decrease the loss (f=" + std::to_string(f) + ")");
    }
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = detail::dot(s, y);
    if (sy > 1e-16) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double rel = std::abs(f - f_new) / std::max(1.0, std::abs(f));
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    small_steps = rel < opt.relative_tolerance ? small_steps + 1 : 0;
    if (small_steps >= 2) {
      rep.iterations = it + 1;
      rep.converged = true;
      break;
    }
    rep.iterations = it + 1;
  }
  rep.loss = f;
  return rep;
}

struct BinaryHead {
  std::vector<double> weights;
  double bias = 0;

  double probability(const FeatureVector& fv) const {
    double z = bias;
    for (auto f : fv)
      if (f < weights.size()) z += weights[f];
    return sigmoid(z);
  }
};

struct ModelParams {
  std::vector<std::string> classes;
  Vocabulary vocab;
  std::vector<BinaryHead> heads;  // one head for K = 2 (probability of class 1), K heads otherwise
  double lambda = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  double final_loss = 0;

  std::uint64_t vocab_hash() const { return vocab.hash(); }
};

struct Prediction {
  int cls = 0;
  double probability = 0.5;  // K = 2: P(class 1); otherwise the winning head's probability
};

inline Prediction predict_vector(const ModelParams& m, const FeatureVector& fv) {
  if (m.heads.size() == 1) {
    const double p = m.heads[0].probability(fv);
    return {p > 0.5 ? 1 : 0, p};
  }
  Prediction best{0, -1.0};
  for (std::size_t k = 0; k < m.heads.size(); ++k) {
    const double p = m.heads[k].probability(fv);
    if (p > best.probability) best = {static_cast<int>(k), p};
  }
  return best;
}

inline Prediction predict_tweet(const ModelParams& m, const TokenStream& tokens) {
  return predict_vector(m, vectorize(tokens, m.vocab));
}

inline SparseDataset make_binary_dataset(const std::vector<FeatureVector>& x, const std::vector<int>& labels,
                                         int positive, std::size_t dim) {
  SparseDataset d;
  d.x = x;
  d.dim = dim;
  d.y.reserve(labels.size());
  for (int l : labels) d.y.push_back(l == positive ? 1 : 0);
  return d;
}

inline BinaryHead train_head(const SparseDataset& data, double lambda, const OptimizerOptions& opt,
                             OptimizerReport* report = nullptr) {
  if (!(lambda > 0)) throw TrainingError("regularization strength must be positive");
  LogisticObjective obj(data, lambda);
  std::vector<double> params(obj.num_params(), 0.0);
  const auto rep = minimize_lbfgs(obj, params, opt);
  if (report) *report = rep;
  BinaryHead h;
  h.bias = params.back();
  params.pop_back();
  h.weights = std::move(params);
  return h;
}

// Trains on pre-vectorized examples. K = 2 trains a single head; K > 2 one-vs-rest.
inline ModelParams train_vectors(const std::vector<FeatureVector>& x, const std::vector<int>& labels,
                                 std::vector<std::string> classes, Vocabulary vocab, double lambda,
                                 std::uint64_t seed, const OptimizerOptions& opt = {}) {
  ModelParams m;
  m.classes = std::move(classes);
  m.lambda = lambda;
  m.seed = seed;
  const std::size_t dim = vocab.size();
  m.vocab = std::move(vocab);
  if (m.classes.size() < 2) throw TrainingError("need at least two classes");
  const std::size_t heads = m.classes.size() == 2 ? 1 : m.classes.size();
  for (std::size_t k = 0; k < heads; ++k) {
    const int positive = heads == 1 ? 1 : static_cast<int>(k);
    OptimizerReport rep;
    m.heads.push_back(train_head(make_binary_dataset(x, labels, positive, dim), lambda, opt, &rep));
    m.iterations = std::max(m.iterations, rep.iterations);
    m.final_loss += rep.loss;
  }
  return m;
}

inline ModelParams train(const TrainingSet& ts, double lambda, std::uint64_t seed, const OptimizerOptions& opt = {}) {
  Vocabulary vocab = Vocabulary::build(ts);
  std::vector<FeatureVector> x;
  std::vector<int> y;
  x.reserve(ts.examples.size());
  for (const auto& e : ts.examples) {
    x.push_back(vectorize(e.tokens, vocab));
    y.push_back(e.label);
  }
  return train_vectors(x, y, ts.classes, std::move(vocab), lambda, seed, opt);
}

// ---------------------------------------------------------------------------
// Metrics

struct MetricRecord {
  double f1 = 0, precision = 0, recall = 0, accuracy = 0;
  std::optional<double> auroc;  // undefined when only one class is present
};

// Area under the ROC curve by the Mann-Whitney rank statistic with average ranks for ties.
inline std::optional<double> auroc(const std::vector<double>& score, const std::vector<int>& label) {
  std::size_t pos = 0, neg = 0;
  for (int l : label) (l ? pos : neg)++;
  if (pos == 0 || neg == 0) return std::nullopt;
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return score[a] < score[b]; });
  double rank_sum = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && score[idx[j + 1]] == score[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (label[idx[k]]) rank_sum += avg;
    i = j + 1;
  }
  const double p = static_cast<double>(pos), q = static_cast<double>(neg);
  return (rank_sum - p * (p + 1) / 2.0) / (p * q);
}

// Binary metrics; F1, precision and recall are averaged over both choices of positive class.
inline MetricRecord evaluate_metrics(const std::vector<int>& predicted, const std::vector<double>& score,
                                     const std::vector<int>& label) {
  if (predicted.size() != label.size() || score.size() != label.size())
    throw std::invalid_argument("prediction/label length mismatch");
  MetricRecord m;
  if (label.empty()) return m;
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (predicted[i] && label[i]) ++tp;
    else if (!predicted[i] && !label[i]) ++tn;
    else if (predicted[i]) ++fp;
    else ++fn;
  }
  auto ratio = [](std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  auto f1 = [](double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; };
  const double p1 = ratio(tp, tp + fp), r1 = ratio(tp, tp + fn);
  const double p0 = ratio(tn, tn + fn), r0 = ratio(tn, tn + fp);
  m.precision = (p1 + p0) / 2;
  m.recall = (r1 + r0) / 2;
  m.f1 = (f1(p1, r1) + f1(p0, r0)) / 2;
  m.accuracy = ratio(tp + tn, label.size());
  m.auroc = auroc(score, label);
  return m;
}

// ---------------------------------------------------------------------------
// Cross-validation

inline std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int e = -6; e <= 2; ++e) g.push_back(std::pow(10.0, e));
  return g;
}

struct FoldMetrics {
  double lambda = 0;
  int fold = 0;
  MetricRecord metrics;
};

struct CVReport {
  std::vector<FoldMetrics> folds;      // every (lambda, fold)
  std::vector<double> lambdas;
  std::vector<double> mean_f1;         // per lambda
  double chosen_lambda = 0;
  MetricRecord mean;                   // averaged over folds at the chosen lambda
  int k = 0;
};

// Stratification is not applied; folds come from a seeded permutation. The vocabulary is
// built once over all examples: features absent from a fold's training part get no
// gradient and stay at zero, so predictions equal those of a fold-local vocabulary.
inline CVReport cross_validate(const TrainingSet& ts, const std::vector<double>& lambdas, int k, std::uint64_t seed,
                               const OptimizerOptions& opt = {}) {
  if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
  if (ts.classes.size() != 2) throw std::invalid_argument("cross-validation metrics are binary");
  if (ts.examples.size() < static_cast<std::size_t>(k)) throw TrainingError("fewer examples than folds");
  const Vocabulary vocab = Vocabulary::build(ts);
  std::vector<FeatureVector> x;
  std::vector<int> y;
  for (const auto& e : ts.examples) {
    x.push_back(vectorize(e.tokens, vocab));
    y.push_back(e.label);
  }
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold_of(x.size());
  for (std::size_t i = 0; i < perm.size(); ++i) fold_of[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(k));

  CVReport rep;
  rep.k = k;
  rep.lambdas = lambdas;
  for (double lambda : lambdas) {
    std::vector<std::future<FoldMetrics>> jobs;
    for (int f = 0; f < k; ++f)
      jobs.push_back(std::async(std::launch::async, [&, f, lambda] {
        SparseDataset train_part;
        train_part.dim = vocab.size();
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (fold_of[i] == f) {
            test_idx.push_back(i);
          } else {
            train_part.x.push_back(x[i]);
            train_part.y.push_back(y[i]);
          }
        }
        const BinaryHead h = train_head(train_part, lambda, opt);
        std::vector<int> pred, lab;
        std::vector<double> score;
        for (auto i : test_idx) {
          const double p = h.probability(x[i]);
          score.push_back(p);
          pred.push_back(p > 0.5 ? 1 : 0);
          lab.push_back(y[i]);
        }
        return FoldMetrics{lambda, f, evaluate_metrics(pred, score, lab)};
      }));
    double sum = 0;
    for (auto& j : jobs) {
      rep.folds.push_back(j.get());
      sum += rep.folds.back().metrics.f1;
    }
    rep.mean_f1.push_back(sum / k);
  }
  const auto best = static_cast<std::size_t>(std::max_element(rep.mean_f1.begin(), rep.mean_f1.end()) - rep.mean_f1.begin());
  rep.chosen_lambda = lambdas[best];
  double auc_sum = 0;
  int auc_n = 0;
  for (const auto& fm : rep.folds) {
    if (fm.lambda != rep.chosen_lambda) continue;
    rep.mean.f1 += fm.metrics.f1 / k;
    rep.mean.precision += fm.metrics.precision / k;
    rep.mean.recall += fm.metrics.recall / k;
    rep.mean.accuracy += fm.metrics.accuracy / k;
    if (fm.metrics.auroc) {
      auc_sum += *fm.metrics.auroc;
      ++auc_n;
    }
  }
  if (auc_n) rep.mean.auroc = auc_sum / auc_n;
  return rep;
}

inline nlohmann::ordered_json cv_report_json(const CVReport& r) {
  nlohmann::ordered_json j;
  j["k"] = r.k;
  j["chosen_lambda"] = r.chosen_lambda;
  j["mean"] = {{"f1", r.mean.f1},
               {"auroc", r.mean.auroc ? nlohmann::ordered_json(*r.mean.auroc) : nlohmann::ordered_json(nullptr)},
               {"accuracy", r.mean.accuracy},
               {"precision", r.mean.precision},
               {"recall", r.mean.recall}};
  auto grid = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.lambdas.size(); ++i) grid.push_back({{"lambda", r.lambdas[i]}, {"mean_f1", r.mean_f1[i]}});
  j["grid"] = std::move(grid);
  auto folds = nlohmann::ordered_json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"lambda", f.lambda}, {"fold", f.fold}, {"f1", f.metrics.f1}, {"accuracy", f.metrics.accuracy}});
  j["folds"] = std::move(folds);
  return j;
}

// ---------------------------------------------------------------------------
// Model file

inline std::string model_to_json(const ModelParams& m) {
  nlohmann::ordered_json j;
  j["format"] = "optrend-logistic";
  j["version"] = 1;
  j["classes"] = m.classes;
  j["lambda"] = m.lambda;
  j["seed"] = m.seed;
  j["iterations"] = m.iterations;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(m.vocab_hash()));
  j["vocab_hash"] = hex;
  j["vocabulary"] = m.vocab.features();
  auto heads = nlohmann::ordered_json::array();
  for (const auto& h : m.heads) {
    auto w = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < h.weights.size(); ++i)
      if (h.weights[i] != 0.0) w.push_back({i, h.weights[i]});
    heads.push_back({{"bias", h.bias}, {"weights", std::move(w)}});
  }
  j["heads"] = std::move(heads);
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

inline ModelParams model_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("format") != "optrend-logistic") throw std::invalid_argument("not a model file");
  if (j.at("version").get<int>() != 1) throw std::invalid_argument("unsupported model version");
  ModelParams m;
  m.classes = j.at("classes").get<std::vector<std::string>>();
  m.lambda = j.at("lambda").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.iterations = j.at("iterations").get<int>();
  m.vocab = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
  for (const auto& h : j.at("heads")) {
    BinaryHead head;
    head.bias = h.at("bias").get<double>();
    head.weights.assign(m.vocab.size(), 0.0);
    for (const auto& w : h.at("weights")) head.weights.at(w.at(0).get<std::size_t>()) = w.at(1).get<double>();
    m.heads.push_back(std::move(head));
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(m.vocab_hash()));
  if (j.at("vocab_hash").get<std::string>() != hex) throw std::invalid_argument("model vocabulary hash mismatch");
  return m;
}

}  // namespace optrend
