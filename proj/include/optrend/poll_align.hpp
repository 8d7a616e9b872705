#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "optrend/csv.hpp"
#include "optrend/series.hpp"
#include "optrend/stats.hpp"

namespace optrend {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two-candidate poll shares; `share_a` holds y_A and y_B = 1 - y_A.
struct PollSeries {
  DailySeries share_a;

  DailySeries share_b() const { return share_a.complement(); }

  std::string to_csv() const {
    csv::Writer w({"day", "y_A", "y_B"});
    for (std::size_t i = 0; i < share_a.size(); ++i) {
      const auto& v = share_a.values[i];
      w.row({format_day(share_a.start + static_cast<std::int32_t>(i)), csv::num(v),
             csv::num(v ? std::optional<double>(1.0 - *v) : std::nullopt)});
    }
    return w.str();
  }
};

// Reads "day,share_A,share_B,share_other" and renormalizes the two candidates to sum to one.
// Days absent from the file, or with both shares zero, are gaps.
inline PollSeries load_polls_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FitError("empty poll file");
  std::vector<std::pair<Day, double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() < 3) throw FitError("poll row " + std::to_string(lineno) + ": expected day,share_A,share_B[,share_other]");
    const Day d = parse_day(f[0]);
    const double a = csv::parse_double(f[1]), b = csv::parse_double(f[2]);
    if (a < 0 || b < 0) throw FitError("poll row " + std::to_string(lineno) + ": negative share");
    if (a + b <= 0) continue;
    rows.emplace_back(d, a / (a + b));
  }
  PollSeries p;
  if (rows.empty()) return p;
  std::sort(rows.begin(), rows.end());
  p.share_a.start = rows.front().first;
  p.share_a.values.assign(static_cast<std::size_t>(rows.back().first - rows.front().first) + 1, std::nullopt);
  for (const auto& [d, v] : rows) p.share_a.values[static_cast<std::size_t>(d - p.share_a.start)] = v;
  return p;
}

// ---------------------------------------------------------------------------
// Smoothing

// Read access to a series that refuses days after `limit`. Used to prove forecasts are causal.
class CausalView {
 public:
  CausalView(const DailySeries& s, Day limit) : s_(&s), limit_(limit) {}

  std::optional<double> at(Day d) const {
    if (d > limit_)
      throw std::logic_error("causal view: read of " + format_day(d) + " after " + format_day(limit_));
    ++reads_;
    return s_->at(d);
  }

  Day limit() const { return limit_; }
  std::size_t reads() const { return reads_; }

 private:
  const DailySeries* s_;
  Day limit_;
  mutable std::size_t reads_ = 0;
};

template <typename Source>
std::optional<double> window_mean(const Source& src, Day from, Day to) {
  double sum = 0;
  int n = 0;
  for (Day d = from; d <= to; ++d)
    if (auto v = src.at(d)) {
      sum += *v;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / n;
}

// Mean over the present samples in [i - w + 1, i].
inline DailySeries backward_moving_average(const DailySeries& s, int w) {
  if (w < 1) throw std::invalid_argument("window must be >= 1");
  DailySeries out{s.start, {}};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Day d = s.start + static_cast<std::int32_t>(i);
    out.values.push_back(window_mean(s, d - (w - 1), d));
  }
  return out;
}

// Centered window of odd width; only used to relate delays to the backward variant.
inline DailySeries centered_moving_average(const DailySeries& s, int w) {
  if (w < 1 || w % 2 == 0) throw std::invalid_argument("centered window must be odd and positive");
  const int h = (w - 1) / 2;
  DailySeries out{s.start, {}};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Day d = s.start + static_cast<std::int32_t>(i);
    out.values.push_back(window_mean(s, d - h, d + h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fitting

struct PearsonRmse {
  std::optional<double> r;
  double rmse_pp = 0;
  std::size_t n = 0;
};

// Pairs where both sides are defined; needs at least three.
inline PearsonRmse pearson_rmse(const std::vector<std::optional<double>>& x, const std::vector<std::optional<double>>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson_rmse: length mismatch");
  std::vector<double> a, b;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] && y[i]) {
      a.push_back(*x[i]);
      b.push_back(*y[i]);
    }
  if (a.size() < 3) throw std::invalid_argument("pearson_rmse: fewer than 3 overlapping points");
  return {stats::pearson(a, b), 100.0 * stats::rmse(a, b), a.size()};
}

inline PearsonRmse pearson_rmse(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::optional<double>> a(x.begin(), x.end()), b(y.begin(), y.end());
  return pearson_rmse(a, b);
}

struct DelayRange {
  int min = 0, max = 30;
};

struct AlignedFit {
  int w = 1;
  double A = 0, b = 0;
  int t_d = 0;
  int T_d = 0;  // t_d + (w - 1) / 2
  std::optional<double> pearson_r;
  double rmse_pp = 0;
  double mse = 0;
  std::size_t overlap = 0;
  bool degenerate = false;

  double predict(double x) const { return A * x + b; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["w"] = w;
    j["A"] = A;
    j["b"] = b;
    j["t_d"] = t_d;
    j["T_d"] = T_d;
    j["pearson_r"] = pearson_r ? nlohmann::ordered_json(*pearson_r) : nlohmann::ordered_json(nullptr);
    j["rmse_pp"] = rmse_pp;
    j["overlap"] = overlap;
    j["degenerate"] = degenerate;
    return j;
  }
};

constexpr std::size_t kMinFitOverlap = 30;

namespace detail {

template <typename Source>
void aligned_pairs(const Source& x, const DailySeries& y, int t_d, Day y_last, std::vector<double>& xs,
                   std::vector<double>& ys) {
  xs.clear();
  ys.clear();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Day d = y.start + static_cast<std::int32_t>(i);
    if (d > y_last) break;
    if (!y.values[i]) continue;
    if (auto v = x.at(d - t_d)) {
      xs.push_back(*v);
      ys.push_back(*y.values[i]);
    }
  }
}

}  // namespace detail

// Closed-form least squares of y(i) on x(i - t_d) for every delay in range; keeps the
// delay with the smallest mean squared error (earliest delay on exact ties).
template <typename Source>
AlignedFit fit_affine_delay(const Source& smoothed, const DailySeries& polls, int w = 1, DelayRange range = {},
                            std::optional<Day> polls_until = std::nullopt) {
  if (range.min > range.max) throw FitError("empty delay range");
  const Day y_last = polls_until.value_or(polls.end());
  std::optional<AlignedFit> best;
  std::vector<double> xs, ys;
  std::size_t widest = 0;
  for (int t_d = range.min; t_d <= range.max; ++t_d) {
    detail::aligned_pairs(smoothed, polls, t_d, y_last, xs, ys);
    widest = std::max(widest, xs.size());
    if (xs.size() < kMinFitOverlap) continue;
    const auto line = stats::least_squares(xs, ys);
    double sse = 0;
    std::vector<double> pred(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      pred[i] = line.slope * xs[i] + line.intercept;
      sse += (ys[i] - pred[i]) * (ys[i] - pred[i]);
    }
    const double mse = sse / static_cast<double>(xs.size());
    if (best && !(mse < best->mse)) continue;
    AlignedFit f;
    f.w = w;
    f.A = line.slope;
    f.b = line.intercept;
    f.t_d = t_d;
    f.T_d = t_d + (w - 1) / 2;
    f.mse = mse;
    f.rmse_pp = 100.0 * std::sqrt(mse);
    f.overlap = xs.size();
    f.degenerate = line.degenerate;
    f.pearson_r = stats::pearson(xs, ys);
    best = f;
  }
  if (!best)
    throw FitError("insufficient overlap between twitter and poll series: at most " + std::to_string(widest) +
                   " aligned days, need " + std::to_string(kMinFitOverlap));
  return *best;
}

// Fit of candidate B implied by a fit of candidate A.
inline AlignedFit complementary_fit(const AlignedFit& a) {
  AlignedFit f = a;
  f.b = 1.0 - a.b - a.A;
  return f;
}

inline std::vector<int> parse_window_grid(const std::string& spec) {
  // "lo:step:hi" or comma-separated list
  std::vector<int> out;
  if (spec.find(':') != std::string::npos) {
    const auto f = csv::split(spec, ':');
    if (f.size() != 3) throw std::invalid_argument("window grid must be lo:step:hi");
    const int lo = std::stoi(f[0]), step = std::stoi(f[1]), hi = std::stoi(f[2]);
    if (step <= 0) throw std::invalid_argument("window grid step must be positive");
    for (int w = lo; w <= hi; w += step) out.push_back(w);
  } else {
    for (const auto& x : csv::split(spec, ',')) out.push_back(std::stoi(x));
  }
  for (int w : out)
    if (w < 1 || w % 2 == 0) throw std::invalid_argument("window lengths must be odd and positive");
  return out;
}

// One fit per window, evaluated concurrently.
inline std::vector<AlignedFit> sweep_window(const DailySeries& raw, const DailySeries& polls, const std::vector<int>& grid,
                                            DelayRange range = {}) {
  std::vector<std::future<AlignedFit>> jobs;
  for (int w : grid) {
    if (w < 1 || w % 2 == 0) throw std::invalid_argument("window lengths must be odd and positive");
    jobs.push_back(std::async(std::launch::async, [&raw, &polls, w, range] {
      return fit_affine_delay(backward_moving_average(raw, w), polls, w, range);
    }));
  }
  std::vector<AlignedFit> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline std::string sweep_csv(const std::vector<AlignedFit>& fits) {
  csv::Writer w({"w", "A", "b", "t_d", "T_d", "pearson_r", "rmse_pp", "overlap"});
  for (const auto& f : fits)
    w.row({std::to_string(f.w), csv::num(f.A), csv::num(f.b), std::to_string(f.t_d), std::to_string(f.T_d),
           csv::num(f.pearson_r), csv::num(f.rmse_pp), std::to_string(f.overlap)});
  return w.str();
}

// Observed polls against the fitted smoothed twitter series, for plotting.
inline std::string fit_plot_csv(const DailySeries& smoothed, const DailySeries& polls, const AlignedFit& f) {
  csv::Writer w({"day", "poll_A", "twitter_smoothed_A", "fitted_A"});
  for (std::size_t i = 0; i < polls.size(); ++i) {
    const Day d = polls.start + static_cast<std::int32_t>(i);
    const auto x = smoothed.at(d - f.t_d);
    w.row({format_day(d), csv::num(polls.values[i]), csv::num(x),
           csv::num(x ? std::optional<double>(f.predict(*x)) : std::nullopt)});
  }
  return w.str();
}

// ---------------------------------------------------------------------------
// Forecasting

constexpr int kLinearBaselineDays = 21;

// Least-squares line through the defined polls in [issue - 20, issue], evaluated at issue + h.
template <typename Source>
std::optional<double> linear_extrapolation_at(const Source& polls, Day issue, int h, Day first_day) {
  if (issue - first_day + 1 < kLinearBaselineDays) return std::nullopt;
  std::vector<double> xs, ys;
  for (Day d = issue - (kLinearBaselineDays - 1); d <= issue; ++d)
    if (auto v = polls.at(d)) {
      xs.push_back(static_cast<double>(d - issue));
      ys.push_back(*v);
    }
  if (xs.size() < 2) return std::nullopt;
  const auto line = stats::least_squares(xs, ys);
  return line.slope * h + line.intercept;
}

// Mean of the defined polls in [issue - 20, issue], held flat.
template <typename Source>
std::optional<double> constant_extrapolation_at(const Source& polls, Day issue, Day first_day) {
  if (issue - first_day + 1 < kLinearBaselineDays) return std::nullopt;
  return window_mean(polls, issue - (kLinearBaselineDays - 1), issue);
}

inline DailySeries baseline_linear_extrapolation(const DailySeries& polls, int h) {
  DailySeries out{polls.start + h, {}};
  for (std::size_t i = 0; i < polls.size(); ++i)
    out.values.push_back(
        linear_extrapolation_at(CausalView(polls, polls.start + static_cast<std::int32_t>(i)),
                                polls.start + static_cast<std::int32_t>(i), h, polls.start));
  return out;
}

inline DailySeries baseline_constant_extrapolation(const DailySeries& polls, int h) {
  DailySeries out{polls.start + h, {}};
  for (std::size_t i = 0; i < polls.size(); ++i)
    out.values.push_back(constant_extrapolation_at(CausalView(polls, polls.start + static_cast<std::int32_t>(i)),
                                                   polls.start + static_cast<std::int32_t>(i), polls.start));
  return out;
}

struct ForecastRow {
  Day issue{}, target{};
  std::optional<double> actual, twitter, linear, constant;
};

struct ForecastReport {
  int horizon = 0;
  AlignedFit fit;
  Day train_until{};
  std::vector<ForecastRow> rows;
  std::optional<double> rmse_twitter_pp, rmse_linear_pp, rmse_constant_pp;
  std::size_t scored_days = 0;

  std::string to_csv() const {
    csv::Writer w({"issue_day", "target_day", "poll_A", "twitter_A", "linear_A", "constant_A"});
    for (const auto& r : rows)
      w.row({format_day(r.issue), format_day(r.target), csv::num(r.actual), csv::num(r.twitter), csv::num(r.linear),
             csv::num(r.constant)});
    return w.str();
  }

  nlohmann::ordered_json to_json() const {
    auto opt = [](const std::optional<double>& v) {
      return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json j;
    j["horizon"] = horizon;
    j["train_until"] = format_day(train_until);
    j["fit"] = fit.to_json();
    j["scored_days"] = scored_days;
    j["rmse_twitter_pp"] = opt(rmse_twitter_pp);
    j["rmse_linear_pp"] = opt(rmse_linear_pp);
    j["rmse_constant_pp"] = opt(rmse_constant_pp);
    return j;
  }
};

struct ForecastError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fits on data up to `train_until`, then for every later poll day j predicts y(j) from
// information available at j - h. Every read goes through a CausalView bounded by the issue day.
inline ForecastReport forecast(const DailySeries& twitter_raw, const DailySeries& polls, Day train_until, int w, int h,
                               DelayRange range = {}) {
  if (h < 1) throw ForecastError("horizon must be >= 1");
  if (w < 1 || w % 2 == 0) throw ForecastError("window must be odd and positive");
  // The fit may only use twitter data and polls dated up to the end of training.
  const CausalView train_view(twitter_raw, train_until);
  DailySeries smoothed_train{twitter_raw.start, {}};
  for (Day d = twitter_raw.start; d <= std::min(train_until, twitter_raw.end()); ++d)
    smoothed_train.values.push_back(window_mean(train_view, d - (w - 1), d));
  ForecastReport rep;
  rep.horizon = h;
  rep.train_until = train_until;
  rep.fit = fit_affine_delay(smoothed_train, polls, w, range, train_until);
  if (h > rep.fit.t_d)
    throw ForecastError("horizon " + std::to_string(h) + " exceeds the available lead t_d = " +
                        std::to_string(rep.fit.t_d) + " (T_d = " + std::to_string(rep.fit.T_d) + ", window " +
                        std::to_string(w) + ")");

  std::vector<double> e_tw, e_lin, e_const;
  for (Day target = train_until + 1; target <= polls.end(); ++target) {
    const Day issue = target - h;
    ForecastRow row;
    row.issue = issue;
    row.target = target;
    row.actual = polls.at(target);
    const CausalView tw(twitter_raw, issue);
    const Day x_day = target - rep.fit.t_d;  // <= issue because h <= t_d
    if (auto x = window_mean(tw, x_day - (w - 1), x_day)) row.twitter = rep.fit.predict(*x);
    const CausalView pv(polls, issue);
    row.linear = linear_extrapolation_at(pv, issue, h, polls.start);
    row.constant = constant_extrapolation_at(pv, issue, polls.start);
    if (row.actual && row.twitter && row.linear && row.constant) {
      e_tw.push_back(*row.twitter - *row.actual);
      e_lin.push_back(*row.linear - *row.actual);
      e_const.push_back(*row.constant - *row.actual);
    }
    rep.rows.push_back(row);
  }
  auto rms = [](const std::vector<double>& e) -> std::optional<double> {
    if (e.empty()) return std::nullopt;
    double s = 0;
    for (double x : e) s += x * x;
    return 100.0 * std::sqrt(s / static_cast<double>(e.size()));
  };
  rep.scored_days = e_tw.size();
  rep.rmse_twitter_pp = rms(e_tw);
  rep.rmse_linear_pp = rms(e_lin);
  rep.rmse_constant_pp = rms(e_const);
  return rep;
}

}  // namespace optrend
