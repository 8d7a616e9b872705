#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace optrend {

// log C(n, k)
inline double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Hypergeometric law of the overlap X between a c_i-subset and a c_j-subset placed
// uniformly among n tweets.
class Hypergeometric {
 public:
  Hypergeometric(std::int64_t n, std::int64_t ci, std::int64_t cj) : n_(n), ci_(ci), cj_(cj) {
    if (n < 0 || ci < 0 || cj < 0 || ci > n || cj > n)
      throw std::invalid_argument("hypergeometric margins out of range: N=" + std::to_string(n) +
                                  " c_i=" + std::to_string(ci) + " c_j=" + std::to_string(cj));
    lo_ = std::max<std::int64_t>(0, ci + cj - n);
    hi_ = std::min(ci, cj);
  }

  std::int64_t support_min() const { return lo_; }
  std::int64_t support_max() const { return hi_; }

  double log_pmf(std::int64_t k) const {
    if (k < lo_ || k > hi_) return -std::numeric_limits<double>::infinity();
    return log_choose(ci_, k) + log_choose(n_ - ci_, cj_ - k) - log_choose(n_, cj_);
  }

  // pmf(k+1) / pmf(k)
  double up_ratio(std::int64_t k) const {
    return static_cast<double>(ci_ - k) * static_cast<double>(cj_ - k) /
           (static_cast<double>(k + 1) * static_cast<double>(n_ - ci_ - cj_ + k + 1));
  }

  // pmf(k-1) / pmf(k)
  double down_ratio(std::int64_t k) const {
    return static_cast<double>(k) * static_cast<double>(n_ - ci_ - cj_ + k) /
           (static_cast<double>(ci_ - k + 1) * static_cast<double>(cj_ - k + 1));
  }

  std::int64_t mode() const {
    const double m = (static_cast<double>(ci_) + 1.0) * (static_cast<double>(cj_) + 1.0) /
                     (static_cast<double>(n_) + 2.0);
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(m)), lo_, hi_);
  }

  // log P(X >= k). Terms are summed relative to the first (largest) term, walking away
  // from the mode so no scaled term exceeds one.
  double log_upper_tail(std::int64_t k) const {
    if (k <= lo_) return 0.0;
    if (k > hi_) return -std::numeric_limits<double>::infinity();
    if (k > mode()) {
      double term = 1.0, sum = 1.0;
      for (std::int64_t x = k; x < hi_; ++x) {
        term *= up_ratio(x);
        sum += term;
        if (term < sum * 1e-18) break;
      }
      return log_pmf(k) + std::log(sum);
    }
    // Complement of the lower tail P(X <= k-1), which holds at most about half the mass.
    double term = 1.0, sum = 1.0;
    for (std::int64_t x = k - 1; x > lo_; --x) {
      term *= down_ratio(x);
      sum += term;
      if (term < sum * 1e-18) break;
    }
    const double lower = std::exp(log_pmf(k - 1) + std::log(sum));
    return std::log1p(-std::min(lower, 1.0));
  }

 private:
  std::int64_t n_, ci_, cj_;
  std::int64_t lo_ = 0, hi_ = 0;
};

// One-sided Fisher tail p = P(X >= k) for k co-occurrences given occurrence counts
// c_i, c_j among n tweets. Requires 0 <= k <= min(c_i, c_j) <= n.
inline double log_edge_significance(std::int64_t k, std::int64_t ci, std::int64_t cj, std::int64_t n) {
  if (k < 0 || k > std::min(ci, cj) || ci > n || cj > n || ci < 0 || cj < 0)
    throw std::invalid_argument("co-occurrence bounds violated: k=" + std::to_string(k) + " c_i=" +
                                std::to_string(ci) + " c_j=" + std::to_string(cj) + " N=" + std::to_string(n));
  return Hypergeometric(n, ci, cj).log_upper_tail(k);
}

inline double edge_significance(std::int64_t k, std::int64_t ci, std::int64_t cj, std::int64_t n) {
  return std::exp(log_edge_significance(k, ci, cj, n));
}

}  // namespace optrend
