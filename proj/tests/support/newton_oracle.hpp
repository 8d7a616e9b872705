#pragma once

// Extended-precision Newton solver for the regularized logistic objective, used as an
// independent reference for the L-BFGS trainer.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "optrend/classifier.hpp"

namespace oracle {

using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Dense design with a trailing bias column.
inline LMat design(const optrend::SparseDataset& d) {
  LMat X = LMat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.dim + 1));
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (auto f : d.x[i]) X(static_cast<Eigen::Index>(i), f) = 1;
    X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d.dim)) = 1;
  }
  return X;
}

inline long double softplus_l(long double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline long double objective(const LMat& X, const optrend::SparseDataset& d, long double lambda, const LVec& w) {
  const LVec z = X * w;
  long double loss = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus_l(z(i)) - (d.y[static_cast<std::size_t>(i)] ? z(i) : 0);
  loss /= static_cast<long double>(z.size());
  for (Eigen::Index j = 0; j + 1 < w.size(); ++j) loss += lambda * w(j) * w(j);
  return loss;
}

// Damped Newton to a gradient norm of 1e-15. Returns the minimum value.
inline long double newton_minimum(const optrend::SparseDataset& d, double lambda_d) {
  const long double lambda = lambda_d;
  const LMat X = design(d);
  const auto n = static_cast<long double>(d.size());
  const Eigen::Index p = X.cols();
  LVec w = LVec::Zero(p);
  for (int it = 0; it < 100; ++it) {
    const LVec z = X * w;
    LVec r(z.size()), s(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const long double sg = 1 / (1 + std::exp(-z(i)));
      r(i) = sg - d.y[static_cast<std::size_t>(i)];
      s(i) = sg * (1 - sg);
    }
    LVec g = X.transpose() * r / n;
    LMat H = X.transpose() * s.asDiagonal() * X / n;
    for (Eigen::Index j = 0; j + 1 < p; ++j) {
      g(j) += 2 * lambda * w(j);
      H(j, j) += 2 * lambda;
    }
    if (g.norm() < 1e-15L) break;
    const LVec step = H.ldlt().solve(g);
    long double t = 1;
    const long double f0 = objective(X, d, lambda, w);
    while (t > 1e-12L && objective(X, d, lambda, w - t * step) > f0 - 1e-4L * t * g.dot(step)) t /= 2;
    w -= t * step;
  }
  return objective(X, d, lambda, w);
}

// Random sparse binary problem with a planted weight vector and label noise.
inline optrend::SparseDataset random_problem(std::mt19937_64& rng, std::size_t n, std::size_t dim, int active) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> feat(0, static_cast<std::uint32_t>(dim - 1));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> w(dim);
  for (auto& x : w) x = nd(rng);
  optrend::SparseDataset d;
  d.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    optrend::FeatureVector fv;
    for (int k = 0; k < active; ++k) fv.push_back(feat(rng));
    std::sort(fv.begin(), fv.end());
    fv.erase(std::unique(fv.begin(), fv.end()), fv.end());
    double z = 0.2;
    for (auto f : fv) z += w[f];
    d.y.push_back(U(rng) < optrend::sigmoid(z) ? 1 : 0);
    d.x.push_back(std::move(fv));
  }
  return d;
}

}  // namespace oracle
