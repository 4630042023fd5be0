#pragma once

// Shared helpers for the test binaries: a seeded generator and the small
// independent oracles the tests compare against.

#include "pinnet/dynamics.hpp"
#include "pinnet/graph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace pinnet::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols, double lo = -1.0, double hi = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }

  Eigen::VectorXd vector(Eigen::Index n, double lo = -1.0, double hi = 1.0) {
    return matrix(n, 1, lo, hi);
  }

  // Random nonnegative weights with zero diagonal, each edge present with
  // probability `density`.
  Eigen::MatrixXd adjacency(Eigen::Index n, bool symmetric, double density = 0.6) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = symmetric ? i + 1 : 0; j < n; ++j) {
        if (i == j || !coin(density)) continue;
        a(i, j) = uniform(0.1, 3.0);
        if (symmetric) a(j, i) = a(i, j);
      }
    }
    return a;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Explicit L kron I_p.
inline Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& m, Eigen::Index p) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows() * p, m.cols() * p);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index k = 0; k < p; ++k) out(i * p + k, j * p + k) = m(i, j);
  return out;
}

// Spectral norm via power iteration on M^T M.
inline double power_iteration_norm(const Eigen::MatrixXd& m, int iterations = 5000) {
  const Eigen::MatrixXd g = m.transpose() * m;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(g.cols()) +
                      Eigen::VectorXd::LinSpaced(g.cols(), 0.0, 0.37);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = g * v;
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
    lambda = v.dot(g * v);
  }
  return std::sqrt(lambda);
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace pinnet::testing
