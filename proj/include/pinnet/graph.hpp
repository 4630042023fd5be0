#pragma once

// Dense graph Laplacians and the spectral norms used by the stability
// certificate. Networks here are small (tens of nodes), so everything is a
// dense Eigen matrix.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pinnet {

/// Thrown when an adjacency or Laplacian matrix violates its invariants.
class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Absolute tolerance on Laplacian row sums.
inline constexpr double kRowSumTolerance = 1e-12;

/// Nonnegative edge weights with a zero diagonal. Directed graphs are allowed
/// (weights need not be symmetric); weights(i, j) is the influence of j on i.
class Adjacency {
 public:
  explicit Adjacency(Eigen::MatrixXd weights);

  static Adjacency complete(std::size_t n, double weight = 1.0);
  static Adjacency path(std::size_t n, double weight = 1.0);
  static Adjacency ring(std::size_t n, double weight = 1.0);

  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }

 private:
  Eigen::MatrixXd weights_;
};

enum class LaplacianNormalization {
  none,         // L = D - A
  random_walk,  // L = I - D^-1 A (rows of isolated nodes stay zero)
};

/// Square matrix with zero row sums, nonpositive off-diagonal and
/// nonnegative diagonal entries.
class Laplacian {
 public:
  explicit Laplacian(Eigen::MatrixXd entries);

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  bool is_symmetric() const;

 private:
  Eigen::MatrixXd entries_;
};

Laplacian build_laplacian(const Adjacency& adj,
                          LaplacianNormalization normalization = LaplacianNormalization::none);

/// Largest singular value of L. Symmetric inputs go through the symmetric
/// eigensolver; everything else through an SVD.
double laplacian_spectral_norm(const Laplacian& laplacian);

/// ||L kron I_p||_2. The Kronecker product with an identity has the same
/// singular values as L, so this never forms the np x np matrix.
double kron_identity_norm(const Laplacian& laplacian, std::size_t p);

std::string to_string(LaplacianNormalization normalization);
LaplacianNormalization laplacian_normalization_from_string(const std::string& name);

}  // namespace pinnet
