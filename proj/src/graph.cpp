#include "pinnet/graph.hpp"

#include <cmath>
#include <sstream>

namespace pinnet {

namespace {

std::string entry_name(Eigen::Index i, Eigen::Index j) {
  std::ostringstream os;
  os << "(" << i + 1 << "," << j + 1 << ")";
  return os.str();
}

}  // namespace

Adjacency::Adjacency(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.rows() != weights_.cols()) {
    std::ostringstream os;
    os << "adjacency must be square with at least one node, got " << weights_.rows() << "x"
       << weights_.cols();
    throw GraphError(os.str());
  }
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w)) {
        throw GraphError("adjacency entry " + entry_name(i, j) + " is not finite");
      }
      if (i == j && w != 0.0) {
        throw GraphError("adjacency diagonal entry " + entry_name(i, j) + " must be zero");
      }
      if (w < 0.0) {
        throw GraphError("adjacency entry " + entry_name(i, j) + " is negative");
      }
    }
  }
}

Adjacency Adjacency::complete(std::size_t n, double weight) {
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(size, size, weight);
  w.diagonal().setZero();
  return Adjacency(std::move(w));
}

Adjacency Adjacency::path(std::size_t n, double weight) {
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index i = 0; i + 1 < size; ++i) {
    w(i, i + 1) = weight;
    w(i + 1, i) = weight;
  }
  return Adjacency(std::move(w));
}

Adjacency Adjacency::ring(std::size_t n, double weight) {
  Adjacency adj = path(n, weight);
  if (n > 2) {
    Eigen::MatrixXd w = adj.weights();
    const auto last = static_cast<Eigen::Index>(n) - 1;
    w(0, last) = weight;
    w(last, 0) = weight;
    return Adjacency(std::move(w));
  }
  return adj;
}

Laplacian::Laplacian(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    std::ostringstream os;
    os << "Laplacian must be square with at least one node, got " << entries_.rows() << "x"
       << entries_.cols();
    throw GraphError(os.str());
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      const double v = entries_(i, j);
      if (!std::isfinite(v)) {
        throw GraphError("Laplacian entry " + entry_name(i, j) + " is not finite");
      }
      if (i == j && v < 0.0) {
        throw GraphError("Laplacian diagonal entry " + entry_name(i, j) + " is negative");
      }
      if (i != j && v > 0.0) {
        throw GraphError("Laplacian off-diagonal entry " + entry_name(i, j) + " is positive");
      }
    }
    const double row_sum = entries_.row(i).sum();
    if (std::abs(row_sum) > kRowSumTolerance) {
      std::ostringstream os;
      os << "Laplacian row " << i + 1 << " sums to " << row_sum << ", expected 0";
      throw GraphError(os.str());
    }
  }
}

bool Laplacian::is_symmetric() const { return entries_ == entries_.transpose(); }

Laplacian build_laplacian(const Adjacency& adj, LaplacianNormalization normalization) {
  const Eigen::MatrixXd& a = adj.weights();
  const Eigen::VectorXd degree = a.rowwise().sum();
  Eigen::MatrixXd l = -a;
  switch (normalization) {
    case LaplacianNormalization::none:
      l.diagonal() = degree;
      break;
    case LaplacianNormalization::random_walk:
      for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (degree(i) > 0.0) {
          l.row(i) /= degree(i);
          l(i, i) = 1.0;
        }
      }
      break;
  }
  // Recompute the diagonal from the stored off-diagonals so that row sums are
  // zero up to a single rounding.
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
      if (j != i) off += l(i, j);
    }
    l(i, i) = -off;
  }
  return Laplacian(std::move(l));
}

double laplacian_spectral_norm(const Laplacian& laplacian) {
  const Eigen::MatrixXd& l = laplacian.matrix();
  if (laplacian.is_symmetric()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(l, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(l);
  return svd.singularValues()(0);
}

double kron_identity_norm(const Laplacian& laplacian, std::size_t p) {
  if (p == 0) {
    throw std::invalid_argument("kron_identity_norm: state dimension p must be >= 1");
  }
  return laplacian_spectral_norm(laplacian);
}

std::string to_string(LaplacianNormalization normalization) {
  switch (normalization) {
    case LaplacianNormalization::none:
      return "none";
    case LaplacianNormalization::random_walk:
      return "random-walk";
  }
  return "none";
}

LaplacianNormalization laplacian_normalization_from_string(const std::string& name) {
  if (name == "none") return LaplacianNormalization::none;
  if (name == "random-walk") return LaplacianNormalization::random_walk;
  throw std::invalid_argument("unknown Laplacian normalization '" + name +
                              "' (expected none or random-walk)");
}

}  // namespace pinnet
