#pragma once

// Network-coupled node dynamics and the pinning feedback law.
//
// States are stored as n x p matrices: row i is the state of node i.
//
//   x_i' = f_i(x_i) + coupling_i(x) + u_i,      u_i = -w_i * gain * (x_i - x_r)
//   x_r' = f_r(x_r) + reference_coupling(x_r)
//
// with coupling_i(x) = -c * sum_j L_ij h_j(x_j) in Laplacian-diffusive mode and
// coupling_i(x) = c * sum_j a_ij sin(x_j - x_i) (a_ij = -L_ij) in pairwise-sine
// mode.

#include "pinnet/graph.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pinnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Thrown on dimension mismatches and out-of-domain arguments.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Single-node vector field f and coupling observable h, both R^p -> R^p.
class NodeDynamics {
 public:
  virtual ~NodeDynamics() = default;

  virtual std::string_view kind() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual Vector drift(const VectorRef& x) const = 0;
  virtual Vector coupling_output(const VectorRef& x) const = 0;

  // Closed-form constants for the quadratic condition on f and the Lipschitz
  // bound on h, when the model has one.
  virtual std::optional<double> quadratic_bound() const { return std::nullopt; }
  virtual std::optional<double> lipschitz_bound() const { return std::nullopt; }
};

using DynamicsPtr = std::shared_ptr<const NodeDynamics>;

enum class CouplingMode { laplacian_diffusive, pairwise_sine };

std::string to_string(CouplingMode mode);
CouplingMode coupling_mode_from_string(const std::string& name);

class NetworkModel {
 public:
  /// `reference` drives the reference trajectory x_r; it may differ from the
  /// node dynamics (e.g. healthy parameters as the tracking target).
  NetworkModel(std::vector<DynamicsPtr> nodes, DynamicsPtr reference, Laplacian laplacian,
               double coupling, CouplingMode mode = CouplingMode::laplacian_diffusive);

  /// Every node and the reference share `dynamics`.
  static NetworkModel homogeneous(DynamicsPtr dynamics, Laplacian laplacian, double coupling,
                                  CouplingMode mode = CouplingMode::laplacian_diffusive);

  std::size_t size() const { return nodes_.size(); }
  Eigen::Index state_dim() const { return reference_->dim(); }
  const NodeDynamics& node(std::size_t i) const { return *nodes_[i]; }
  const std::vector<DynamicsPtr>& nodes() const { return nodes_; }
  const NodeDynamics& reference() const { return *reference_; }
  const DynamicsPtr& reference_ptr() const { return reference_; }
  const Laplacian& laplacian() const { return laplacian_; }
  double coupling() const { return coupling_; }
  CouplingMode mode() const { return mode_; }

 private:
  std::vector<DynamicsPtr> nodes_;
  DynamicsPtr reference_;
  Laplacian laplacian_;
  double coupling_;
  CouplingMode mode_;
};

/// Pin mask w in {0,1}^n and a scalar gain shared by the pinned nodes.
class Controller {
 public:
  Controller(std::vector<bool> pinned, double gain);

  static Controller all_pinned(std::size_t n, double gain);

  std::size_t size() const { return pinned_.size(); }
  bool pinned(std::size_t i) const { return pinned_[i]; }
  const std::vector<bool>& pin_mask() const { return pinned_; }
  bool all_pinned() const;
  double gain() const { return gain_; }
  Controller with_gain(double gain) const { return Controller(pinned_, gain); }

 private:
  std::vector<bool> pinned_;
  double gain_;
};

/// e_i = x_i - x_r for every row.
Matrix tracking_error(const Matrix& states, const VectorRef& reference);

/// u_i = -w_i * gain * e_i. Rows of unpinned nodes are exactly zero.
Matrix control_input(const Controller& controller, const Matrix& error);

/// Coupling contribution to every node's derivative.
Matrix coupling_term(const NetworkModel& model, const Matrix& states);

/// Coupling contribution in the reference equation. Zero for any Laplacian
/// with vanishing row sums, evaluated anyway to keep the equation as written.
Vector reference_coupling_term(const NetworkModel& model, const VectorRef& reference);

Matrix network_drift(const NetworkModel& model, const Matrix& states, const Matrix& inputs);
Vector reference_drift(const NetworkModel& model, const VectorRef& reference);

}  // namespace pinnet
