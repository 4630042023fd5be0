#include "pinnet/model.hpp"

#include <cmath>
#include <sstream>

namespace pinnet {

namespace {

void require_shape(const Matrix& m, std::size_t n, Eigen::Index p, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != n || m.cols() != p) {
    std::ostringstream os;
    os << what << " has shape " << m.rows() << "x" << m.cols() << ", expected " << n << "x" << p;
    throw ArgumentError(os.str());
  }
}

}  // namespace

std::string to_string(CouplingMode mode) {
  switch (mode) {
    case CouplingMode::laplacian_diffusive:
      return "laplacian-diffusive";
    case CouplingMode::pairwise_sine:
      return "pairwise-sine";
  }
  return "laplacian-diffusive";
}

CouplingMode coupling_mode_from_string(const std::string& name) {
  if (name == "laplacian-diffusive") return CouplingMode::laplacian_diffusive;
  if (name == "pairwise-sine") return CouplingMode::pairwise_sine;
  throw ArgumentError("unknown coupling mode '" + name +
                      "' (expected laplacian-diffusive or pairwise-sine)");
}

NetworkModel::NetworkModel(std::vector<DynamicsPtr> nodes, DynamicsPtr reference,
                           Laplacian laplacian, double coupling, CouplingMode mode)
    : nodes_(std::move(nodes)),
      reference_(std::move(reference)),
      laplacian_(std::move(laplacian)),
      coupling_(coupling),
      mode_(mode) {
  if (!reference_) throw ArgumentError("network model needs reference dynamics");
  if (nodes_.size() != laplacian_.size()) {
    std::ostringstream os;
    os << "network has " << nodes_.size() << " nodes but the Laplacian is " << laplacian_.size()
       << "x" << laplacian_.size();
    throw ArgumentError(os.str());
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i]) throw ArgumentError("node dynamics must not be null");
    if (nodes_[i]->dim() != reference_->dim()) {
      std::ostringstream os;
      os << "node " << i + 1 << " has state dimension " << nodes_[i]->dim()
         << " but the reference has " << reference_->dim();
      throw ArgumentError(os.str());
    }
  }
  if (!std::isfinite(coupling_)) throw ArgumentError("coupling strength must be finite");
  if (mode_ == CouplingMode::pairwise_sine && reference_->dim() != 1) {
    throw ArgumentError("pairwise-sine coupling requires scalar (p = 1) node states");
  }
}

NetworkModel NetworkModel::homogeneous(DynamicsPtr dynamics, Laplacian laplacian, double coupling,
                                       CouplingMode mode) {
  std::vector<DynamicsPtr> nodes(laplacian.size(), dynamics);
  return NetworkModel(std::move(nodes), std::move(dynamics), std::move(laplacian), coupling, mode);
}

Controller::Controller(std::vector<bool> pinned, double gain)
    : pinned_(std::move(pinned)), gain_(gain) {
  if (!std::isfinite(gain_) || gain_ < 0.0) {
    throw ArgumentError("controller gain must be finite and nonnegative");
  }
}

Controller Controller::all_pinned(std::size_t n, double gain) {
  return Controller(std::vector<bool>(n, true), gain);
}

bool Controller::all_pinned() const {
  for (bool w : pinned_) {
    if (!w) return false;
  }
  return true;
}

Matrix tracking_error(const Matrix& states, const VectorRef& reference) {
  if (states.cols() != reference.size()) {
    throw ArgumentError("tracking_error: reference dimension does not match node states");
  }
  return states.rowwise() - reference.transpose();
}

Matrix control_input(const Controller& controller, const Matrix& error) {
  if (static_cast<std::size_t>(error.rows()) != controller.size()) {
    std::ostringstream os;
    os << "control_input: error has " << error.rows() << " rows but the pin mask has "
       << controller.size() << " entries";
    throw ArgumentError(os.str());
  }
  Matrix u = Matrix::Zero(error.rows(), error.cols());
  for (Eigen::Index i = 0; i < error.rows(); ++i) {
    if (controller.pinned(static_cast<std::size_t>(i))) {
      u.row(i) = -controller.gain() * error.row(i);
    }
  }
  return u;
}

Matrix coupling_term(const NetworkModel& model, const Matrix& states) {
  const std::size_t n = model.size();
  const Eigen::Index p = model.state_dim();
  require_shape(states, n, p, "states");
  const Matrix& l = model.laplacian().matrix();
  const double c = model.coupling();

  if (model.mode() == CouplingMode::pairwise_sine) {
    Matrix out = Matrix::Zero(states.rows(), 1);
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < states.rows(); ++j) {
        if (j != i && l(i, j) != 0.0) acc += -l(i, j) * std::sin(states(j, 0) - states(i, 0));
      }
      out(i, 0) = c * acc;
    }
    return out;
  }

  Matrix h(states.rows(), p);
  for (Eigen::Index j = 0; j < states.rows(); ++j) {
    h.row(j) = model.node(static_cast<std::size_t>(j)).coupling_output(states.row(j).transpose());
  }
  return -c * (l * h);
}

Vector reference_coupling_term(const NetworkModel& model, const VectorRef& reference) {
  if (reference.size() != model.state_dim()) {
    throw ArgumentError("reference state has the wrong dimension");
  }
  if (model.mode() == CouplingMode::pairwise_sine) {
    // sin(x_r - x_r) = 0 for every pair
    return Vector::Zero(reference.size());
  }
  // Every row sum multiplies the same h(x_r); the mean row sum keeps the
  // reference a single trajectory for any row-sum convention.
  const Matrix& l = model.laplacian().matrix();
  const double mean_row_sum = l.sum() / static_cast<double>(l.rows());
  return -model.coupling() * mean_row_sum * model.reference().coupling_output(reference);
}

Matrix network_drift(const NetworkModel& model, const Matrix& states, const Matrix& inputs) {
  const std::size_t n = model.size();
  const Eigen::Index p = model.state_dim();
  require_shape(states, n, p, "states");
  require_shape(inputs, n, p, "inputs");
  Matrix out = coupling_term(model, states) + inputs;
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    out.row(i) += model.node(static_cast<std::size_t>(i)).drift(states.row(i).transpose()).transpose();
  }
  return out;
}

Vector reference_drift(const NetworkModel& model, const VectorRef& reference) {
  if (reference.size() != model.state_dim()) {
    std::ostringstream os;
    os << "reference state has dimension " << reference.size() << ", expected "
       << model.state_dim();
    throw ArgumentError(os.str());
  }
  return model.reference().drift(reference) + reference_coupling_term(model, reference);
}

}  // namespace pinnet
