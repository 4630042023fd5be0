#include "pinnet/dynamics.hpp"

#include "pinnet/integrate.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace pinnet {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dim(const VectorRef& x, Eigen::Index p, std::string_view who) {
  if (x.size() != p) {
    std::ostringstream os;
    os << who << ": state has dimension " << x.size() << ", expected " << p;
    throw ArgumentError(os.str());
  }
}

}  // namespace

std::string kind_of(const NodeParams& params) {
  return std::visit(overloaded{[](const KuramotoParams&) { return std::string("kuramoto"); },
                               [](const JansenRitParams&) { return std::string("jansen_rit"); },
                               [](const LinearParams&) { return std::string("linear"); }},
                    params);
}

Eigen::Index state_dim_of(const NodeParams& params) {
  return std::visit(overloaded{[](const KuramotoParams&) -> Eigen::Index { return 1; },
                               [](const JansenRitParams&) -> Eigen::Index { return 6; },
                               [](const LinearParams& p) { return p.matrix.rows(); }},
                    params);
}

DynamicsPtr make_dynamics(const NodeParams& params) {
  return std::visit(
      overloaded{
          [](const KuramotoParams& p) -> DynamicsPtr { return std::make_shared<KuramotoNode>(p); },
          [](const JansenRitParams& p) -> DynamicsPtr {
            return std::make_shared<JansenRitNode>(p);
          },
          [](const LinearParams& p) -> DynamicsPtr {
            return std::make_shared<LinearNode>(p.matrix);
          }},
      params);
}

// --- Kuramoto -------------------------------------------------------------

KuramotoNode::KuramotoNode(KuramotoParams params) : params_(params) {
  if (!std::isfinite(params_.omega)) throw ArgumentError("Kuramoto omega must be finite");
}

Vector KuramotoNode::drift(const VectorRef& x) const {
  require_dim(x, 1, "kuramoto drift");
  return Vector::Constant(1, params_.omega);
}

Vector KuramotoNode::coupling_output(const VectorRef& x) const {
  require_dim(x, 1, "kuramoto coupling");
  return Vector::Constant(1, std::sin(x(0)));
}

Vector kuramoto_pairwise_coupling(const VectorRef& phases, double K) {
  const Eigen::Index n = phases.size();
  if (n == 0) throw ArgumentError("kuramoto_pairwise_coupling: need at least one oscillator");
  // sum_j sin(t_j - t_i) = Im(exp(-i t_i) * sum_j exp(i t_j))
  std::complex<double> field{0.0, 0.0};
  for (Eigen::Index j = 0; j < n; ++j) field += std::polar(1.0, phases(j));
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i) = (K / static_cast<double>(n)) * (std::polar(1.0, -phases(i)) * field).imag();
  }
  return out;
}

// --- Jansen-Rit ------------------------------------------------------------

void JansenRitParams::validate() const {
  const double all[] = {A, B, a, b, C1, C2, C3, C4, v0, e0, r, p_ext, coupling_scale};
  for (double v : all) {
    if (!std::isfinite(v)) throw ArgumentError("Jansen-Rit parameters must be finite");
  }
  if (a <= 0.0 || b <= 0.0) throw ArgumentError("Jansen-Rit rate constants a, b must be > 0");
  if (r <= 0.0 || e0 <= 0.0) throw ArgumentError("Jansen-Rit sigmoid needs r > 0 and e0 > 0");
}

double sigmoid(double v, const JansenRitParams& params) {
  return 2.0 * params.e0 / (1.0 + std::exp(params.r * (params.v0 - v)));
}

Vector jansen_rit_drift(const VectorRef& y, const JansenRitParams& p, double coupling_in) {
  require_dim(y, 6, "jansen_rit_drift");
  if (!y.allFinite()) throw IntegrationFault("Jansen-Rit state is not finite");
  Vector dy(6);
  dy(0) = y(3);
  dy(1) = y(4);
  dy(2) = y(5);
  dy(3) = p.A * p.a * sigmoid(y(1) - y(2), p) - 2.0 * p.a * y(3) - p.a * p.a * y(0);
  dy(4) = p.A * p.a * (p.p_ext + coupling_in + p.C2 * sigmoid(p.C1 * y(0), p)) - 2.0 * p.a * y(4) -
          p.a * p.a * y(1);
  dy(5) = p.B * p.b * p.C4 * sigmoid(p.C3 * y(0), p) - 2.0 * p.b * y(5) - p.b * p.b * y(2);
  return dy;
}

Vector jansen_rit_coupling_output(const VectorRef& y, const JansenRitParams& p) {
  require_dim(y, 6, "jansen_rit_coupling_output");
  Vector h = Vector::Zero(6);
  h(4) = p.coupling_scale * sigmoid(y(1) - y(2), p);
  return h;
}

JansenRitNode::JansenRitNode(JansenRitParams params) : params_(params) { params_.validate(); }

Vector JansenRitNode::drift(const VectorRef& x) const { return jansen_rit_drift(x, params_); }

Vector JansenRitNode::coupling_output(const VectorRef& x) const {
  return jansen_rit_coupling_output(x, params_);
}

std::optional<double> JansenRitNode::lipschitz_bound() const {
  return std::sqrt(2.0) * std::abs(params_.coupling_scale) * params_.e0 * params_.r / 2.0;
}

// --- Linear ---------------------------------------------------------------

LinearNode::LinearNode(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw ArgumentError("linear node matrix must be square and non-empty");
  }
  if (!matrix_.allFinite()) throw ArgumentError("linear node matrix must be finite");
  const Matrix sym = 0.5 * (matrix_ + matrix_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  quadratic_bound_ = eig.eigenvalues().maxCoeff();
}

Vector LinearNode::drift(const VectorRef& x) const {
  require_dim(x, matrix_.rows(), "linear drift");
  return matrix_ * x;
}

Vector LinearNode::coupling_output(const VectorRef& x) const {
  require_dim(x, matrix_.rows(), "linear coupling");
  return x;
}

}  // namespace pinnet
