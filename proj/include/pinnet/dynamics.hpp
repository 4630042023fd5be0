#pragma once

// Concrete node models: phase oscillators, the Jansen-Rit cortical column and
// a linear node used as an analytic reference for the certificate machinery.

#include "pinnet/model.hpp"

#include <string>
#include <variant>

namespace pinnet {

struct KuramotoParams {
  double omega = 0.0;  // natural frequency, rad/s
};

/// Jansen-Rit column parameters (mV, 1/s). Defaults are the usual literature
/// values; connectivity constants follow C2 = 0.8 C1, C3 = C4 = 0.25 C1.
struct JansenRitParams {
  double A = 3.25;   // excitatory synaptic gain, mV
  double B = 22.0;   // inhibitory synaptic gain, mV
  double a = 100.0;  // excitatory inverse time constant, 1/s
  double b = 50.0;   // inhibitory inverse time constant, 1/s
  double C1 = 135.0;
  double C2 = 108.0;
  double C3 = 33.75;
  double C4 = 33.75;
  double v0 = 6.0;    // sigmoid midpoint, mV
  double e0 = 2.5;    // half of the maximal firing rate, 1/s
  double r = 0.56;    // sigmoid steepness, 1/mV
  double p_ext = 220.0;  // external input rate, 1/s
  double coupling_scale = 1.0;  // weight of the outgoing firing rate in h

  void validate() const;
};

struct LinearParams {
  Matrix matrix;  // f(x) = matrix * x
};

using NodeParams = std::variant<KuramotoParams, JansenRitParams, LinearParams>;

std::string kind_of(const NodeParams& params);
Eigen::Index state_dim_of(const NodeParams& params);
DynamicsPtr make_dynamics(const NodeParams& params);

// --- Kuramoto -------------------------------------------------------------

/// theta' = omega; coupling observable sin(theta).
class KuramotoNode final : public NodeDynamics {
 public:
  explicit KuramotoNode(KuramotoParams params);

  std::string_view kind() const override { return "kuramoto"; }
  Eigen::Index dim() const override { return 1; }
  Vector drift(const VectorRef& x) const override;
  Vector coupling_output(const VectorRef& x) const override;
  std::optional<double> quadratic_bound() const override { return 0.0; }
  std::optional<double> lipschitz_bound() const override { return 1.0; }

  const KuramotoParams& params() const { return params_; }

 private:
  KuramotoParams params_;
};

/// All-to-all Kuramoto coupling (K/N) * sum_j sin(theta_j - theta_i), evaluated
/// through the complex mean field in O(N).
Vector kuramoto_pairwise_coupling(const VectorRef& phases, double K);

// --- Jansen-Rit ------------------------------------------------------------

/// Potential-to-rate sigmoid 2 e0 / (1 + exp(r (v0 - v))).
double sigmoid(double v, const JansenRitParams& params);

/// State layout: y0..y2 postsynaptic potentials (pyramidal, excitatory,
/// inhibitory), y3..y5 their derivatives. `coupling_in` is an extra firing
/// rate added to the external input of the excitatory population.
Vector jansen_rit_drift(const VectorRef& state, const JansenRitParams& params,
                        double coupling_in = 0.0);

/// coupling_scale * S(y1 - y2) placed in the excitatory velocity channel (index 4).
Vector jansen_rit_coupling_output(const VectorRef& state, const JansenRitParams& params);

class JansenRitNode final : public NodeDynamics {
 public:
  explicit JansenRitNode(JansenRitParams params);

  std::string_view kind() const override { return "jansen_rit"; }
  Eigen::Index dim() const override { return 6; }
  Vector drift(const VectorRef& x) const override;
  Vector coupling_output(const VectorRef& x) const override;
  /// h depends on y1 - y2 only, so its Lipschitz constant in the Euclidean
  /// norm is sqrt(2) * |coupling_scale| * e0 * r / 2.
  std::optional<double> lipschitz_bound() const override;

  const JansenRitParams& params() const { return params_; }

 private:
  JansenRitParams params_;
};

// --- Linear ---------------------------------------------------------------

class LinearNode final : public NodeDynamics {
 public:
  explicit LinearNode(Matrix matrix);

  std::string_view kind() const override { return "linear"; }
  Eigen::Index dim() const override { return matrix_.rows(); }
  Vector drift(const VectorRef& x) const override;
  Vector coupling_output(const VectorRef& x) const override;
  /// Largest eigenvalue of the symmetric part of the matrix.
  std::optional<double> quadratic_bound() const override { return quadratic_bound_; }
  std::optional<double> lipschitz_bound() const override { return 1.0; }

  const Matrix& matrix() const { return matrix_; }

 private:
  Matrix matrix_;
  double quadratic_bound_;
};

}  // namespace pinnet
