#pragma once

// Joint integration of the controlled network and its reference, with the
// Lyapunov function V(e) = 1/2 sum_i |e_i|^2 and the split of dV/dt into
//   v1 = sum_i e_i . (f_i(x_i) - f_r(x_r))
//   v2 = sum_i e_i . (coupling_i(x) - reference_coupling(x_r))
//   v3 = sum_i e_i . u_i
// recorded along the trajectory.

#include "pinnet/integrate.hpp"
#include "pinnet/model.hpp"
#include "pinnet/scenario.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace pinnet {

struct TrajectoryRecord {
  std::size_t nodes = 0;
  Eigen::Index state_dim = 0;
  std::string kind;  // reference dynamics kind, e.g. "jansen_rit"

  std::vector<double> times;
  std::vector<Matrix> states;      // n x p per sample
  std::vector<Vector> reference;   // p per sample
  std::vector<Matrix> inputs;      // n x p per sample
  std::vector<Vector> error_norms; // |e_i| per sample
  std::vector<double> V;
  std::vector<double> v1;
  std::vector<double> v2;
  std::vector<double> v3;
  // Magnitudes that bound the rounding error of v1 and v2: sums of |e_i|
  // times the size of the terms that produced the factor it multiplies.
  std::vector<double> v1_scale;
  std::vector<double> v2_scale;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  Matrix error(std::size_t k) const { return tracking_error(states[k], reference[k]); }
  /// Frobenius norm of the whole error matrix at sample k.
  double total_error_norm(std::size_t k) const;
};

/// Integration aborted; `partial()` holds every sample up to the last finite state.
class SimulationFault : public IntegrationFault {
 public:
  SimulationFault(const std::string& what, double time, TrajectoryRecord partial)
      : IntegrationFault(what, time), partial_(std::move(partial)) {}

  const TrajectoryRecord& partial() const { return partial_; }

 private:
  TrajectoryRecord partial_;
};

struct VDecomposition {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  double v1_scale = 0.0;
  double v2_scale = 0.0;

  double total() const { return v1 + v2 + v3; }
};

double lyapunov_V(const Matrix& error);

VDecomposition v_decomposition(const NetworkModel& model, const Matrix& states,
                               const VectorRef& reference, const Matrix& inputs);

TrajectoryRecord simulate(const NetworkModel& model, const Controller& controller,
                          const Matrix& initial_states, const Vector& reference_initial,
                          const IntegrationSettings& settings);

TrajectoryRecord simulate(const Scenario& scenario);

/// Kuramoto order parameter |mean(exp(i theta))|.
double order_parameter(const VectorRef& phases);
/// Same, for a network whose node states are scalar phases.
double order_parameter(const NetworkModel& model, const Matrix& states);

}  // namespace pinnet
