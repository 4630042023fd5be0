#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pinnet {

/// A state or derivative left the finite range during integration.
class IntegrationFault : public std::runtime_error {
 public:
  explicit IntegrationFault(const std::string& what, std::optional<double> time = std::nullopt)
      : std::runtime_error(what), time_(time) {}

  std::optional<double> time() const { return time_; }

 private:
  std::optional<double> time_;
};

/// Any state component above this magnitude is treated as a blow-up.
inline constexpr double kBlowUpThreshold = 1e9;

struct IntegrationSettings {
  double dt = 1e-3;        // s
  double t_end = 1.0;      // s
  std::size_t record_stride = 1;

  void validate() const;
  /// Number of steps to reach t_end; the last step is shortened when t_end is
  /// not a multiple of dt.
  std::size_t step_count() const;
};

/// One classical fourth-order Runge-Kutta step of y' = drift(y).
template <class Drift>
Eigen::VectorXd step_rk4(Drift&& drift, const Eigen::VectorXd& y, double dt, double t = 0.0) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  const Eigen::VectorXd k1 = drift(y);
  const Eigen::VectorXd k2 = drift(Eigen::VectorXd(y + 0.5 * dt * k1));
  const Eigen::VectorXd k3 = drift(Eigen::VectorXd(y + 0.5 * dt * k2));
  const Eigen::VectorXd k4 = drift(Eigen::VectorXd(y + dt * k3));
  Eigen::VectorXd next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) {
    std::ostringstream os;
    os << "non-finite state after RK4 step at t = " << t + dt;
    throw IntegrationFault(os.str(), t + dt);
  }
  return next;
}

}  // namespace pinnet
