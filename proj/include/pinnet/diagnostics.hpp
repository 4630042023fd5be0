#pragma once

// Per-sample checks of the inequalities behind the certificate:
//   v1 <= theta_f e.e
//   v2 <= c theta_h ||L kron I_p|| e.e
//   v3 == -gain e.(W kron I_p) e
//   v1 + v2 + v3 <= lambda_max e.e

#include "pinnet/certify.hpp"
#include "pinnet/simulate.hpp"

#include <string>
#include <vector>

namespace pinnet {

struct BoundCheckOptions {
  /// Relative slack on inequalities, on top of the rounding allowance derived
  /// from the recorded v1/v2 magnitudes.
  double relative = 1e-10;
  /// Relative tolerance of the v3 identity.
  double identity_relative = 1e-12;
};

struct BoundResult {
  std::string name;
  /// min over samples of (rhs - lhs); for the v3 identity, -|lhs - rhs|.
  double worst_margin = 0.0;
  std::vector<double> violation_times;

  std::size_t violations() const { return violation_times.size(); }
};

struct BoundReport {
  BoundResult v1{"v1 <= theta_f e'e", 0.0, {}};
  BoundResult v2{"v2 <= c theta_h ||L(x)I|| e'e", 0.0, {}};
  BoundResult v3{"v3 == -gain e'(W(x)I)e", 0.0, {}};
  BoundResult total{"v1+v2+v3 <= lambda_max e'e", 0.0, {}};

  std::size_t total_violations() const {
    return v1.violations() + v2.violations() + v3.violations() + total.violations();
  }
};

BoundReport check_proof_bounds(const TrajectoryRecord& record, const Certificate& certificate,
                               const BoundCheckOptions& options = {});

/// Number of consecutive samples where V rises by more than
/// relative * max(1, V).
std::size_t lyapunov_uphill_steps(const TrajectoryRecord& record, double relative = 1e-7);

}  // namespace pinnet
