#include "pinnet/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pinnet {

namespace {

void check_inequality(BoundResult& result, double lhs, double rhs, double slack, double t) {
  const double margin = rhs - lhs;
  result.worst_margin = std::min(result.worst_margin, margin);
  if (margin < -slack) result.violation_times.push_back(t);
}

}  // namespace

BoundReport check_proof_bounds(const TrajectoryRecord& rec, const Certificate& cert,
                               const BoundCheckOptions& options) {
  if (cert.pin_mask.size() != rec.nodes) {
    throw ArgumentError("check_proof_bounds: certificate and record have different node counts");
  }
  BoundReport report;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double terms = static_cast<double>(rec.nodes * static_cast<std::size_t>(rec.state_dim) + 1);
  const double rounding = 16.0 * terms * eps;
  const double coupling_rate = cert.coupling * cert.theta_h * cert.norm_L_kron;

  for (std::size_t k = 0; k < rec.size(); ++k) {
    const Matrix e = rec.error(k);
    const double ee = e.squaredNorm();
    double pinned_ee = 0.0;
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      if (cert.pin_mask[static_cast<std::size_t>(i)]) pinned_ee += e.row(i).squaredNorm();
    }
    const double t = rec.times[k];
    const double v1 = rec.v1[k];
    const double v2 = rec.v2[k];
    const double v3 = rec.v3[k];

    const double rhs1 = cert.theta_f * ee;
    check_inequality(report.v1, v1, rhs1,
                     options.relative * (std::abs(v1) + std::abs(rhs1)) + rounding * rec.v1_scale[k], t);

    const double rhs2 = coupling_rate * ee;
    check_inequality(report.v2, v2, rhs2,
                     options.relative * (std::abs(v2) + std::abs(rhs2)) + rounding * rec.v2_scale[k], t);

    const double rhs3 = -cert.gain * pinned_ee;
    const double dev = std::abs(v3 - rhs3);
    report.v3.worst_margin = std::min(report.v3.worst_margin, -dev);
    if (dev > options.identity_relative * std::max(std::abs(rhs3), std::abs(v3))) {
      report.v3.violation_times.push_back(t);
    }

    const double total = v1 + v2 + v3;
    const double rhs_total = cert.lambda_max * ee;
    check_inequality(report.total, total, rhs_total,
                     options.relative * (std::abs(total) + std::abs(rhs_total)) +
                         rounding * (rec.v1_scale[k] + rec.v2_scale[k] + std::abs(v3)),
                     t);
  }
  return report;
}

std::size_t lyapunov_uphill_steps(const TrajectoryRecord& rec, double relative) {
  std::size_t count = 0;
  for (std::size_t k = 1; k < rec.V.size(); ++k) {
    if (rec.V[k] - rec.V[k - 1] > relative * std::max(1.0, rec.V[k - 1])) ++count;
  }
  return count;
}

}  // namespace pinnet
