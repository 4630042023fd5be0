#pragma once

// Sufficient stability certificate for pinning control.
//
// With theta_f the quadratic-condition constant of f around the reference,
// theta_h the Lipschitz constant of h and W = diag(w), the certificate matrix
//
//   ((theta_f + c * theta_h * ||L kron I_p||) I_n - gain * W) kron I_p
//
// is diagonal, so its largest eigenvalue is max_i (bracket - gain * w_i).
// lambda_max <= 0 certifies convergence onto x_r(t); a positive value only
// means the condition is not met.

#include "pinnet/model.hpp"
#include "pinnet/scenario.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinnet {

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EstimateSource { analytic, sampled };

std::string to_string(EstimateSource source);

struct AssumptionEstimate {
  double value = 0.0;  // constant used by the certificate (inflated when sampled)
  double raw = 0.0;    // supremum over the samples, before inflation
  EstimateSource source = EstimateSource::analytic;
  std::optional<StateBox> region;
  std::size_t sample_count = 0;
};

struct SamplingOptions {
  std::size_t samples = 100000;
  double safety_factor = 1.05;
  std::uint64_t seed = 0;
};

using VectorMap = std::function<Vector(const VectorRef&)>;

/// Moves `raw` away from zero in the conservative direction:
/// raw + (factor - 1) * |raw|.
double inflate(double raw, double factor);

/// Largest sampled z.(f(z + x_r) - f(x_r)) / z.z with x_r drawn from
/// `reference_samples` and z + x_r drawn from `region` on a shifted Sobol
/// sequence. Zero z are skipped.
AssumptionEstimate estimate_theta_f(const VectorMap& f, const std::vector<Vector>& reference_samples,
                                    const StateBox& region, const SamplingOptions& options = {});

/// Largest sampled |h(z) - h(y)| / |z - y| over pairs in `region`.
AssumptionEstimate estimate_theta_h(const VectorMap& h, const StateBox& region,
                                    const SamplingOptions& options = {});

/// max_i (theta_f + c * theta_h * norm_L_kron - gain * w_i)
double certificate_lambda_max(double theta_f, double theta_h, double coupling, double norm_L_kron,
                              double gain, const std::vector<bool>& pin_mask);

/// Smallest gain with lambda_max <= 0, or nullopt when an unpinned node keeps
/// a positive eigenvalue for every gain.
std::optional<double> min_certified_gain(double theta_f, double theta_h, double coupling,
                                         double norm_L_kron, const std::vector<bool>& pin_mask);

struct Certificate {
  double theta_f = 0.0;
  double theta_h = 0.0;
  double coupling = 0.0;
  double norm_L_kron = 0.0;
  double gain = 0.0;
  std::vector<bool> pin_mask;
  double lambda_max = 0.0;
  bool certified = false;

  AssumptionEstimate theta_f_estimate;
  AssumptionEstimate theta_h_estimate;
  std::optional<double> min_gain;

  double bracket() const { return theta_f + coupling * theta_h * norm_L_kron; }
  /// Same constants, different gain.
  Certificate with_gain(double new_gain) const;
};

Certificate make_certificate(const AssumptionEstimate& theta_f, const AssumptionEstimate& theta_h,
                             double coupling, double norm_L_kron, const Controller& controller);

/// Runs the estimators (closed form when every node model has one and the
/// scenario does not force sampling), computes ||L kron I_p|| and evaluates
/// the certificate at the scenario's gain.
Certificate certify_scenario(const Scenario& scenario);

/// Bounding box of an uncontrolled run of the scenario, padded by
/// `scenario.estimation.padding`. Reference states along the run are
/// returned through `reference_samples` when given.
StateBox pilot_region(const Scenario& scenario, std::vector<Vector>* reference_samples = nullptr);

/// Human-readable report. Never calls an uncertified system unstable: the
/// condition is sufficient only.
std::string describe(const Certificate& certificate);

}  // namespace pinnet
