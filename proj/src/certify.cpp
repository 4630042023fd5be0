#include "pinnet/certify.hpp"

#include "pinnet/simulate.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace pinnet {

namespace {

// Sobol points with a Cranley-Patterson shift drawn from the seed.
class ShiftedSobol {
 public:
  ShiftedSobol(std::size_t dim, std::uint64_t seed) : engine_(dim), shift_(dim) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& s : shift_) s = unit(rng);
  }

  void next(std::vector<double>& out) {
    constexpr double scale = 1.0 / 18446744073709551616.0;  // 2^-64
    for (std::size_t k = 0; k < shift_.size(); ++k) {
      double u = static_cast<double>(engine_()) * scale + shift_[k];
      u -= std::floor(u);
      out[k] = u;
    }
  }

 private:
  boost::random::sobol engine_;
  std::vector<double> shift_;
};

void fill_from_box(const StateBox& box, const std::vector<double>& u, std::size_t offset, Vector& out) {
  for (Eigen::Index k = 0; k < box.dim(); ++k) {
    out(k) = box.low(k) + u[offset + static_cast<std::size_t>(k)] * (box.high(k) - box.low(k));
  }
}

}  // namespace

std::string to_string(EstimateSource source) {
  return source == EstimateSource::sampled ? "sampled" : "analytic";
}

double inflate(double raw, double factor) { return raw + (factor - 1.0) * std::abs(raw); }

AssumptionEstimate estimate_theta_f(const VectorMap& f, const std::vector<Vector>& reference_samples,
                                    const StateBox& region, const SamplingOptions& options) {
  if (options.samples == 0) throw EstimationError("theta_f: sample count must be >= 1");
  if (!region.non_degenerate()) throw EstimationError("theta_f: sampling region is degenerate");
  if (reference_samples.empty()) throw EstimationError("theta_f: no reference samples given");
  const Eigen::Index p = region.dim();
  for (const auto& xr : reference_samples) {
    if (xr.size() != p) throw EstimationError("theta_f: reference sample has the wrong dimension");
  }

  const bool pick_reference = reference_samples.size() > 1;
  const std::size_t dim = static_cast<std::size_t>(p) + (pick_reference ? 1 : 0);
  ShiftedSobol qrng(dim, options.seed);
  std::vector<double> u(dim);
  Vector y(p);

  // f(x_r) is reused across samples that pick the same reference point.
  std::vector<std::optional<Vector>> f_ref(reference_samples.size());

  double best = -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  for (std::size_t s = 0; s < options.samples; ++s) {
    qrng.next(u);
    std::size_t idx = 0;
    if (pick_reference) {
      idx = std::min(reference_samples.size() - 1,
                     static_cast<std::size_t>(u[0] * static_cast<double>(reference_samples.size())));
    }
    fill_from_box(region, u, pick_reference ? 1 : 0, y);
    const Vector& xr = reference_samples[idx];
    const Vector z = y - xr;
    const double zz = z.squaredNorm();
    if (zz == 0.0) continue;
    if (!f_ref[idx]) f_ref[idx] = f(xr);
    const double ratio = z.dot(f(y) - *f_ref[idx]) / zz;
    if (!std::isfinite(ratio)) continue;
    best = std::max(best, ratio);
    ++used;
  }
  if (used == 0) throw EstimationError("theta_f: no usable samples (all z were zero or non-finite)");

  AssumptionEstimate est;
  est.raw = best;
  est.value = inflate(best, options.safety_factor);
  est.source = EstimateSource::sampled;
  est.region = region;
  est.sample_count = used;
  return est;
}

AssumptionEstimate estimate_theta_h(const VectorMap& h, const StateBox& region,
                                    const SamplingOptions& options) {
  if (options.samples == 0) throw EstimationError("theta_h: sample count must be >= 1");
  if (!region.non_degenerate()) throw EstimationError("theta_h: sampling region is degenerate");
  const Eigen::Index p = region.dim();
  ShiftedSobol qrng(2 * static_cast<std::size_t>(p), options.seed);
  std::vector<double> u(2 * static_cast<std::size_t>(p));
  Vector z(p);
  Vector y(p);

  double best = 0.0;
  std::size_t used = 0;
  for (std::size_t s = 0; s < options.samples; ++s) {
    qrng.next(u);
    fill_from_box(region, u, 0, z);
    fill_from_box(region, u, static_cast<std::size_t>(p), y);
    const double dist = (z - y).norm();
    if (dist == 0.0) continue;
    const double ratio = (h(z) - h(y)).norm() / dist;
    if (!std::isfinite(ratio)) continue;
    best = std::max(best, ratio);
    ++used;
  }
  if (used == 0) throw EstimationError("theta_h: no usable sample pairs");

  AssumptionEstimate est;
  est.raw = best;
  est.value = inflate(best, options.safety_factor);
  est.source = EstimateSource::sampled;
  est.region = region;
  est.sample_count = used;
  return est;
}

double certificate_lambda_max(double theta_f, double theta_h, double coupling, double norm_L_kron,
                              double gain, const std::vector<bool>& pin_mask) {
  const double bracket = theta_f + coupling * theta_h * norm_L_kron;
  double worst = -std::numeric_limits<double>::infinity();
  for (bool w : pin_mask) worst = std::max(worst, bracket - gain * (w ? 1.0 : 0.0));
  return pin_mask.empty() ? bracket : worst;
}

std::optional<double> min_certified_gain(double theta_f, double theta_h, double coupling,
                                         double norm_L_kron, const std::vector<bool>& pin_mask) {
  const double bracket = theta_f + coupling * theta_h * norm_L_kron;
  if (bracket <= 0.0) return 0.0;
  const bool all_pinned = std::all_of(pin_mask.begin(), pin_mask.end(), [](bool w) { return w; });
  if (!all_pinned) return std::nullopt;
  return bracket;
}

Certificate Certificate::with_gain(double new_gain) const {
  Certificate out = *this;
  out.gain = new_gain;
  out.lambda_max = certificate_lambda_max(theta_f, theta_h, coupling, norm_L_kron, new_gain, pin_mask);
  out.certified = out.lambda_max <= 0.0;
  return out;
}

Certificate make_certificate(const AssumptionEstimate& theta_f, const AssumptionEstimate& theta_h,
                             double coupling, double norm_L_kron, const Controller& controller) {
  if (theta_h.value < 0.0) throw ArgumentError("theta_h must be nonnegative");
  Certificate cert;
  cert.theta_f = theta_f.value;
  cert.theta_h = theta_h.value;
  cert.coupling = coupling;
  cert.norm_L_kron = norm_L_kron;
  cert.gain = controller.gain();
  cert.pin_mask = controller.pin_mask();
  cert.theta_f_estimate = theta_f;
  cert.theta_h_estimate = theta_h;
  cert.lambda_max = certificate_lambda_max(cert.theta_f, cert.theta_h, coupling, norm_L_kron,
                                           cert.gain, cert.pin_mask);
  cert.certified = cert.lambda_max <= 0.0;
  cert.min_gain = min_certified_gain(cert.theta_f, cert.theta_h, coupling, norm_L_kron, cert.pin_mask);
  return cert;
}

StateBox pilot_region(const Scenario& scenario, std::vector<Vector>* reference_samples) {
  Scenario pilot = scenario;
  pilot.gain = 0.0;
  TrajectoryRecord rec;
  try {
    rec = simulate(pilot);
  } catch (const SimulationFault& fault) {
    rec = fault.partial();
  }
  const Eigen::Index p = scenario.state_dim();
  StateBox box{Vector::Constant(p, std::numeric_limits<double>::infinity()),
               Vector::Constant(p, -std::numeric_limits<double>::infinity())};
  for (std::size_t k = 0; k < rec.size(); ++k) {
    box.low = box.low.cwiseMin(rec.reference[k]);
    box.high = box.high.cwiseMax(rec.reference[k]);
    box.low = box.low.cwiseMin(Vector(rec.states[k].colwise().minCoeff().transpose()));
    box.high = box.high.cwiseMax(Vector(rec.states[k].colwise().maxCoeff().transpose()));
  }
  if (reference_samples) {
    constexpr std::size_t kMaxReferenceSamples = 256;
    const std::size_t stride = std::max<std::size_t>(1, rec.size() / kMaxReferenceSamples);
    reference_samples->clear();
    for (std::size_t k = 0; k < rec.size(); k += stride) reference_samples->push_back(rec.reference[k]);
  }
  return box.padded(scenario.estimation.padding);
}

namespace {

std::vector<DynamicsPtr> distinct_models(const NetworkModel& model) {
  std::vector<DynamicsPtr> out = model.nodes();
  out.push_back(model.reference_ptr());
  return out;
}

}  // namespace

Certificate certify_scenario(const Scenario& scenario) {
  const NetworkModel model = build_model(scenario);
  const Controller controller = build_controller(scenario);
  const auto dynamics = distinct_models(model);
  const bool force_sampling = scenario.estimation.method == EstimationMethod::sampled;

  auto all_have = [&](auto getter) {
    return std::all_of(dynamics.begin(), dynamics.end(),
                       [&](const DynamicsPtr& d) { return getter(*d).has_value(); });
  };
  const bool analytic_f = !force_sampling && all_have([](const NodeDynamics& d) { return d.quadratic_bound(); });
  const bool analytic_h = !force_sampling && all_have([](const NodeDynamics& d) { return d.lipschitz_bound(); });

  std::optional<StateBox> region = scenario.estimation.region;
  std::vector<Vector> reference_samples;
  if (!analytic_f || !analytic_h) {
    StateBox pilot = pilot_region(scenario, &reference_samples);
    if (!region) region = pilot;
    if (scenario.estimation.region) {
      // Keep only reference points inside the user-declared region.
      std::erase_if(reference_samples, [&](const Vector& xr) {
        return (xr.array() < region->low.array()).any() || (xr.array() > region->high.array()).any();
      });
      if (reference_samples.empty()) reference_samples.push_back(0.5 * (region->low + region->high));
    }
  }

  SamplingOptions sampling{scenario.estimation.samples, scenario.estimation.safety_factor,
                           scenario.seed};

  AssumptionEstimate theta_f;
  if (analytic_f) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& d : dynamics) best = std::max(best, *d->quadratic_bound());
    theta_f.value = theta_f.raw = best;
    theta_f.source = EstimateSource::analytic;
  } else {
    theta_f.value = theta_f.raw = -std::numeric_limits<double>::infinity();
    for (const auto& d : dynamics) {
      const auto est = estimate_theta_f([&d](const VectorRef& x) { return d->drift(x); },
                                        reference_samples, *region, sampling);
      if (est.value > theta_f.value) theta_f = est;
    }
  }

  AssumptionEstimate theta_h;
  if (analytic_h) {
    double best = 0.0;
    for (const auto& d : dynamics) best = std::max(best, *d->lipschitz_bound());
    theta_h.value = theta_h.raw = best;
    theta_h.source = EstimateSource::analytic;
  } else {
    for (const auto& d : dynamics) {
      const auto est = estimate_theta_h([&d](const VectorRef& x) { return d->coupling_output(x); },
                                        *region, sampling);
      if (est.value >= theta_h.value) theta_h = est;
    }
  }

  const double norm = kron_identity_norm(model.laplacian(), static_cast<std::size_t>(model.state_dim()));
  return make_certificate(theta_f, theta_h, model.coupling(), norm, controller);
}

std::string describe(const Certificate& c) {
  std::ostringstream os;
  os << std::setprecision(10);
  auto estimate_line = [&os](const char* name, const AssumptionEstimate& e) {
    os << name << " = " << e.value << " (" << to_string(e.source);
    if (e.source == EstimateSource::sampled) {
      os << ", raw " << e.raw << ", " << e.sample_count << " samples";
    }
    os << ")\n";
  };
  estimate_line("theta_f", c.theta_f_estimate);
  estimate_line("theta_h", c.theta_h_estimate);
  os << "c = " << c.coupling << "\n";
  os << "||L kron I_p|| = " << c.norm_L_kron << "\n";
  os << "bracket theta_f + c theta_h ||L kron I_p|| = " << c.bracket() << "\n";
  os << "gain = " << c.gain << ", pinned = ";
  std::size_t pinned = 0;
  for (bool w : c.pin_mask) pinned += w ? 1 : 0;
  os << pinned << "/" << c.pin_mask.size() << "\n";
  os << "lambda_max = " << c.lambda_max << "\n";
  if (c.min_gain) {
    os << "minimal certified gain = " << *c.min_gain << "\n";
  } else {
    os << "minimal certified gain = none (an unpinned node keeps a positive eigenvalue)\n";
  }
  os << "verdict: " << (c.certified ? "certified" : "not certified")
     << (c.certified ? " (lambda_max <= 0)" : " (sufficient condition not met)") << "\n";
  return os.str();
}

}  // namespace pinnet
