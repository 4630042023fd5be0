#include "pinnet/scenario.hpp"

#include <cmath>
#include <sstream>

namespace pinnet {

bool StateBox::non_degenerate() const {
  if (low.size() == 0 || low.size() != high.size()) return false;
  return (high - low).minCoeff() > 0.0;
}

StateBox StateBox::padded(double fraction) const {
  StateBox out{low, high};
  for (Eigen::Index k = 0; k < low.size(); ++k) {
    const double extent = high(k) - low(k);
    const double center = 0.5 * (high(k) + low(k));
    const double pad = extent > 0.0 ? fraction * extent : fraction * std::max(1.0, std::abs(center));
    out.low(k) -= pad;
    out.high(k) += pad;
  }
  return out;
}

void StateBox::validate() const {
  if (low.size() != high.size()) throw ArgumentError("state box bounds differ in dimension");
  if (!low.allFinite() || !high.allFinite()) throw ArgumentError("state box bounds must be finite");
  if (!non_degenerate()) throw ArgumentError("state box must have positive extent in every dimension");
}

std::string to_string(EstimationMethod method) {
  return method == EstimationMethod::sampled ? "sampled" : "auto";
}

void Scenario::validate() const {
  const std::size_t n = nodes.size();
  if (n == 0) throw ArgumentError("scenario needs at least one node");
  const Eigen::Index p = state_dim();
  const std::string ref_kind = kind_of(reference);
  for (std::size_t i = 0; i < n; ++i) {
    if (kind_of(nodes[i]) != ref_kind) {
      throw ArgumentError("node " + std::to_string(i + 1) + " has dynamics kind '" +
                          kind_of(nodes[i]) + "' but the reference is '" + ref_kind + "'");
    }
    if (state_dim_of(nodes[i]) != p) {
      throw ArgumentError("node " + std::to_string(i + 1) + " has a different state dimension");
    }
  }
  if (reference_initial.size() != p) {
    std::ostringstream os;
    os << "reference.initial has " << reference_initial.size() << " components, expected " << p;
    throw ArgumentError(os.str());
  }
  if (pinned.size() != n) {
    std::ostringstream os;
    os << "controller.pinned has " << pinned.size() << " entries, expected " << n;
    throw ArgumentError(os.str());
  }
  if (!std::isfinite(gain) || gain < 0.0) throw ArgumentError("controller.gain must be >= 0");
  if (static_cast<std::size_t>(initial_states.rows()) != n || initial_states.cols() != p) {
    std::ostringstream os;
    os << "initial.states is " << initial_states.rows() << "x" << initial_states.cols()
       << ", expected " << n << "x" << p;
    throw ArgumentError(os.str());
  }
  if (!initial_states.allFinite() || !reference_initial.allFinite()) {
    throw ArgumentError("initial states must be finite");
  }
  if (coupling.adjacency && static_cast<std::size_t>(coupling.adjacency->rows()) != n) {
    throw ArgumentError("model.coupling.adjacency must be " + std::to_string(n) + "x" +
                        std::to_string(n));
  }
  if (coupling.mode == CouplingMode::pairwise_sine && p != 1) {
    throw ArgumentError("pairwise-sine coupling requires scalar node states");
  }
  integration.validate();
  if (estimation.samples == 0) throw ArgumentError("estimation.samples must be >= 1");
  if (!(estimation.safety_factor >= 1.0)) throw ArgumentError("estimation.safety_factor must be >= 1");
  if (!(estimation.padding >= 0.0)) throw ArgumentError("estimation.padding must be >= 0");
  if (estimation.region) {
    estimation.region->validate();
    if (estimation.region->dim() != p) throw ArgumentError("estimation.region has the wrong dimension");
  }
}

Adjacency scenario_adjacency(const Scenario& scenario) {
  if (scenario.coupling.adjacency) return Adjacency(*scenario.coupling.adjacency);
  return Adjacency::complete(scenario.size());
}

double scenario_coupling(const Scenario& scenario) {
  if (scenario.coupling.mode == CouplingMode::pairwise_sine) {
    return scenario.coupling.strength / static_cast<double>(scenario.size());
  }
  return scenario.coupling.strength;
}

NetworkModel build_model(const Scenario& scenario) {
  scenario.validate();
  std::vector<DynamicsPtr> nodes;
  nodes.reserve(scenario.size());
  for (const auto& params : scenario.nodes) nodes.push_back(make_dynamics(params));
  Laplacian laplacian = build_laplacian(scenario_adjacency(scenario), scenario.coupling.normalization);
  return NetworkModel(std::move(nodes), make_dynamics(scenario.reference), std::move(laplacian),
                      scenario_coupling(scenario), scenario.coupling.mode);
}

Controller build_controller(const Scenario& scenario) {
  return Controller(scenario.pinned, scenario.gain);
}

}  // namespace pinnet
