#pragma once

// A complete experiment: node models, topology, reference, controller,
// initial states and integration/estimation settings.

#include "pinnet/dynamics.hpp"
#include "pinnet/graph.hpp"
#include "pinnet/integrate.hpp"
#include "pinnet/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pinnet {

/// Axis-aligned box in R^p.
struct StateBox {
  Vector low;
  Vector high;

  Eigen::Index dim() const { return low.size(); }
  bool non_degenerate() const;
  /// Expands every side by `fraction` of its extent; zero-width sides grow by
  /// `fraction * max(1, |center|)`.
  StateBox padded(double fraction) const;
  void validate() const;
};

struct CouplingSpec {
  CouplingMode mode = CouplingMode::laplacian_diffusive;
  /// c in laplacian-diffusive mode; K in pairwise-sine mode, where c = K / N.
  double strength = 0.0;
  /// Edge weights; unset means the complete graph with unit weights.
  std::optional<Matrix> adjacency;
  LaplacianNormalization normalization = LaplacianNormalization::none;
};

enum class EstimationMethod { automatic, sampled };

std::string to_string(EstimationMethod method);

struct EstimationSettings {
  std::size_t samples = 100000;
  double safety_factor = 1.05;
  /// Padding of the pilot-run bounding box, as a fraction of each extent.
  double padding = 0.2;
  EstimationMethod method = EstimationMethod::automatic;
  std::optional<StateBox> region;
};

struct Scenario {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  std::uint64_t seed = 0;
  std::vector<NodeParams> nodes;
  CouplingSpec coupling;
  NodeParams reference;
  Vector reference_initial;
  std::vector<bool> pinned;
  double gain = 0.0;
  Matrix initial_states;  // n x p
  IntegrationSettings integration;
  EstimationSettings estimation;

  std::size_t size() const { return nodes.size(); }
  Eigen::Index state_dim() const { return state_dim_of(reference); }

  /// Throws ArgumentError describing the first inconsistency found.
  void validate() const;
};

Adjacency scenario_adjacency(const Scenario& scenario);
/// Network coupling strength c (K / N for pairwise-sine).
double scenario_coupling(const Scenario& scenario);
NetworkModel build_model(const Scenario& scenario);
Controller build_controller(const Scenario& scenario);

}  // namespace pinnet
