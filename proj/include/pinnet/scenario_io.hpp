#pragma once

// YAML scenario files.
//
//   schema_version: 1
//   name: <string>
//   seed: <uint>                          (default 0)
//   model:
//     nodes: <n>
//     dynamics: {kind: kuramoto | jansen_rit | linear, params: {...}, per_node: [{...}, ...]}
//     coupling: {mode: laplacian-diffusive | pairwise-sine, c: <c> | K: <K>,
//                adjacency: complete | [[...]], normalization: none | random-walk}
//   reference: {params: {...}, initial: [...]}
//   controller: {gain: <gain>, pinned: all | none | [0/1, ...]}
//   initial: {states: [[...], ...]} | {random: {low: <x>, high: <x>}}
//   integration: {dt: 1e-3, t_end: 10, record_stride: 1}
//   estimation: {samples: 100000, safety_factor: 1.05, padding: 0.2,
//                method: auto | sampled, region: {low: [...], high: [...]}}
//
// Node parameters merge as: model defaults <- dynamics.params <- per_node[i];
// the reference uses defaults <- dynamics.params <- reference.params.

#include "pinnet/scenario.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pinnet {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::string key, int line)
      : std::runtime_error(format(message, key, line)), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  /// 1-based line, or 0 when unknown.
  int line() const { return line_; }

 private:
  static std::string format(const std::string& message, const std::string& key, int line);

  std::string key_;
  int line_;
};

/// `seed_override` replaces the file's seed before any random initial states
/// are drawn.
Scenario parse_scenario(std::string_view text, std::optional<std::uint64_t> seed_override = {});
Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = {});

/// Fully explicit YAML form of a scenario: every default filled in, every
/// node's parameters spelled out, floats printed with 17 significant digits.
std::string normalize_scenario(const Scenario& scenario);

}  // namespace pinnet
