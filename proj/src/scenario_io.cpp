#include "pinnet/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>

namespace pinnet {

std::string ParseError::format(const std::string& message, const std::string& key, int line) {
  std::ostringstream os;
  os << "scenario";
  if (line > 0) os << " line " << line;
  if (!key.empty()) os << " [" << key << "]";
  os << ": " << message;
  return os.str();
}

namespace {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& message) {
  throw ParseError(message, key, line_of(node));
}

void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) fail(node, path, "expected a mapping");
}

void allow_keys(const YAML::Node& node, const std::string& path,
                std::initializer_list<const char*> allowed) {
  require_map(node, path);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(kv.first, join(path, key), "unknown key '" + key + "'");
  }
}

YAML::Node require(const YAML::Node& parent, const std::string& path, const char* key) {
  const YAML::Node node = parent[key];
  if (!node) fail(parent, join(path, key), std::string("missing required key '") + key + "'");
  return node;
}

double as_double(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(node, key, "expected a number");
  }
}

std::uint64_t as_uint(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    fail(node, key, "expected a nonnegative integer");
  }
}

std::string as_string(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, key, "expected a string");
  return node.as<std::string>();
}

Vector as_vector(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail(node, key, "expected a list of numbers");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_double(node[i], key + "[" + std::to_string(i + 1) + "]");
  }
  return v;
}

Matrix as_matrix(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() == 0) fail(node, key, "expected a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(node.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string row_key = key + "[" + std::to_string(i + 1) + "]";
    const Vector row = as_vector(node[static_cast<std::size_t>(i)], row_key);
    if (cols < 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      fail(node[static_cast<std::size_t>(i)], row_key, "rows have different lengths");
    }
    m.row(i) = row.transpose();
  }
  return m;
}

// --- node parameters -------------------------------------------------------

NodeParams default_params(const std::string& kind, const YAML::Node& where, const std::string& key) {
  if (kind == "kuramoto") return KuramotoParams{};
  if (kind == "jansen_rit") return JansenRitParams{};
  if (kind == "linear") return LinearParams{};
  fail(where, key, "unknown dynamics kind '" + kind + "' (expected kuramoto, jansen_rit or linear)");
}

void apply_params(NodeParams& params, const YAML::Node& node, const std::string& path) {
  if (!node) return;
  require_map(node, path);
  if (auto* k = std::get_if<KuramotoParams>(&params)) {
    allow_keys(node, path, {"omega"});
    if (node["omega"]) k->omega = as_double(node["omega"], join(path, "omega"));
  } else if (auto* jr = std::get_if<JansenRitParams>(&params)) {
    allow_keys(node, path,
               {"A", "B", "a", "b", "C1", "C2", "C3", "C4", "v0", "e0", "r", "p_ext",
                "coupling_scale"});
    const std::pair<const char*, double*> fields[] = {
        {"A", &jr->A},   {"B", &jr->B},   {"a", &jr->a},   {"b", &jr->b},
        {"C1", &jr->C1}, {"C2", &jr->C2}, {"C3", &jr->C3}, {"C4", &jr->C4},
        {"v0", &jr->v0}, {"e0", &jr->e0}, {"r", &jr->r},   {"p_ext", &jr->p_ext},
        {"coupling_scale", &jr->coupling_scale}};
    for (const auto& [name, field] : fields) {
      if (node[name]) *field = as_double(node[name], join(path, name));
    }
  } else if (auto* lin = std::get_if<LinearParams>(&params)) {
    allow_keys(node, path, {"matrix"});
    if (node["matrix"]) {
      lin->matrix = as_matrix(node["matrix"], join(path, "matrix"));
      if (lin->matrix.rows() != lin->matrix.cols()) {
        fail(node["matrix"], join(path, "matrix"), "linear dynamics matrix must be square");
      }
    }
  }
}

void check_params(const NodeParams& params, const YAML::Node& where, const std::string& path) {
  try {
    if (const auto* jr = std::get_if<JansenRitParams>(&params)) jr->validate();
    if (const auto* k = std::get_if<KuramotoParams>(&params)) KuramotoNode check(*k);
    if (const auto* lin = std::get_if<LinearParams>(&params)) {
      if (lin->matrix.size() == 0) fail(where, join(path, "matrix"), "linear dynamics needs a matrix");
      LinearNode check(lin->matrix);
    }
  } catch (const ArgumentError& e) {
    fail(where, path, e.what());
  }
}

std::vector<bool> parse_pinned(const YAML::Node& node, std::size_t n, const std::string& key) {
  if (!node) return std::vector<bool>(n, true);
  if (node.IsScalar()) {
    const auto word = node.as<std::string>();
    if (word == "all") return std::vector<bool>(n, true);
    if (word == "none") return std::vector<bool>(n, false);
    fail(node, key, "expected 'all', 'none' or a list of 0/1 flags");
  }
  if (!node.IsSequence()) fail(node, key, "expected 'all', 'none' or a list of 0/1 flags");
  if (node.size() != n) {
    fail(node, key,
         "pin mask has " + std::to_string(node.size()) + " entries, expected " + std::to_string(n));
  }
  std::vector<bool> mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = as_uint(node[i], key + "[" + std::to_string(i + 1) + "]");
    if (v > 1) fail(node[i], key, "pin flags must be 0 or 1");
    mask[i] = v == 1;
  }
  return mask;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::optional<std::uint64_t> seed_override) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, "", e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  allow_keys(root, "", {"schema_version", "name", "seed", "model", "reference", "controller",
                        "initial", "integration", "estimation"});

  Scenario s;
  const auto version = as_uint(require(root, "", "schema_version"), "schema_version");
  if (version != static_cast<std::uint64_t>(Scenario::kSchemaVersion)) {
    fail(root["schema_version"], "schema_version",
         "unsupported schema version " + std::to_string(version));
  }
  s.name = as_string(require(root, "", "name"), "name");
  if (root["seed"]) s.seed = as_uint(root["seed"], "seed");
  if (seed_override) s.seed = *seed_override;

  // model
  const YAML::Node model = require(root, "", "model");
  allow_keys(model, "model", {"nodes", "dynamics", "coupling"});
  const auto n = static_cast<std::size_t>(as_uint(require(model, "model", "nodes"), "model.nodes"));
  if (n == 0) fail(model["nodes"], "model.nodes", "network needs at least one node");

  const YAML::Node dyn = require(model, "model", "dynamics");
  allow_keys(dyn, "model.dynamics", {"kind", "params", "per_node"});
  const std::string kind = as_string(require(dyn, "model.dynamics", "kind"), "model.dynamics.kind");
  NodeParams shared = default_params(kind, dyn["kind"], "model.dynamics.kind");
  apply_params(shared, dyn["params"], "model.dynamics.params");

  s.nodes.assign(n, shared);
  if (const YAML::Node per_node = dyn["per_node"]) {
    if (!per_node.IsSequence() || per_node.size() != n) {
      fail(per_node, "model.dynamics.per_node",
           "expected a list with one entry per node (" + std::to_string(n) + ")");
    }
    for (std::size_t i = 0; i < n; ++i) {
      apply_params(s.nodes[i], per_node[i], "model.dynamics.per_node[" + std::to_string(i + 1) + "]");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    check_params(s.nodes[i], dyn, "model.dynamics (node " + std::to_string(i + 1) + ")");
  }

  if (const YAML::Node coupling = model["coupling"]) {
    allow_keys(coupling, "model.coupling", {"mode", "c", "K", "adjacency", "normalization"});
    if (coupling["mode"]) {
      try {
        s.coupling.mode = coupling_mode_from_string(as_string(coupling["mode"], "model.coupling.mode"));
      } catch (const ArgumentError& e) {
        fail(coupling["mode"], "model.coupling.mode", e.what());
      }
    }
    const bool pairwise = s.coupling.mode == CouplingMode::pairwise_sine;
    const char* strength_key = pairwise ? "K" : "c";
    const char* wrong_key = pairwise ? "c" : "K";
    if (coupling[wrong_key]) {
      fail(coupling[wrong_key], std::string("model.coupling.") + wrong_key,
           pairwise ? "pairwise-sine coupling takes 'K' (c = K/N)"
                    : "laplacian-diffusive coupling takes 'c'");
    }
    if (coupling[strength_key]) {
      s.coupling.strength =
          as_double(coupling[strength_key], std::string("model.coupling.") + strength_key);
    }
    if (const YAML::Node adj = coupling["adjacency"]) {
      if (adj.IsScalar() && adj.as<std::string>() == "complete") {
        s.coupling.adjacency.reset();
      } else {
        Matrix w = as_matrix(adj, "model.coupling.adjacency");
        if (static_cast<std::size_t>(w.rows()) != n || static_cast<std::size_t>(w.cols()) != n) {
          fail(adj, "model.coupling.adjacency", "adjacency must be " + std::to_string(n) + "x" +
                                                    std::to_string(n));
        }
        try {
          Adjacency check(w);
        } catch (const GraphError& e) {
          fail(adj, "model.coupling.adjacency", e.what());
        }
        s.coupling.adjacency = std::move(w);
      }
    }
    if (coupling["normalization"]) {
      try {
        s.coupling.normalization = laplacian_normalization_from_string(
            as_string(coupling["normalization"], "model.coupling.normalization"));
      } catch (const std::invalid_argument& e) {
        fail(coupling["normalization"], "model.coupling.normalization", e.what());
      }
    }
  }

  const Eigen::Index p = state_dim_of(s.nodes.front());

  // reference
  const YAML::Node ref = require(root, "", "reference");
  allow_keys(ref, "reference", {"params", "initial"});
  s.reference = shared;
  apply_params(s.reference, ref["params"], "reference.params");
  check_params(s.reference, ref, "reference.params");
  s.reference_initial = as_vector(require(ref, "reference", "initial"), "reference.initial");
  if (s.reference_initial.size() != p) {
    fail(ref["initial"], "reference.initial",
         "expected " + std::to_string(p) + " components, got " +
             std::to_string(s.reference_initial.size()));
  }

  // controller
  const YAML::Node ctrl = require(root, "", "controller");
  allow_keys(ctrl, "controller", {"gain", "pinned"});
  s.gain = as_double(require(ctrl, "controller", "gain"), "controller.gain");
  if (!(s.gain >= 0.0)) fail(ctrl["gain"], "controller.gain", "gain must be >= 0");
  s.pinned = parse_pinned(ctrl["pinned"], n, "controller.pinned");

  // initial states
  const YAML::Node init = require(root, "", "initial");
  allow_keys(init, "initial", {"states", "random"});
  if (init["states"] && init["random"]) {
    fail(init, "initial", "give either 'states' or 'random', not both");
  }
  if (const YAML::Node states = init["states"]) {
    if (p == 1 && states.IsSequence() && states.size() > 0 && states[0].IsScalar()) {
      s.initial_states = as_vector(states, "initial.states");
    } else {
      s.initial_states = as_matrix(states, "initial.states");
    }
    if (static_cast<std::size_t>(s.initial_states.rows()) != n || s.initial_states.cols() != p) {
      fail(states, "initial.states",
           "expected " + std::to_string(n) + "x" + std::to_string(p) + " initial states, got " +
               std::to_string(s.initial_states.rows()) + "x" +
               std::to_string(s.initial_states.cols()));
    }
  } else if (const YAML::Node random = init["random"]) {
    allow_keys(random, "initial.random", {"low", "high"});
    const double low = as_double(require(random, "initial.random", "low"), "initial.random.low");
    const double high = as_double(require(random, "initial.random", "high"), "initial.random.high");
    if (!(high > low)) fail(random, "initial.random", "need high > low");
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> dist(low, high);
    s.initial_states.resize(static_cast<Eigen::Index>(n), p);
    for (Eigen::Index i = 0; i < s.initial_states.rows(); ++i) {
      for (Eigen::Index k = 0; k < p; ++k) s.initial_states(i, k) = dist(rng);
    }
  } else {
    fail(init, "initial", "missing 'states' or 'random'");
  }

  // integration
  s.integration.t_end = 10.0;
  if (const YAML::Node integ = root["integration"]) {
    allow_keys(integ, "integration", {"dt", "t_end", "record_stride"});
    if (integ["dt"]) s.integration.dt = as_double(integ["dt"], "integration.dt");
    if (integ["t_end"]) s.integration.t_end = as_double(integ["t_end"], "integration.t_end");
    if (integ["record_stride"]) {
      s.integration.record_stride =
          static_cast<std::size_t>(as_uint(integ["record_stride"], "integration.record_stride"));
    }
    try {
      s.integration.validate();
    } catch (const ArgumentError& e) {
      fail(integ, "integration", e.what());
    }
  }

  // estimation
  if (const YAML::Node est = root["estimation"]) {
    allow_keys(est, "estimation", {"samples", "safety_factor", "padding", "method", "region"});
    if (est["samples"]) {
      s.estimation.samples = static_cast<std::size_t>(as_uint(est["samples"], "estimation.samples"));
    }
    if (est["safety_factor"]) {
      s.estimation.safety_factor = as_double(est["safety_factor"], "estimation.safety_factor");
    }
    if (est["padding"]) s.estimation.padding = as_double(est["padding"], "estimation.padding");
    if (est["method"]) {
      const auto m = as_string(est["method"], "estimation.method");
      if (m == "auto") {
        s.estimation.method = EstimationMethod::automatic;
      } else if (m == "sampled") {
        s.estimation.method = EstimationMethod::sampled;
      } else {
        fail(est["method"], "estimation.method", "expected 'auto' or 'sampled'");
      }
    }
    if (const YAML::Node region = est["region"]) {
      allow_keys(region, "estimation.region", {"low", "high"});
      StateBox box{as_vector(require(region, "estimation.region", "low"), "estimation.region.low"),
                   as_vector(require(region, "estimation.region", "high"), "estimation.region.high")};
      if (box.dim() != p || box.high.size() != p) {
        fail(region, "estimation.region", "bounds must have " + std::to_string(p) + " components");
      }
      try {
        box.validate();
      } catch (const ArgumentError& e) {
        fail(region, "estimation.region", e.what());
      }
      s.estimation.region = std::move(box);
    }
  }

  try {
    s.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(e.what(), "", 0);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), "", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), seed_override);
}

namespace {

void emit_vector(YAML::Emitter& out, const Vector& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v(i);
  out << YAML::EndSeq;
}

void emit_matrix(YAML::Emitter& out, const Matrix& m) {
  out << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < m.rows(); ++i) emit_vector(out, m.row(i).transpose());
  out << YAML::EndSeq;
}

void emit_params(YAML::Emitter& out, const NodeParams& params) {
  out << YAML::BeginMap;
  if (const auto* k = std::get_if<KuramotoParams>(&params)) {
    out << YAML::Key << "omega" << YAML::Value << k->omega;
  } else if (const auto* jr = std::get_if<JansenRitParams>(&params)) {
    const std::pair<const char*, double> fields[] = {
        {"A", jr->A},   {"B", jr->B},   {"a", jr->a},   {"b", jr->b},
        {"C1", jr->C1}, {"C2", jr->C2}, {"C3", jr->C3}, {"C4", jr->C4},
        {"v0", jr->v0}, {"e0", jr->e0}, {"r", jr->r},   {"p_ext", jr->p_ext},
        {"coupling_scale", jr->coupling_scale}};
    for (const auto& [name, value] : fields) out << YAML::Key << name << YAML::Value << value;
  } else if (const auto* lin = std::get_if<LinearParams>(&params)) {
    out << YAML::Key << "matrix" << YAML::Value;
    emit_matrix(out, lin->matrix);
  }
  out << YAML::EndMap;
}

}  // namespace

std::string normalize_scenario(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << Scenario::kSchemaVersion;
  out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << s.name;
  out << YAML::Key << "seed" << YAML::Value << s.seed;

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "nodes" << YAML::Value << s.size();
  out << YAML::Key << "dynamics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << kind_of(s.reference);
  out << YAML::Key << "per_node" << YAML::Value << YAML::BeginSeq;
  for (const auto& node : s.nodes) emit_params(out, node);
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::Key << "coupling" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << to_string(s.coupling.mode);
  out << YAML::Key << (s.coupling.mode == CouplingMode::pairwise_sine ? "K" : "c") << YAML::Value
      << s.coupling.strength;
  out << YAML::Key << "adjacency" << YAML::Value;
  if (s.coupling.adjacency) {
    emit_matrix(out, *s.coupling.adjacency);
  } else {
    out << "complete";
  }
  out << YAML::Key << "normalization" << YAML::Value << to_string(s.coupling.normalization);
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "reference" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "params" << YAML::Value;
  emit_params(out, s.reference);
  out << YAML::Key << "initial" << YAML::Value;
  emit_vector(out, s.reference_initial);
  out << YAML::EndMap;

  out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "gain" << YAML::Value << s.gain;
  out << YAML::Key << "pinned" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (bool w : s.pinned) out << (w ? 1 : 0);
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "states" << YAML::Value;
  emit_matrix(out, s.initial_states);
  out << YAML::EndMap;

  out << YAML::Key << "integration" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << s.integration.dt;
  out << YAML::Key << "t_end" << YAML::Value << s.integration.t_end;
  out << YAML::Key << "record_stride" << YAML::Value << s.integration.record_stride;
  out << YAML::EndMap;

  out << YAML::Key << "estimation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "samples" << YAML::Value << s.estimation.samples;
  out << YAML::Key << "safety_factor" << YAML::Value << s.estimation.safety_factor;
  out << YAML::Key << "padding" << YAML::Value << s.estimation.padding;
  out << YAML::Key << "method" << YAML::Value << to_string(s.estimation.method);
  if (s.estimation.region) {
    out << YAML::Key << "region" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "low" << YAML::Value;
    emit_vector(out, s.estimation.region->low);
    out << YAML::Key << "high" << YAML::Value;
    emit_vector(out, s.estimation.region->high);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace pinnet
