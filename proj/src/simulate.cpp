#include "pinnet/simulate.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace pinnet {

void IntegrationSettings::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("integration.dt must be > 0");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw ArgumentError("integration.t_end must be >= dt");
  if (record_stride < 1) throw ArgumentError("integration.record_stride must be >= 1");
}

std::size_t IntegrationSettings::step_count() const {
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

double TrajectoryRecord::total_error_norm(std::size_t k) const {
  return error_norms[k].norm();
}

double lyapunov_V(const Matrix& error) { return 0.5 * error.squaredNorm(); }

VDecomposition v_decomposition(const NetworkModel& model, const Matrix& states,
                               const VectorRef& reference, const Matrix& inputs) {
  const Matrix e = tracking_error(states, reference);
  if (inputs.rows() != e.rows() || inputs.cols() != e.cols()) {
    throw ArgumentError("v_decomposition: inputs do not match the state shape");
  }
  const Vector f_ref = model.reference().drift(reference);
  const Matrix coupling = coupling_term(model, states);
  const Vector coupling_ref = reference_coupling_term(model, reference);

  // Rounding in the coupling sum scales with its summands, not with the
  // (possibly cancelled) result.
  const Matrix& L = model.laplacian().matrix();
  const double c = std::abs(model.coupling());
  Vector summand_size(e.rows());
  if (model.mode() == CouplingMode::pairwise_sine) {
    summand_size = c * L.cwiseAbs().rowwise().sum();
  } else {
    Vector h_norms(e.rows());
    for (Eigen::Index j = 0; j < e.rows(); ++j) {
      h_norms(j) = model.node(static_cast<std::size_t>(j)).coupling_output(states.row(j).transpose()).norm();
    }
    const double h_ref = model.reference().coupling_output(reference).norm();
    summand_size = c * (L.cwiseAbs() * h_norms + L.rowwise().sum().cwiseAbs() * h_ref);
  }

  VDecomposition out;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    const Vector f_i = model.node(static_cast<std::size_t>(i)).drift(states.row(i).transpose());
    const Vector ei = e.row(i).transpose();
    const double ei_norm = ei.norm();
    out.v1 += ei.dot(f_i - f_ref);
    out.v2 += ei.dot(coupling.row(i).transpose() - coupling_ref);
    out.v3 += ei.dot(inputs.row(i).transpose());
    out.v1_scale += ei_norm * (f_i.norm() + f_ref.norm());
    out.v2_scale += ei_norm * (summand_size(i) + coupling_ref.norm());
  }
  return out;
}

namespace {

class JointSystem {
 public:
  JointSystem(const NetworkModel& model, const Controller& controller)
      : model_(model), controller_(controller), n_(static_cast<Eigen::Index>(model.size())),
        p_(model.state_dim()) {}

  Eigen::Index size() const { return n_ * p_ + p_; }

  Vector pack(const Matrix& states, const Vector& reference) const {
    Vector y(size());
    y.head(n_ * p_) = Eigen::Map<const Vector>(states.data(), n_ * p_);
    y.tail(p_) = reference;
    return y;
  }

  Matrix states(const Vector& y) const { return Eigen::Map<const Matrix>(y.data(), n_, p_); }
  Vector reference(const Vector& y) const { return y.tail(p_); }

  Matrix inputs(const Matrix& x, const Vector& xr) const {
    return control_input(controller_, tracking_error(x, xr));
  }

  Vector operator()(const Vector& y) const {
    const Matrix x = states(y);
    const Vector xr = reference(y);
    const Matrix dx = network_drift(model_, x, inputs(x, xr));
    return pack(dx, reference_drift(model_, xr));
  }

 private:
  const NetworkModel& model_;
  const Controller& controller_;
  Eigen::Index n_;
  Eigen::Index p_;
};

void append_sample(TrajectoryRecord& rec, const NetworkModel& model, const JointSystem& sys,
                   const Vector& y, double t) {
  const Matrix x = sys.states(y);
  const Vector xr = sys.reference(y);
  const Matrix u = sys.inputs(x, xr);
  const Matrix e = tracking_error(x, xr);
  const VDecomposition v = v_decomposition(model, x, xr, u);
  rec.times.push_back(t);
  rec.states.push_back(x);
  rec.reference.push_back(xr);
  rec.inputs.push_back(u);
  rec.error_norms.push_back(e.rowwise().norm());
  rec.V.push_back(lyapunov_V(e));
  rec.v1.push_back(v.v1);
  rec.v2.push_back(v.v2);
  rec.v3.push_back(v.v3);
  rec.v1_scale.push_back(v.v1_scale);
  rec.v2_scale.push_back(v.v2_scale);
}

}  // namespace

TrajectoryRecord simulate(const NetworkModel& model, const Controller& controller,
                          const Matrix& initial_states, const Vector& reference_initial,
                          const IntegrationSettings& settings) {
  settings.validate();
  const std::size_t n = model.size();
  const Eigen::Index p = model.state_dim();
  if (controller.size() != n) {
    throw ArgumentError("controller pin mask length does not match the network size");
  }
  if (static_cast<std::size_t>(initial_states.rows()) != n || initial_states.cols() != p) {
    throw ArgumentError("initial states must be n x p");
  }
  if (reference_initial.size() != p) throw ArgumentError("reference initial state must have p entries");

  const JointSystem sys(model, controller);
  TrajectoryRecord rec;
  rec.nodes = n;
  rec.state_dim = p;
  rec.kind = std::string(model.reference().kind());

  const std::size_t steps = settings.step_count();
  Vector y = sys.pack(initial_states, reference_initial);
  append_sample(rec, model, sys, y, 0.0);

  double t = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_next = (k == steps) ? settings.t_end : static_cast<double>(k) * settings.dt;
    const double h = t_next - t;
    Vector next;
    try {
      next = step_rk4(sys, y, h, t);
    } catch (const IntegrationFault& fault) {
      if (rec.times.back() != t) append_sample(rec, model, sys, y, t);
      throw SimulationFault(fault.what(), t_next, std::move(rec));
    }
    if (next.cwiseAbs().maxCoeff() > kBlowUpThreshold) {
      if (rec.times.back() != t) append_sample(rec, model, sys, y, t);
      std::ostringstream os;
      os << "state magnitude exceeded " << kBlowUpThreshold << " at t = " << t_next;
      throw SimulationFault(os.str(), t_next, std::move(rec));
    }
    y = std::move(next);
    t = t_next;
    if (k % settings.record_stride == 0 || k == steps) append_sample(rec, model, sys, y, t);
  }
  return rec;
}

TrajectoryRecord simulate(const Scenario& scenario) {
  const NetworkModel model = build_model(scenario);
  const Controller controller = build_controller(scenario);
  return simulate(model, controller, scenario.initial_states, scenario.reference_initial,
                  scenario.integration);
}

double order_parameter(const VectorRef& phases) {
  if (phases.size() == 0) throw ArgumentError("order_parameter: no phases given");
  std::complex<double> acc{0.0, 0.0};
  for (Eigen::Index j = 0; j < phases.size(); ++j) acc += std::polar(1.0, phases(j));
  return std::abs(acc) / static_cast<double>(phases.size());
}

double order_parameter(const NetworkModel& model, const Matrix& states) {
  if (model.state_dim() != 1) {
    throw ArgumentError("order_parameter needs scalar phase states (p = 1)");
  }
  if (states.cols() != 1) throw ArgumentError("order_parameter: states must be n x 1");
  return order_parameter(Vector(states.col(0)));
}

}  // namespace pinnet
