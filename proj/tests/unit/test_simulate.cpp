#include "pinnet/scenario_io.hpp"
#include "pinnet/simulate.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

using namespace pinnet;
using pinnet::testing::Rng;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DynamicsPtr linear(const Matrix& a) { return std::make_shared<LinearNode>(a); }

Scenario bundled(const std::string& file) {
  return load_scenario(std::filesystem::path(PINNET_TEST_SCENARIO_DIR) / file);
}

}  // namespace

TEST_CASE("lyapunov function", "[simulate]") {
  CHECK(lyapunov_V(Matrix::Zero(3, 2)) == 0.0);
  CHECK(lyapunov_V((Matrix(1, 2) << 3, 4).finished()) == 12.5);
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix e = rng.matrix(rng.integer(1, 8), rng.integer(1, 8), -10, 10);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < e.rows(); ++i)
      for (Eigen::Index j = 0; j < e.cols(); ++j) sum += e(i, j) * e(i, j);
    CHECK_THAT(lyapunov_V(e), WithinRel(0.5 * sum, 1e-14));
  }
}

TEST_CASE("derivative split", "[simulate]") {
  const auto model = NetworkModel::homogeneous(linear(Matrix::Constant(1, 1, -0.5)),
                                               build_laplacian(Adjacency::path(2)), 2.0);
  SECTION("zero error") {
    const Matrix x = Matrix::Constant(2, 1, 0.7);
    const auto v = v_decomposition(model, x, Vector::Constant(1, 0.7), Matrix::Zero(2, 1));
    CHECK(v.v1 == 0.0);
    CHECK(v.v2 == 0.0);
    CHECK(v.v3 == 0.0);
  }
  SECTION("zero input") {
    const Matrix x = (Matrix(2, 1) << 1, 3).finished();
    CHECK(v_decomposition(model, x, Vector::Constant(1, 0.5), Matrix::Zero(2, 1)).v3 == 0.0);
  }
  SECTION("hand evaluation") {
    // e = (0.5, 2.5); f = -x/2; coupling -c L x = (4, -4); u = (-0.25, 0)
    const Matrix x = (Matrix(2, 1) << 1, 3).finished();
    const Matrix u = (Matrix(2, 1) << -0.25, 0).finished();
    const auto v = v_decomposition(model, x, Vector::Constant(1, 0.5), u);
    CHECK_THAT(v.v1, WithinAbs(-3.25, 1e-15));
    CHECK_THAT(v.v2, WithinAbs(-8.0, 1e-15));
    CHECK_THAT(v.v3, WithinAbs(-0.125, 1e-15));
    CHECK_THAT(v.total(), WithinAbs(-11.375, 1e-14));
  }
}

TEST_CASE("order parameter", "[simulate]") {
  CHECK_THAT(order_parameter(Vector::Constant(5, 1.3)), WithinAbs(1.0, 1e-15));
  const double pi = std::numbers::pi;
  CHECK_THAT(order_parameter((Vector(4) << 0, pi / 2, pi, 3 * pi / 2).finished()), WithinAbs(0.0, 1e-15));
  CHECK_THAT(order_parameter((Vector(2) << 0, pi / 3).finished()), WithinAbs(std::cos(pi / 6), 1e-15));
  const auto model = NetworkModel::homogeneous(linear(Matrix::Identity(2, 2)),
                                               build_laplacian(Adjacency::path(2)), 1.0);
  CHECK_THROWS_AS(order_parameter(model, Matrix::Zero(2, 2)), ArgumentError);
}

TEST_CASE("synchronized start stays synchronized without control", "[simulate]") {
  Rng rng(6);
  const Matrix a = rng.matrix(3, 3);
  const auto model = NetworkModel::homogeneous(linear(a), build_laplacian(Adjacency::ring(4)), 1.5);
  const Vector xr = rng.vector(3);
  const Matrix x0 = xr.transpose().replicate(4, 1);
  const auto rec = simulate(model, Controller::all_pinned(4, 0.0), x0, xr, {1e-2, 2.0, 1});
  for (std::size_t k = 0; k < rec.size(); ++k) CHECK(rec.total_error_norm(k) == 0.0);
}

TEST_CASE("record layout", "[simulate]") {
  const auto model = NetworkModel::homogeneous(linear(-Matrix::Identity(2, 2)),
                                               build_laplacian(Adjacency::path(3)), 0.5);
  const Matrix x0 = (Matrix(3, 2) << 1, 0, 0, 1, -1, 2).finished();
  const Vector xr = Vector::Zero(2);

  SECTION("uneven horizon ends exactly at t_end") {
    const auto rec = simulate(model, Controller({true, false, true}, 2.0), x0, xr, {0.3, 1.0, 1});
    REQUIRE(rec.size() == 5);
    CHECK(rec.times.front() == 0.0);
    CHECK(rec.times.back() == 1.0);
    CHECK_THAT(rec.times[3], WithinAbs(0.9, 1e-15));
  }
  SECTION("stride keeps the endpoints") {
    const auto rec = simulate(model, Controller::all_pinned(3, 1.0), x0, xr, {0.01, 1.0, 7});
    CHECK(rec.times.front() == 0.0);
    CHECK(rec.times.back() == 1.0);
    CHECK(rec.size() == 16);  // 0, 7, ..., 98 and 100
  }
  SECTION("recorded inputs obey the feedback law exactly") {
    const Controller ctrl({true, false, true}, 2.5);
    const auto rec = simulate(model, ctrl, x0, xr, {0.01, 1.0, 3});
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const Matrix e = rec.error(k);
      for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
          CHECK(rec.inputs[k](i, j) == (ctrl.pinned(i) ? -2.5 * e(i, j) : 0.0));
        }
      }
      CHECK_THAT(rec.V[k], WithinRel(lyapunov_V(e), 1e-15));
      CHECK_THAT(rec.error_norms[k](0), WithinRel(e.row(0).norm(), 1e-15));
    }
  }
  SECTION("bad arguments") {
    CHECK_THROWS_AS(simulate(model, Controller::all_pinned(2, 1.0), x0, xr, {}), ArgumentError);
    CHECK_THROWS_AS(simulate(model, Controller::all_pinned(3, 1.0), x0, Vector::Zero(3), {}), ArgumentError);
    CHECK_THROWS_AS(simulate(model, Controller::all_pinned(3, 1.0), x0, xr, {-1.0, 1.0, 1}), ArgumentError);
  }
}

TEST_CASE("blow-up raises a fault carrying the finite prefix", "[simulate]") {
  const auto model = NetworkModel::homogeneous(linear(50.0 * Matrix::Identity(1, 1)),
                                               Laplacian(Matrix::Zero(1, 1)), 0.0);
  try {
    simulate(model, Controller::all_pinned(1, 0.0), Matrix::Ones(1, 1), Vector::Zero(1), {1e-2, 10.0, 1});
    FAIL("expected a fault");
  } catch (const SimulationFault& fault) {
    const auto& partial = fault.partial();
    REQUIRE_FALSE(partial.empty());
    CHECK(partial.times.back() < 10.0);
    CHECK(partial.states.back().cwiseAbs().maxCoeff() <= kBlowUpThreshold);
    REQUIRE(fault.time());
    CHECK(*fault.time() > partial.times.back());
  }
}

TEST_CASE("split derivative matches numerically differentiated V", "[simulate][property]") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.integer(2, 5);
    const int p = rng.integer(1, 3);
    const auto model = NetworkModel::homogeneous(linear(rng.matrix(p, p, -0.5, 0.5)),
                                                 build_laplacian(Adjacency(rng.adjacency(n, true))), 0.2);
    const double dt = 1e-3;
    const auto rec = simulate(model, Controller::all_pinned(n, 0.5), rng.matrix(n, p), Vector::Zero(p),
                              {dt, 0.5, 1});
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < rec.size(); ++k) {
      const double numeric = (rec.V[k + 1] - rec.V[k - 1]) / (2 * dt);
      const double split = rec.v1[k] + rec.v2[k] + rec.v3[k];
      // central differences are off by dt^2/6 V''', estimated here from the record
      const double third =
          (rec.V[k + 2] - 2 * rec.V[k + 1] + 2 * rec.V[k - 1] - rec.V[k - 2]) / (2 * dt * dt * dt);
      const double tol = 2 * dt * dt * std::abs(third) + 1e-12 * std::max(1.0, rec.V[k]) / dt;
      worst = std::max(worst, std::abs(numeric - split) / tol);
    }
    CHECK(worst <= 1.0);
  }
}

TEST_CASE("bundled Kuramoto run locks to the reference frequency", "[simulate][scenario]") {
  const Scenario s = bundled("kuramoto_paper.yaml");
  const auto rec = simulate(s);
  CHECK(rec.times.back() == s.integration.t_end);
  // phase velocity over the last 2 s
  std::size_t k0 = 0;
  while (rec.times[k0] < s.integration.t_end - 2.0) ++k0;
  const std::size_t k1 = rec.size() - 1;
  const double span = rec.times[k1] - rec.times[k0];
  for (std::size_t i = 0; i < rec.nodes; ++i) {
    const double velocity = (rec.states[k1](i, 0) - rec.states[k0](i, 0)) / span;
    CHECK_THAT(velocity, WithinAbs(std::numbers::pi / 2, 1e-6));
  }
  // the lag settles at a constant, so the error stops changing
  CHECK((rec.error(k1) - rec.error(k0)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("bundled Jansen-Rit run converges toward the reference", "[simulate][scenario]") {
  const Scenario s = bundled("jansen_rit_paper.yaml");
  const auto rec = simulate(s);
  const double peak = *std::max_element(rec.V.begin(), rec.V.end());
  CHECK(rec.V.back() < 0.01 * peak);
}
