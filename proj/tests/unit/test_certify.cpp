#include "pinnet/certify.hpp"
#include "pinnet/scenario_io.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace pinnet;
using pinnet::testing::Rng;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

StateBox box(Eigen::Index p, double lo, double hi) {
  return {Vector::Constant(p, lo), Vector::Constant(p, hi)};
}

Scenario bundled(const std::string& file) {
  return load_scenario(std::filesystem::path(PINNET_TEST_SCENARIO_DIR) / file);
}

// ((theta_f + c theta_h ||L||) I_n - gain W) kron I_p, largest eigenvalue.
double dense_lambda_max(double theta_f, double theta_h, double c, double norm, double gain,
                        const std::vector<bool>& mask, Eigen::Index p) {
  const auto n = static_cast<Eigen::Index>(mask.size());
  Matrix inner = (theta_f + c * theta_h * norm) * Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) inner(i, i) -= gain * (mask[i] ? 1.0 : 0.0);
  const Matrix full = pinnet::testing::kron_identity(inner, p);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(full, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("certificate closed form", "[certify]") {
  // theta_f = 2, c theta_h ||L|| = 4
  CHECK(certificate_lambda_max(2, 1, 1, 4, 10, {true, true, true}) == -4.0);
  CHECK(certificate_lambda_max(2, 1, 1, 4, 10, {true, false, true}) == 6.0);
  CHECK(certificate_lambda_max(2, 1, 1, 4, 10, {true, false, true}) ==
        dense_lambda_max(2, 1, 1, 4, 10, {true, false, true}, 3));
}

TEST_CASE("minimal certified gain", "[certify]") {
  CHECK(min_certified_gain(2, 1, 1, 4, {true, true}) == 6.0);
  CHECK(min_certified_gain(-1, 0, 1, 4, {false, false}) == 0.0);
  CHECK_FALSE(min_certified_gain(1, 0, 1, 4, {true, false}).has_value());
  // all pinned and contracting already
  CHECK(min_certified_gain(-3, 1, 1, 1, {true, true}) == 0.0);
}

TEST_CASE("certificate against the explicit Kronecker matrix", "[certify][property]") {
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 6);
    const int p = rng.integer(1, 6);
    std::vector<bool> mask(n);
    for (auto&& w : mask) w = rng.coin();
    const double tf = rng.uniform(-5, 5), th = rng.uniform(0, 3), c = rng.uniform(0, 4);
    const double norm = rng.uniform(0, 10), gain = rng.uniform(0, 50);
    const double fast = certificate_lambda_max(tf, th, c, norm, gain, mask);
    const double dense = dense_lambda_max(tf, th, c, norm, gain, mask, p);
    CHECK(pinnet::testing::relative_gap(fast, dense) <= 1e-10);
  }
}

TEST_CASE("certificate monotonicity", "[certify][property]") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 6);
    std::vector<bool> mask(n);
    for (auto&& w : mask) w = rng.coin();
    const double tf = rng.uniform(-5, 5), th = rng.uniform(0, 3), c = rng.uniform(0, 4);
    const double norm = rng.uniform(0, 10), gain = rng.uniform(0, 50);
    const double base = certificate_lambda_max(tf, th, c, norm, gain, mask);
    const double d = rng.uniform(0, 2);
    CHECK(certificate_lambda_max(tf, th, c, norm, gain + d, mask) <= base);
    CHECK(certificate_lambda_max(tf + d, th, c, norm, gain, mask) >= base);
    CHECK(certificate_lambda_max(tf, th + d, c, norm, gain, mask) >= base);
    CHECK(certificate_lambda_max(tf, th, c + d, norm, gain, mask) >= base);
  }
}

TEST_CASE("inflation moves estimates toward the conservative side", "[certify]") {
  CHECK_THAT(inflate(2.0, 1.05), WithinRel(2.1, 1e-15));
  CHECK_THAT(inflate(-2.0, 1.05), WithinRel(-1.9, 1e-15));
  CHECK(inflate(0.0, 1.05) == 0.0);
  CHECK(inflate(3.0, 1.0) == 3.0);
}

TEST_CASE("theta_f estimator", "[certify]") {
  const SamplingOptions opts{20000, 1.05, 9};
  SECTION("constant drift") {
    const auto est = estimate_theta_f([](const VectorRef&) { return Vector::Constant(1, 1.7); },
                                      {Vector::Zero(1)}, box(1, -5, 5), opts);
    CHECK(est.raw == 0.0);
    CHECK(est.value == 0.0);
    CHECK(est.source == EstimateSource::sampled);
    CHECK(est.sample_count > 0);
  }
  SECTION("f = -z") {
    const auto est = estimate_theta_f([](const VectorRef& x) { return Vector(-x); },
                                      {Vector::Zero(2)}, box(2, -1, 1), opts);
    CHECK_THAT(est.raw, WithinAbs(-1.0, 1e-12));
    CHECK_THAT(est.value, WithinAbs(-0.95, 1e-12));
    CHECK(*LinearNode(-Matrix::Identity(2, 2)).quadratic_bound() == -1.0);
  }
  SECTION("random linear maps over several reference points") {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix a = rng.matrix(3, 3, -2, 2);
      const double exact = *LinearNode(a).quadratic_bound();
      const auto est = estimate_theta_f([&a](const VectorRef& x) { return Vector(a * x); },
                                        {rng.vector(3), rng.vector(3), rng.vector(3)}, box(3, -2, 2), opts);
      CHECK(est.raw <= exact + 1e-12);
      CHECK(std::abs(est.raw - exact) <= 0.02 * std::max(std::abs(exact), 0.05));
    }
  }
  SECTION("failure modes") {
    auto f = [](const VectorRef& x) { return Vector(x); };
    CHECK_THROWS_AS(estimate_theta_f(f, {Vector::Zero(1)}, box(1, -1, 1), {0, 1.05, 0}), EstimationError);
    CHECK_THROWS_AS(estimate_theta_f(f, {Vector::Zero(1)}, box(1, 1, 1), opts), EstimationError);
    CHECK_THROWS_AS(estimate_theta_f(f, {}, box(1, -1, 1), opts), EstimationError);
    auto nan = [](const VectorRef& x) { return Vector(Vector::Constant(x.size(), std::nan(""))); };
    CHECK_THROWS_AS(estimate_theta_f(nan, {Vector::Zero(1)}, box(1, -1, 1), opts), EstimationError);
  }
  SECTION("seeded and reproducible") {
    auto f = [](const VectorRef& x) { return Vector(x.array().sin()); };
    const auto a = estimate_theta_f(f, {Vector::Zero(2)}, box(2, -3, 3), {5000, 1.05, 4});
    const auto b = estimate_theta_f(f, {Vector::Zero(2)}, box(2, -3, 3), {5000, 1.05, 4});
    CHECK(a.raw == b.raw);
  }
}

TEST_CASE("theta_h estimator", "[certify]") {
  const SamplingOptions opts{50000, 1.05, 3};
  SECTION("sine") {
    const auto est = estimate_theta_h([](const VectorRef& x) { return Vector(x.array().sin()); },
                                      box(1, -4, 4), opts);
    CHECK_THAT(est.raw, WithinAbs(1.0, 0.01));
    CHECK(est.raw <= 1.0 + 1e-12);
  }
  SECTION("identity") {
    const auto est = estimate_theta_h([](const VectorRef& x) { return Vector(x); }, box(3, -1, 1), opts);
    CHECK_THAT(est.raw, WithinAbs(1.0, 1e-12));
    CHECK_THAT(est.value, WithinAbs(1.05, 1e-12));
  }
  SECTION("scaled sigmoid") {
    JansenRitParams p;
    const double scale = 0.8;
    auto h = [&](const VectorRef& x) { return Vector::Constant(1, scale * sigmoid(x(0), p)); };
    const auto est = estimate_theta_h(h, box(1, p.v0 - 10, p.v0 + 10), opts);
    const double closed = scale * p.e0 * p.r / 2;
    // dense slope sampling oracle
    double dense = 0.0;
    for (int k = 0; k <= 200000; ++k) {
      const double v = p.v0 - 10 + 20.0 * k / 200000;
      dense = std::max(dense, std::abs(h(Vector::Constant(1, v + 1e-6))(0) - h(Vector::Constant(1, v))(0)) / 1e-6);
    }
    CHECK_THAT(dense, WithinRel(closed, 1e-5));
    CHECK(est.raw <= closed * (1 + 1e-9));
    CHECK_THAT(est.raw, WithinRel(closed, 0.01));
  }
  SECTION("failure modes") {
    auto h = [](const VectorRef& x) { return Vector(x); };
    CHECK_THROWS_AS(estimate_theta_h(h, box(1, -1, 1), {0, 1.05, 0}), EstimationError);
    CHECK_THROWS_AS(estimate_theta_h(h, box(2, 0, 0), opts), EstimationError);
  }
}

TEST_CASE("certify bundled and constructed scenarios", "[certify][scenario]") {
  SECTION("Kuramoto constants are recovered; the gain is below the threshold") {
    const Certificate cert = certify_scenario(bundled("kuramoto_paper.yaml"));
    CHECK(cert.theta_f == 0.0);
    CHECK(cert.theta_h == 1.0);
    CHECK(cert.theta_f_estimate.source == EstimateSource::analytic);
    CHECK_THAT(cert.coupling, WithinRel(1.0, 1e-15));
    CHECK_THAT(cert.norm_L_kron, WithinRel(10.0, 1e-12));
    CHECK(cert.gain == 1.5);
    CHECK_THAT(cert.lambda_max, WithinAbs(8.5, 1e-12));
    CHECK_FALSE(cert.certified);
    const std::string text = describe(cert);
    CHECK_THAT(text, ContainsSubstring("not certified"));
    CHECK_THAT(text, !ContainsSubstring("unstable"));
  }
  SECTION("stable linear network") {
    const Certificate cert = certify_scenario(bundled("linear_stable.yaml"));
    CHECK(cert.certified);
    CHECK(cert.lambda_max <= 0.0);
    CHECK(cert.theta_f_estimate.source == EstimateSource::analytic);
    REQUIRE(cert.min_gain);
    const Certificate below = cert.with_gain(*cert.min_gain * 0.99);
    CHECK_FALSE(below.certified);
    CHECK(cert.with_gain(*cert.min_gain).certified);
  }
  SECTION("forcing the sampler reproduces the analytic constants") {
    Scenario s = bundled("linear_stable.yaml");
    s.estimation.method = EstimationMethod::sampled;
    s.estimation.samples = 20000;
    const Certificate sampled = certify_scenario(s);
    CHECK(sampled.theta_f_estimate.source == EstimateSource::sampled);
    CHECK(sampled.theta_f_estimate.region.has_value());
    CHECK_THAT(sampled.theta_f_estimate.raw, WithinRel(0.5, 0.02));
    CHECK_THAT(sampled.theta_h_estimate.raw, WithinRel(1.0, 0.02));
  }
  SECTION("Jansen-Rit theta_f is sampled over the visited box") {
    Scenario s = bundled("jansen_rit_paper.yaml");
    s.estimation.samples = 20000;
    const Certificate cert = certify_scenario(s);
    CHECK(cert.theta_f_estimate.source == EstimateSource::sampled);
    CHECK(cert.theta_f > 0.0);
    CHECK(std::isfinite(cert.theta_f));
    CHECK(cert.theta_h_estimate.source == EstimateSource::analytic);
    CHECK_THAT(cert.theta_h, WithinRel(std::sqrt(2.0) * 2.5 * 0.56 / 2, 1e-15));
    CHECK(cert.certified == (cert.lambda_max <= 0.0));
  }
}

TEST_CASE("pilot region covers the uncontrolled run", "[certify]") {
  Scenario s = bundled("linear_stable.yaml");
  std::vector<Vector> refs;
  const StateBox region = pilot_region(s, &refs);
  CHECK(region.non_degenerate());
  CHECK_FALSE(refs.empty());
  for (Eigen::Index i = 0; i < s.initial_states.rows(); ++i) {
    CHECK((s.initial_states.row(i).transpose().array() >= region.low.array()).all());
    CHECK((s.initial_states.row(i).transpose().array() <= region.high.array()).all());
  }
}
