#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "swcons/bounds.hpp"
#include "swcons/error.hpp"

using namespace swcons;
using fixtures::complete;
using fixtures::path;
using fixtures::star;

namespace {

Spectrum spec(const Graph& g) { return spectrum(build_laplacian(g)); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an swcons::Error");
  return ErrorKind::Input;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("undirected_bound examples") {
  CHECK(undirected_bound(spec(complete(2))) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(undirected_bound(spec(complete(3))) == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(undirected_bound(spec(star(4))) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(kind_of([] { undirected_bound(spec(fixtures::edgeless(3))); }) == ErrorKind::Hypothesis);
  CHECK(message_of([] { undirected_bound(spec(fixtures::edgeless(3))); }).find("not connected") != std::string::npos);
}

TEST_CASE("gershgorin_bound examples") {
  CHECK(gershgorin_bound(complete(2)) == 1.0);
  CHECK(gershgorin_bound(complete(3)) == 0.5);
  CHECK(gershgorin_bound(star(4)) == doctest::Approx(1.0 / 3));
  CHECK(kind_of([] { gershgorin_bound(fixtures::edgeless(3)); }) == ErrorKind::Hypothesis);
}

TEST_CASE("directed_bound examples") {
  CHECK(directed_bound(spec(fixtures::directed_cycle3())) == doctest::Approx(1.0).epsilon(1e-14));
  const Graph k2_directed(complete(2).weights(), Orientation::Directed);
  CHECK(directed_bound(spec(k2_directed)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(directed_bound(spec(fixtures::leader_follower())) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("directed_bound rejects inconsistent spectra") {
  Spectrum s;
  s.eigenvalues = {{0.0, 0.0}, {-1.0, 0.5}};
  s.zero_count = 1;
  s.zero_tolerance = 1e-9;
  CHECK(kind_of([&] { directed_bound(s); }) == ErrorKind::Numerical);

  CHECK(kind_of([] { directed_bound(spec(fixtures::edgeless(3, Orientation::Directed))); }) == ErrorKind::Hypothesis);
}

TEST_CASE("switching_bound examples") {
  const std::vector<Spectrum> k2{spec(complete(2))};
  CHECK(switching_bound(k2) == doctest::Approx(1.0));
  const std::vector<Spectrum> k3_star{spec(complete(3)), spec(star(4))};
  CHECK(switching_bound(k3_star) == doctest::Approx(0.5));
  const std::vector<Spectrum> k2_k3{spec(complete(2)), spec(complete(3))};
  CHECK(switching_bound(k2_k3) == doctest::Approx(2.0 / 3));
  CHECK(kind_of([] { switching_bound(std::vector<Spectrum>{}); }) == ErrorKind::Input);
  const std::vector<Spectrum> with_disconnected{spec(complete(3)), spec(fixtures::edgeless(3))};
  CHECK(kind_of([&] { switching_bound(with_disconnected); }) == ErrorKind::Hypothesis);
}

TEST_CASE("nonlinear_bound examples") {
  const std::vector<Spectrum> k2{spec(complete(2))};
  CHECK(kind_of([&] { nonlinear_bound(k2, {1.0, 1.0}); }) == ErrorKind::Input);
  CHECK(kind_of([&] { nonlinear_bound(k2, {2.0, 1.0}); }) == ErrorKind::Input);
  CHECK(kind_of([&] { nonlinear_bound(k2, {0.0, 1.0}); }) == ErrorKind::Input);
  CHECK(nonlinear_bound(k2, {1.0, 2.0}) == doctest::Approx(0.25));
  const std::vector<Spectrum> k3_star{spec(complete(3)), spec(star(4))};
  CHECK(nonlinear_bound(k3_star, {0.5, 1.0}) == doctest::Approx(0.25));
}

TEST_CASE("decay_certificate examples") {
  const std::vector<Spectrum> k2{spec(complete(2))};
  const auto deadbeat = decay_certificate(k2, 0.5, Regime::UndirectedFixed);
  CHECK(*deadbeat.dt_contraction == doctest::Approx(0.0));
  CHECK(*deadbeat.decay_rate == doctest::Approx(2.0));

  const auto quarter = decay_certificate(k2, 0.25, Regime::UndirectedFixed);
  CHECK(*quarter.dt_contraction == doctest::Approx(0.25));
  CHECK(*quarter.ct_rate == doctest::Approx(2.0));
  CHECK(*quarter.lambda2_step_factor == doctest::Approx(0.25));
  CHECK(*quarter.decay_rate == doctest::Approx(std::min(2.0, std::log(4.0) / 2)));
  CHECK(quarter.consensus_rule == ConsensusRule::Average);
  CHECK(*quarter.horizon_rate == *quarter.decay_rate);

  const std::vector<Spectrum> k3{spec(complete(3))};
  CHECK(*decay_certificate(k3, 0.5, Regime::UndirectedFixed).dt_contraction == doctest::Approx(0.25));
}

TEST_CASE("decay_certificate rejects h at or above the bound") {
  const std::vector<Spectrum> k3{spec(complete(3))};
  for (double h : {2.0 / 3, 0.7, 5.0}) {
    try {
      decay_certificate(k3, h, Regime::UndirectedFixed);
      FAIL("expected BoundViolation");
    } catch (const BoundViolation& e) {
      CHECK(e.kind() == ErrorKind::Hypothesis);
      CHECK(e.bound() == doctest::Approx(2.0 / 3));
    }
  }
  CHECK(kind_of([&] { decay_certificate(k3, 0.0, Regime::UndirectedFixed); }) == ErrorKind::Input);
  CHECK(kind_of([&] { decay_certificate(k3, -0.1, Regime::UndirectedFixed); }) == ErrorKind::Input);
}

TEST_CASE("directed certificate is asymptotic only") {
  const std::vector<Spectrum> cyc{spec(fixtures::directed_cycle3())};
  const auto r = decay_certificate(cyc, 0.9, Regime::DirectedFixed);
  CHECK(r.h_max == doctest::Approx(1.0));
  CHECK(r.consensus_rule == ConsensusRule::WWeighted);
  CHECK_FALSE(r.decay_rate);
  CHECK_FALSE(r.dt_contraction);
  REQUIRE(r.horizon_rate);
  // Slowest mode: |1 - 0.9 (3/2 +- i sqrt(3)/2)| per step, Re = 3/2 in CT.
  const double step = std::abs(1.0 - 0.9 * std::complex<double>(1.5, std::sqrt(3.0) / 2));
  CHECK(*r.horizon_rate == doctest::Approx(std::min(1.5, -std::log(step))));
}

TEST_CASE("switching certificate records both lambda2 readings") {
  const std::vector<Spectrum> set{spec(complete(3)), spec(star(4)), spec(path(4))};
  const double h = 0.45;
  const auto r = decay_certificate(set, h, Regime::UndirectedSwitching);
  const double l2_path = 2.0 - std::sqrt(2.0);
  CHECK(*r.ct_rate == doctest::Approx(l2_path));
  const auto k = [h](double l2) { return 1 - 2 * h * l2 + h * h * l2 * l2; };
  CHECK(*r.lambda2_step_factor == doctest::Approx(std::min({k(3.0), k(1.0), k(l2_path)})));
  CHECK(*r.lambda2_step_factor_worst == doctest::Approx(std::max({k(3.0), k(1.0), k(l2_path)})));
  // Star's lambda = 4 mode: (1 - 1.8)^2 = 0.64 dominates every lambda2 reading.
  CHECK(*r.dt_contraction == doctest::Approx(0.64));
  CHECK(*r.decay_rate == doctest::Approx(std::log(1 / 0.64) / 2));
}

TEST_CASE("the lambda2-only step factor can undercount the per-step contraction") {
  // On the star at h = 0.45 the disagreement along the lambda = 4 eigenvector
  // shrinks by only (1 - 0.45*4)^2 = 0.64 per DT step, while the
  // lambda2-based factor promises 0.3025 (star) or 0.055 (K3).
  const auto s = star(4);
  const auto l = build_laplacian(s);
  const std::vector<Spectrum> one{spec(s)};
  const auto r = decay_certificate(one, 0.45, Regime::UndirectedFixed);
  Eigen::VectorXd v(4);
  v << 3, -1, -1, -1;  // eigenvector for lambda = 4, orthogonal to 1
  const Eigen::VectorXd next = v - 0.45 * (l.matrix * v);
  const double factor = next.squaredNorm() / v.squaredNorm();
  CHECK(factor == doctest::Approx(0.64));
  CHECK(factor > *r.lambda2_step_factor);
  CHECK(factor <= *r.dt_contraction + 1e-12);
}

TEST_CASE("certify checks hypotheses and fills the Gershgorin estimate") {
  TopologySet k3{{"g", complete(3)}};
  const auto r = certify(k3, Regime::UndirectedFixed);
  CHECK(r.h_max == doctest::Approx(2.0 / 3));
  CHECK(*r.h == doctest::Approx(0.6));
  CHECK(*r.gershgorin_h == doctest::Approx(0.5));

  TopologySet disc{{"d", fixtures::edgeless(3)}};
  CHECK(message_of([&] { certify(disc, Regime::UndirectedFixed); }).find("not connected") != std::string::npos);
  CHECK(kind_of([&] { certify(disc, Regime::UndirectedFixed); }) == ErrorKind::Hypothesis);

  TopologySet nodir{{"d", fixtures::edgeless(3, Orientation::Directed)}};
  CHECK(message_of([&] { certify(nodir, Regime::DirectedFixed); }).find("no directed spanning tree") != std::string::npos);

  TopologySet mixed{{"a", complete(3)}, {"b", fixtures::directed_cycle3()}};
  CHECK(kind_of([&] { certify(mixed, Regime::UndirectedSwitching); }) == ErrorKind::Hypothesis);

  TopologySet sizes{{"a", complete(3)}, {"b", complete(4)}};
  CHECK(kind_of([&] { certify(sizes, Regime::UndirectedSwitching); }) == ErrorKind::Input);

  TopologySet nl{{"a", complete(4)}, {"b", star(4)}, {"c", path(4)}};
  const auto rn = certify(nl, Regime::NonlinearSwitching, std::nullopt, SectorBounds{1.0, 2.0});
  CHECK(rn.h_max == doctest::Approx(0.125));
  CHECK(*rn.gershgorin_h == doctest::Approx(0.25 / 3));
  CHECK(rn.sector->gamma2 == 2.0);
  CHECK(kind_of([&] { certify(nl, Regime::NonlinearSwitching); }) == ErrorKind::Input);
}

TEST_CASE("detect_regime") {
  CHECK(detect_regime({{"a", complete(3)}}, false) == Regime::UndirectedFixed);
  CHECK(detect_regime({{"a", fixtures::directed_cycle3()}}, false) == Regime::DirectedFixed);
  CHECK(detect_regime({{"a", complete(3)}, {"b", path(3)}}, false) == Regime::UndirectedSwitching);
  CHECK(detect_regime({{"a", complete(3)}}, true) == Regime::NonlinearSwitching);
  CHECK(kind_of([] { detect_regime({{"a", complete(3)}, {"b", fixtures::directed_cycle3()}}, false); }) ==
        ErrorKind::Hypothesis);
  CHECK(kind_of([] { detect_regime({}, false); }) == ErrorKind::Input);
}

TEST_CASE("property: Gershgorin estimate never exceeds the spectral bound") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = fixtures::random_connected(rng, 2 + rng.uniform_int(0, 13));
    CHECK(gershgorin_bound(g) <= undirected_bound(spec(g)) * (1 + 1e-12));
  }
}

TEST_CASE("property: directed_bound equals undirected_bound on real spectra") {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = fixtures::random_connected(rng, 2 + rng.uniform_int(0, 10));
    const Graph as_directed(g.weights(), Orientation::Directed);
    CHECK(directed_bound(spec(as_directed)) == doctest::Approx(undirected_bound(spec(g))).epsilon(1e-10));
  }
}

TEST_CASE("property: singleton switching bound equals the fixed bound") {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = spec(fixtures::random_connected(rng, 2 + rng.uniform_int(0, 10)));
    const std::vector<Spectrum> one{s};
    CHECK(switching_bound(one) == undirected_bound(s));
  }
}

TEST_CASE("property: nonlinear bound increases in gamma1 and decreases in gamma2") {
  Rng rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<Spectrum> set{spec(fixtures::random_connected(rng, 5)), spec(fixtures::random_connected(rng, 5))};
    const double g2 = rng.uniform(0.5, 4.0);
    const double g1a = rng.uniform(0.01, 0.5) * g2;
    const double g1b = g1a + rng.uniform(0.01, 0.45) * g2;
    CHECK(nonlinear_bound(set, {g1a, g2}) < nonlinear_bound(set, {g1b, g2}));
    CHECK(nonlinear_bound(set, {g1a, g2}) > nonlinear_bound(set, {g1a, g2 * 1.1}));
    // gamma1 -> gamma2 approaches switching_bound / gamma2.
    const double eps = 1e-9 * g2;
    CHECK(nonlinear_bound(set, {g2 - eps, g2}) == doctest::Approx(switching_bound(set) / g2).epsilon(1e-8));
  }
}

TEST_CASE("property: per-step contraction is below one exactly inside the bound") {
  Rng rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = spec(fixtures::random_connected(rng, 2 + rng.uniform_int(0, 10)));
    const double bound = undirected_bound(s);
    const double inside = bound * rng.uniform(0.01, 0.999);
    const double outside = bound * rng.uniform(1.001, 3.0);
    const double c = dt_step_factor(s, inside);
    CHECK(c < 1.0);
    CHECK(c >= 0.0);
    CHECK(dt_step_factor(s, outside) > 1.0);
    const std::vector<Spectrum> one{s};
    const auto r = decay_certificate(one, inside, Regime::UndirectedFixed);
    CHECK(*r.dt_contraction == c);
    CHECK(*r.decay_rate > 0.0);
    CHECK(*r.decay_rate <= s.lambda2());
  }
}

TEST_CASE("report invariants") {
  Rng rng(36);
  for (int trial = 0; trial < 100; ++trial) {
    TopologySet set{{"g", fixtures::random_connected(rng, 2 + rng.uniform_int(0, 8))}};
    const auto r = certify(set, Regime::UndirectedFixed);
    CHECK(r.h_max > 0.0);
    CHECK(*r.gershgorin_h <= r.h_max * (1 + 1e-12));
    CHECK(*r.decay_rate > 0.0);
    CHECK(*r.dt_contraction >= 0.0);
    CHECK(*r.dt_contraction < 1.0);
  }
}

TEST_CASE("to_string names") {
  CHECK(std::string(to_string(Regime::UndirectedFixed)) == "undirected-fixed");
  CHECK(std::string(to_string(Regime::DirectedFixed)) == "directed-fixed");
  CHECK(std::string(to_string(Regime::UndirectedSwitching)) == "undirected-switching");
  CHECK(std::string(to_string(Regime::NonlinearSwitching)) == "nonlinear-switching");
  CHECK(std::string(to_string(ConsensusRule::Average)) == "average");
  CHECK(std::string(to_string(ConsensusRule::WWeighted)) == "w-weighted");
}
