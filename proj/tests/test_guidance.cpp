// Guidance-equation machinery: velocities, trajectory transport,
// equivariance, and the two-particle nonlocal dependence.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <numeric>

#include "pilotwave/double_slit.hpp"
#include "pilotwave/guidance.hpp"
#include "oracles.hpp"

using namespace pilotwave;
using Catch::Approx;

namespace {

WaveFunction harmonic_ground_state(const Grid& g) {
  return normalize(WaveFunction::from_function(g, [](const Position& p) {
    return Complex{std::exp(-p[0] * p[0] / 2.0), 0.0};
  }));
}

// Entangled pair state g(x - y) + g(x + y) with a momentum-carrying Gaussian
// g(u) = exp(i k u - u^2 / 4). Real g would give zero velocity everywhere;
// the phase makes the nonlocal dependence visible.
constexpr double kPairMomentum = 2.0;

Complex pair_packet(double u) {
  return std::exp(Complex{-u * u / 4.0, kPairMomentum * u});
}

Complex pair_packet_derivative(double u) {
  return Complex{-u / 2.0, kPairMomentum} * pair_packet(u);
}

WaveFunction entangled_pair_state(const Grid& g) {
  return normalize(WaveFunction::from_function(g, [](const Position& p) {
    return pair_packet(p[0] - p[1]) + pair_packet(p[0] + p[1]);
  }));
}

// Direct-evaluation oracle for particle-1 velocity of the pair state, no
// grids involved.
double pair_velocity_oracle(double x, double y) {
  const Complex num = pair_packet_derivative(x - y) + pair_packet_derivative(x + y);
  const Complex den = pair_packet(x - y) + pair_packet(x + y);
  return std::imag(num / den);
}

}  // namespace

TEST_CASE("velocity vanishes for a real wavefunction") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  const WaveFunction psi = harmonic_ground_state(g);
  for (double x : {-2.0, -0.5, 0.0, 0.3, 1.7})
    CHECK(std::abs(velocity(psi, {x, 0.0})[0]) < 1e-9);
}

TEST_CASE("plane-modulated Gaussian moves at k/m where the envelope lives") {
  const Grid g = Grid::line(-20.0, 20.0, 1024);
  const WaveFunction psi = gaussian_packet_1d(g, 0.0, 1.0, 5.0);
  // At grid nodes the spectral gradient and the quotient are exact.
  for (std::size_t k : {std::size_t{448}, std::size_t{512}, std::size_t{576}}) {
    const double x = g.coordinate(0, k);
    CHECK(velocity(psi, {x, 0.0})[0] == Approx(5.0).margin(1e-6));
  }
  // Off the nodes the linear interpolation of exp(ikx) costs O((k h)^2 / 8).
  const double kh = 5.0 * g.axis(0).spacing();
  CHECK(velocity(psi, {0.31, 0.0})[0] == Approx(5.0).margin(5.0 * kh * kh));
  // Heavier particle moves slower: hbar k / m.
  CHECK(velocity(psi, {0.0, 0.0}, 2.0)[0] == Approx(2.5).margin(1e-6));
}

TEST_CASE("velocity near a node is refused") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  // Odd state: exact node at x = 0.
  const WaveFunction psi = normalize(WaveFunction::from_function(g, [](const Position& p) {
    return Complex{p[0] * std::exp(-p[0] * p[0] / 4.0), 0.0};
  }));
  CHECK_THROWS_AS(velocity(psi, {0.0, 0.0}), NearNode);
}

TEST_CASE("product state: particle-1 velocity ignores particle 2") {
  const Grid g = Grid::plane(-8.0, 8.0, 256, -8.0, 8.0, 256);
  const WaveFunction psi = gaussian_packet(g, {0.5, -0.3}, {1.0, 0.8}, {1.3, -0.7});
  StaticVelocityField field(psi, 1.0);
  const double x1 = 0.5;
  const double v_ref = (*field.velocity_at({x1, 0.0}))[0];
  for (double y : {-2.0, -1.0, 1.0, 2.5}) {
    const auto v = field.velocity_at({x1, y});
    REQUIRE(v.has_value());
    CHECK(std::abs((*v)[0] - v_ref) < 1e-9);
  }
}

TEST_CASE("entangled pair state: particle-1 velocity depends on particle 2") {
  const Grid g = Grid::plane(-8.0, 8.0, 256, -8.0, 8.0, 256);
  const WaveFunction psi = entangled_pair_state(g);

  // Probe coordinates sit exactly on grid nodes (h = 1/16).
  const auto probe = two_particle_nonlocality_probe(psi, 0.5, 0.0, 1.0);
  CHECK(probe.v1_given_a == Approx(pair_velocity_oracle(0.5, 0.0)).margin(1e-6));
  CHECK(probe.v1_given_b == Approx(pair_velocity_oracle(0.5, 1.0)).margin(1e-6));
  CHECK(probe.delta > 0.01);
  CHECK(probe.delta ==
        Approx(std::abs(pair_velocity_oracle(0.5, 0.0) - pair_velocity_oracle(0.5, 1.0)))
            .margin(1e-6));
}

TEST_CASE("identical particle-2 positions give delta exactly zero") {
  const Grid g = Grid::plane(-8.0, 8.0, 256, -8.0, 8.0, 256);
  const WaveFunction psi = entangled_pair_state(g);
  const auto probe = two_particle_nonlocality_probe(psi, 0.5, 1.0, 1.0);
  CHECK(probe.delta == 0.0);
}

TEST_CASE("product state probe: delta below 1e-9 at many probe points") {
  const Grid g = Grid::plane(-8.0, 8.0, 256, -8.0, 8.0, 256);
  const WaveFunction psi = gaussian_packet(g, {0.0, 0.0}, {1.2, 0.9}, {0.8, -1.1});
  for (double x1 : {-1.0, 0.0, 0.5, 1.5})
    for (double y2 : {-1.5, 0.75})
      CHECK(two_particle_nonlocality_probe(psi, x1, 0.0, y2).delta < 1e-9);
}

TEST_CASE("stationary state: trajectories do not move") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  const WaveFunction psi = harmonic_ground_state(g);
  const GuidanceField field({psi, psi, psi, psi, psi}, 0.25);
  const std::vector<Position> initial{{-1.5, 0.0}, {-0.2, 0.0}, {0.9, 0.0}};
  const auto ens = integrate_ensemble(field, initial, 0.25);
  for (std::size_t i = 0; i < ens.count(); ++i)
    for (const Position& p : ens.positions[i])
      CHECK(std::abs(p[0] - initial[i][0]) < 1e-8);
}

TEST_CASE("free packet: the trajectory from the center rides the center") {
  // Fine spacing: the 1e-4 target is limited by the O(h^2) interpolation of
  // the quadratic spreading phase, not by the integrator.
  const Grid g = Grid::line(-16.0, 16.0, 2048);
  const double k0 = 2.0, t_final = 2.0;
  EvolutionSpec spec;
  spec.dt = 0.002;
  spec.steps = 1000;
  const auto snaps = evolve_recording(gaussian_packet_1d(g, 0.0, 1.0, k0), spec, 1);
  const GuidanceField field(snaps, spec.dt);

  const auto ens = integrate_ensemble(field, {{0.0, 0.0}}, field.snapshot_dt());
  const Position end = ens.positions[0].back();
  CHECK(end[0] == Approx(k0 * t_final).margin(1e-4));
}

TEST_CASE("free spreading packet follows the scaling flow x sigma_t/sigma_0") {
  const Grid g = Grid::line(-40.0, 40.0, 1024);
  EvolutionSpec spec;
  spec.dt = 0.002;
  spec.steps = 1000;
  const auto snaps = evolve_recording(gaussian_packet_1d(g, 0.0, 1.0), spec, 2);
  const GuidanceField field(snaps, 2.0 * spec.dt);

  for (double x0 : {1.0, -0.5, 2.0}) {
    const auto ens = integrate_ensemble(field, {{x0, 0.0}}, field.snapshot_dt());
    const double expected = oracles::free_gaussian_trajectory(x0, 2.0, 0.0, 1.0, 0.0);
    CHECK(ens.positions[0].back()[0] == Approx(expected).margin(1e-3));
  }
}

TEST_CASE("trajectories are deterministic and 1D paths never cross") {
  const Grid g = Grid::line(-40.0, 40.0, 1024);
  EvolutionSpec spec;
  spec.dt = 0.004;
  spec.steps = 500;
  const auto snaps = evolve_recording(gaussian_packet_1d(g, 0.0, 1.0, 1.0), spec, 2);
  const GuidanceField field(snaps, 2.0 * spec.dt);

  const auto initial = sample_positions(density(field.snapshot(0)), 400, 11);
  const auto a = integrate_ensemble(field, initial, field.snapshot_dt());
  const auto b = integrate_ensemble(field, initial, field.snapshot_dt());
  for (std::size_t i = 0; i < a.count(); ++i)
    CHECK(std::memcmp(a.positions[i].data(), b.positions[i].data(),
                      a.positions[i].size() * sizeof(Position)) == 0);

  // Order by initial position; the order must persist at every time index.
  std::vector<std::size_t> order(initial.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return initial[i][0] < initial[j][0]; });
  for (std::size_t t = 0; t < a.times.size(); ++t)
    for (std::size_t r = 1; r < order.size(); ++r)
      CHECK(a.positions[order[r - 1]][t][0] <= a.positions[order[r]][t][0]);
}

TEST_CASE("a trajectory started on a node is flagged, not dropped") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  const WaveFunction odd = normalize(WaveFunction::from_function(g, [](const Position& p) {
    return Complex{p[0] * std::exp(-p[0] * p[0] / 4.0), 0.0};
  }));
  const GuidanceField field({odd, odd, odd}, 0.5);
  const auto ens = integrate_ensemble(field, {{0.0, 0.0}, {1.0, 0.0}}, 0.5);
  CHECK(ens.flagged[0] == 1);
  CHECK(ens.flagged[1] == 0);
  CHECK(ens.flagged_count() == 1);
  REQUIRE(ens.positions[0].size() == ens.times.size());  // kept for the record
}

TEST_CASE("RK4 convergence: halving dt cuts the endpoint error ~16x") {
  // Pure integrator check on a smooth analytic field (no grid interpolation).
  auto vel = [](const Position& p, double t) -> std::optional<Velocity> {
    return Velocity{std::sin(p[0]) * (1.0 + 0.5 * std::sin(2.0 * t)), 0.0};
  };
  auto endpoint = [&](double dt) {
    const auto ens = detail::integrate(vel, {{1.0, 0.0}}, 0.0, 2.0, dt);
    return ens.positions[0].back()[0];
  };
  const double ref = endpoint(0.2 / 8.0);
  const double e1 = std::abs(endpoint(0.2) - ref);
  const double e2 = std::abs(endpoint(0.1) - ref);
  CHECK(e1 / e2 > 8.0);
  CHECK(e1 / e2 < 32.0);
}

TEST_CASE("equivariance: stationary state passes by construction") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  const WaveFunction psi = harmonic_ground_state(g);
  const GuidanceField field({psi, psi, psi}, 0.5);
  const auto res = equivariance_check(field, 2000, 314, 1.0);
  CHECK(res.pass);
  CHECK(res.flagged == 0);
}

TEST_CASE("equivariance: transported ensemble matches |psi_t|^2; corrupted flow fails") {
  const Grid g = Grid::line(-40.0, 40.0, 1024);
  EvolutionSpec spec;
  spec.dt = 0.002;
  spec.steps = 1000;
  const auto snaps = evolve_recording(gaussian_packet_1d(g, 0.0, 1.0), spec, 4);
  const GuidanceField field(snaps, 4.0 * spec.dt);

  const std::size_t n = 10000;
  const auto good = equivariance_check(field, n, 7, 2.0);
  CHECK(good.pass);
  CHECK(good.ks_statistic < good.threshold);

  const auto bad = equivariance_check(field, n, 7, 2.0, 2.0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.ks_statistic > 2.0 * bad.threshold);
}

TEST_CASE("double-slit trajectories: attribution balanced, no axis crossing") {
  const Grid g = Grid::line(-30.0, 30.0, 1024);
  SlitConfig cfg;
  cfg.open = SlitOpen::both;
  EvolutionSpec spec;
  spec.dt = 0.002;
  spec.steps = 1000;
  const auto snaps = prepare_double_slit_recording(g, cfg, spec, 4);
  const GuidanceField field(snaps, 4.0 * spec.dt);

  const std::size_t n = 2000;
  const auto res = double_slit_trajectories(field, n, 42);
  CHECK(res.crossings == 0);

  std::size_t upper = 0;
  for (int slit : res.slit_attribution) upper += (slit == 1);
  // Binomial(n, 1/2): 3 sigma ~ 0.0335 n.
  CHECK(std::abs(static_cast<double>(upper) / static_cast<double>(n) - 0.5) < 0.0335);

  // Endpoints reproduce the interfering screen density (case C).
  std::vector<double> finals;
  finals.reserve(n);
  const std::size_t last = res.ensemble.times.size() - 1;
  for (std::size_t i = 0; i < n; ++i)
    if (!res.ensemble.flagged[i]) finals.push_back(res.ensemble.positions[i][last][0]);
  const double ks = ks_statistic(std::move(finals), GridCdf(density(field.snapshot(250))));
  CHECK(ks < ks_threshold(n));
}

TEST_CASE("pointer trajectories split with the Born weights") {
  const Grid g = Grid::line(-30.0, 30.0, 1024);
  const WaveFunction ready = gaussian_packet_1d(g, 0.0, 1.0);
  const PointerRun run = pointer_measure_recording(std::sqrt(0.3), std::sqrt(0.7), ready,
                                                   1.0, 5.0, 500);
  const std::size_t n = 2000;
  const auto res = pointer_trajectories(run, n, 2718);
  // Binomial(n, 0.3): 3 sigma ~ 0.0307.
  CHECK(std::abs(res.up_fraction - 0.3) < 0.0307);
  CHECK(res.ensemble.flagged_count() == 0);
}

TEST_CASE("sweeping node: true flow stays equivariant, corrupted flow fails") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  // Equal superposition of the two lowest trap eigenstates: the node of psi
  // sweeps through the packet once per beat period. The true flow steers
  // every trajectory around it.
  const WaveFunction psi0 = normalize(WaveFunction::from_function(g, [](const Position& p) {
    const double e = std::exp(-p[0] * p[0] / 2.0);
    return Complex{e + std::numbers::sqrt2 * p[0] * e, 0.0};
  }));
  EvolutionSpec spec;
  spec.dt = 0.002;
  spec.steps = 1500;
  spec.potential = Potential::harmonic(g, 1.0);
  const auto snaps = evolve_recording(psi0, spec, 4);
  const GuidanceField field(snaps, 4.0 * spec.dt);

  const auto good = equivariance_check(field, 2000, 5, 3.0);
  CHECK(good.pass);
  CHECK(good.flagged == 0);
  const auto bad = equivariance_check(field, 2000, 5, 3.0, 2.0);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("2D equivariance on a spreading anisotropic packet") {
  const Grid g = Grid::plane(-16.0, 16.0, 128, -16.0, 16.0, 128);
  EvolutionSpec spec;
  spec.dt = 0.005;
  spec.steps = 200;
  const auto snaps = evolve_recording(gaussian_packet(g, {0.0, 0.0}, {1.0, 0.6}, {0.5, -0.5}),
                                      spec, 4);
  const GuidanceField field(snaps, 4.0 * spec.dt);
  const auto res = equivariance_check(field, 4000, 99, 1.0);
  CHECK(res.pass);
}

TEST_CASE("integrate_ensemble validates dt against the snapshot spacing") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  const WaveFunction psi = harmonic_ground_state(g);
  const GuidanceField field({psi, psi}, 0.5);
  CHECK_THROWS_AS(integrate_ensemble(field, {{0.5, 0.0}}, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(integrate_ensemble(field, {{100.0, 0.0}}, 0.5), std::invalid_argument);
  CHECK_NOTHROW(integrate_ensemble(field, {{0.5, 0.0}}, 0.25));
}
