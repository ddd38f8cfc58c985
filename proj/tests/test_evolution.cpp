// Split-step spectral propagation against closed-form Gaussian dynamics.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "pilotwave/evolution.hpp"
#include "pilotwave/wavefunction.hpp"
#include "oracles.hpp"

using namespace pilotwave;
using Catch::Approx;

namespace {

double density_mean(const Density& d) {
  double m = 0.0;
  for (std::size_t k = 0; k < d.grid().size(); ++k)
    m += d.grid().coordinate(0, k) * d.weight(k);
  return m * d.grid().cell_volume();
}

double density_variance(const Density& d) {
  const double mean = density_mean(d);
  double v = 0.0;
  for (std::size_t k = 0; k < d.grid().size(); ++k) {
    const double x = d.grid().coordinate(0, k) - mean;
    v += x * x * d.weight(k);
  }
  return v * d.grid().cell_volume();
}

WaveFunction harmonic_ground_state(const Grid& g) {
  // omega = m = 1: psi ~ exp(-x^2/2), |psi|^2 = N(0, 1/2).
  return normalize(WaveFunction::from_function(g, [](const Position& p) {
    return Complex{std::exp(-p[0] * p[0] / 2.0), 0.0};
  }));
}

}  // namespace

TEST_CASE("free Gaussian: center moves at k/m and width follows sigma(t)") {
  const Grid g = Grid::line(-40.0, 40.0, 2048);
  const double sigma0 = 1.0, k0 = 5.0, t = 1.0;
  const WaveFunction psi0 = gaussian_packet_1d(g, 0.0, sigma0, k0);

  EvolutionSpec spec;
  spec.dt = 0.001;
  spec.steps = 1000;
  const WaveFunction psi_t = evolve(psi0, spec);

  const Density d = density(psi_t);
  const double sigma_t = oracles::free_gaussian_sigma_t(t, sigma0);
  CHECK(density_mean(d) == Approx(k0 * t).epsilon(1e-3));
  CHECK(density_variance(d) == Approx(sigma_t * sigma_t).epsilon(1e-3));
}

TEST_CASE("free Gaussian: pointwise agreement with the analytic propagator") {
  const Grid g = Grid::line(-40.0, 40.0, 2048);
  const double sigma0 = 1.0, k0 = 2.0, t = 2.0;
  const WaveFunction psi0 = gaussian_packet_1d(g, -3.0, sigma0, k0);

  EvolutionSpec spec;
  spec.dt = 0.002;
  spec.steps = 1000;
  const WaveFunction psi_t = evolve(psi0, spec);

  // Free split-step is exact in time (kinetic term only); the remaining
  // error is grid resolution, and the densities must agree pointwise.
  double max_density_err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.coordinate(0, k);
    const Complex ref = oracles::free_gaussian(x, t, -3.0, sigma0, k0);
    max_density_err = std::max(max_density_err,
                               std::abs(std::norm(psi_t.value(k)) - std::norm(ref)));
  }
  CHECK(max_density_err < 1e-10);
}

TEST_CASE("harmonic ground state is stationary over a full period") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  const WaveFunction psi0 = harmonic_ground_state(g);
  const double period = 2.0 * std::numbers::pi;
  const std::size_t steps = 25000;

  EvolutionSpec spec;
  spec.dt = period / static_cast<double>(steps);
  spec.steps = steps;
  spec.potential = Potential::harmonic(g, 1.0);
  const WaveFunction psi_T = evolve(psi0, spec);

  const Density d0 = density(psi0), dT = density(psi_T);
  double drift = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    drift = std::max(drift, std::abs(dT.weight(k) - d0.weight(k)));
  CHECK(drift < 1e-6);
}

TEST_CASE("zero steps is the identity") {
  const Grid g = Grid::line(-10.0, 10.0, 128);
  const WaveFunction psi0 = gaussian_packet_1d(g, 0.0, 1.0, 1.0);
  EvolutionSpec spec;
  spec.dt = 0.01;
  spec.steps = 0;
  const WaveFunction out = evolve(psi0, spec);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(out.value(k) == psi0.value(k));
}

TEST_CASE("norm is conserved to 1e-8 over 1e4 split steps") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  const WaveFunction psi0 = normalize(WaveFunction::from_function(g, [](const Position& p) {
    return Complex{std::exp(-(p[0] - 1.0) * (p[0] - 1.0) / 2.0), 0.0};
  }));
  EvolutionSpec spec;
  spec.dt = 1e-4;
  spec.steps = 10000;
  spec.potential = Potential::harmonic(g, 1.0);
  EvolveDiagnostics diag;
  evolve(psi0, spec, &diag);
  CHECK(std::abs(diag.final_norm - 1.0) < 1e-8);
}

TEST_CASE("evolution is linear") {
  const Grid g = Grid::line(-20.0, 20.0, 512);
  const WaveFunction f = gaussian_packet_1d(g, -2.0, 1.0, 1.0);
  const WaveFunction h = gaussian_packet_1d(g, 2.0, 0.8, -2.0);
  const Complex alpha{0.6, 0.2}, beta{-0.3, 0.7};

  EvolutionSpec spec;
  spec.dt = 0.005;
  spec.steps = 200;
  spec.potential = Potential::harmonic(g, 0.5);

  std::vector<Complex> combo(g.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    combo[k] = alpha * f.value(k) + beta * h.value(k);
  const WaveFunction ef = evolve(f, spec);
  const WaveFunction eh = evolve(h, spec);
  const WaveFunction ec = evolve(WaveFunction(g, std::move(combo)), spec);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Complex expected = alpha * ef.value(k) + beta * eh.value(k);
    CHECK(std::abs(ec.value(k) - expected) < 1e-8);
  }
}

TEST_CASE("evolving forward then backward returns the initial state") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  const WaveFunction psi0 = gaussian_packet_1d(g, 1.0, 0.9, 2.0);
  EvolutionSpec fwd;
  fwd.dt = 0.001;
  fwd.steps = 500;
  fwd.potential = Potential::harmonic(g, 1.0);
  EvolutionSpec bwd = fwd;
  bwd.dt = -fwd.dt;
  const WaveFunction back = evolve(evolve(psi0, fwd), bwd);
  for (std::size_t k = 0; k < g.size(); ++k)
    CHECK(std::abs(back.value(k) - psi0.value(k)) < 1e-8);
}

TEST_CASE("phase-wrap guard: dt * V_max >= pi is rejected") {
  const Grid g = Grid::line(-10.0, 10.0, 128);
  EvolutionSpec spec;
  spec.dt = 0.1;
  spec.steps = 1;
  spec.potential = Potential::harmonic(g, 10.0);  // V_max = 5000 at the edge
  const WaveFunction psi0 = gaussian_packet_1d(g, 0.0, 1.0);
  CHECK_THROWS_AS(evolve(psi0, spec), PhaseWrapRisk);
}

TEST_CASE("boundary guard trips when probability mass reaches the edge") {
  const Grid g = Grid::line(-10.0, 10.0, 256);
  const WaveFunction psi0 = gaussian_packet_1d(g, 0.0, 1.0, 8.0);  // fast packet
  EvolutionSpec spec;
  spec.dt = 0.005;
  spec.steps = 400;  // center would travel 16 units: straight into the edge
  CHECK_THROWS_AS(evolve(psi0, spec), BoundaryLeak);
}

TEST_CASE("Strang splitting converges at second order (step halving)") {
  const Grid g = Grid::line(-16.0, 16.0, 512);
  // Coherent state: ground-state shape displaced by 2.
  const WaveFunction psi0 = normalize(WaveFunction::from_function(g, [](const Position& p) {
    const double d = p[0] - 2.0;
    return Complex{std::exp(-d * d / 2.0), 0.0};
  }));
  const Potential trap = Potential::harmonic(g, 1.0);
  const double T = 1.0;

  auto run = [&](std::size_t steps) {
    EvolutionSpec spec;
    spec.dt = T / static_cast<double>(steps);
    spec.steps = steps;
    spec.potential = trap;
    return evolve(psi0, spec);
  };
  const WaveFunction ref = run(8000);
  auto err = [&](const WaveFunction& wf) {
    double e = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
      e = std::max(e, std::abs(wf.value(k) - ref.value(k)));
    return e;
  };
  const double e1 = err(run(250));
  const double e2 = err(run(500));
  CHECK(e1 / e2 == Approx(4.0).margin(1.0));  // O(dt^2) global error
}

TEST_CASE("2D free packet: norm conserved and center moves at k/m") {
  const Grid g = Grid::plane(-20.0, 20.0, 256, -20.0, 20.0, 256);
  const WaveFunction psi0 = gaussian_packet(g, {0.0, 0.0}, {1.0, 1.0}, {2.0, -1.0});
  EvolutionSpec spec;
  spec.dt = 0.002;
  spec.steps = 500;
  EvolveDiagnostics diag;
  const WaveFunction psi_t = evolve(psi0, spec, &diag);
  CHECK(std::abs(diag.final_norm - 1.0) < 1e-8);

  const Density d = density(psi_t);
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Position p = g.point(k);
    mx += p[0] * d.weight(k);
    my += p[1] * d.weight(k);
  }
  mx *= g.cell_volume();
  my *= g.cell_volume();
  CHECK(mx == Approx(2.0).margin(2e-3));
  CHECK(my == Approx(-1.0).margin(2e-3));
}

TEST_CASE("potential constructors: harmonic and slit barrier") {
  const Grid g = Grid::line(-10.0, 10.0, 256);
  const Potential trap = Potential::harmonic(g, 2.0);
  CHECK(trap.value(128) == Approx(0.0).margin(1e-12));  // x = 0
  CHECK(trap.max_abs() == Approx(0.5 * 4.0 * 100.0));

  const Potential wall = Potential::slit_barrier(g, 50.0, 0.5, 4.0, SlitOpen::both);
  const auto cell = [&](double x) {
    return static_cast<std::size_t>(std::llround((x + 10.0) / g.axis(0).spacing()));
  };
  CHECK(wall.value(cell(2.0)) == 0.0);
  CHECK(wall.value(cell(-2.0)) == 0.0);
  CHECK(wall.value(cell(0.0)) == 50.0);
  CHECK(wall.value(cell(6.0)) == 50.0);

  const Potential one_gap = Potential::slit_barrier(g, 50.0, 0.5, 4.0, SlitOpen::slit1);
  CHECK(one_gap.value(cell(2.0)) == 0.0);
  CHECK(one_gap.value(cell(-2.0)) == 50.0);

  CHECK_THROWS_AS(Potential::slit_barrier(g, 50.0, 0.5, 25.0, SlitOpen::both), GeometryError);
  CHECK_THROWS_AS(Potential::slit_barrier(g, 50.0, 2.0, 1.0, SlitOpen::both), GeometryError);
}
