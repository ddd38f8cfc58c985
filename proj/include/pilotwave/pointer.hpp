#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "pilotwave/evolution.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

// Rigid displacement by delta via the spectral translation phase
// exp(-i k delta). Exactly unitary; the packet shape is untouched.
inline WaveFunction spectral_translate(const WaveFunction& wf, double delta) {
  if (wf.grid().dimension() != 1)
    throw std::invalid_argument("spectral_translate: 1D only");
  const std::size_t n = wf.grid().axis(0).points;
  if (!is_power_of_two(n))
    throw std::invalid_argument("spectral_translate: grid points must be a power of two");
  FftPlan plan(n);
  std::vector<Complex> v(wf.values().begin(), wf.values().end());
  plan.forward(v);
  const auto k = spectral_wavenumbers(n, wf.grid().axis(0).spacing());
  for (std::size_t j = 0; j < n; ++j) v[j] *= std::polar(1.0, -k[j] * delta);
  plan.inverse(v);
  return WaveFunction(wf.grid(), std::move(v));
}

// The coupled state c1 |1> Psi_up(y) + c2 |2> Psi_down(y): a two-level
// system entangled with a pointer coordinate. System coefficients are folded
// into the components, so the combined norm is one.
struct SpinorField {
  WaveFunction up;
  WaveFunction down;

  SpinorField(WaveFunction u, WaveFunction d) : up(std::move(u)), down(std::move(d)) {
    require_same_grid(up.grid(), down.grid(), "SpinorField: components on different grids");
    const double total = up.norm_squared() + down.norm_squared();
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("SpinorField: combined norm must be 1");
  }
};

// Von Neumann pointer measurement. The impulsive interaction translates the
// ready packet rigidly at velocity +coupling for system state 1 and
// -coupling for state 2 (no momentum boost, no spreading), realizing the
// branching of the ready state into the two pointer records. Branch norms
// are |c1|^2 and |c2|^2 exactly: unitarity hands Born weights to the
// branches with no extra postulate.
inline SpinorField pointer_measure(Complex c1, Complex c2, const WaveFunction& pointer0,
                                   double coupling, double duration) {
  if (std::abs(std::norm(c1) + std::norm(c2) - 1.0) > 1e-9)
    throw std::invalid_argument("pointer_measure: |c1|^2 + |c2|^2 must be 1");
  if (std::abs(pointer0.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("pointer_measure: ready state must be normalized");

  const double displacement = coupling * duration;
  WaveFunction psi1 = spectral_translate(pointer0, +displacement);
  WaveFunction psi2 = spectral_translate(pointer0, -displacement);

  auto scaled = [](const WaveFunction& wf, Complex c) {
    std::vector<Complex> v(wf.values().begin(), wf.values().end());
    for (Complex& x : v) x *= c;
    return WaveFunction(wf.grid(), std::move(v));
  };
  return SpinorField(scaled(psi1, c1), scaled(psi2, c2));
}

// |<Psi_1|Psi_2>| between the normalized branch packets: 1 means no
// measurement happened, 0 means the branches can no longer interfere (for
// all practical purposes). Returns nothing when a branch carries no weight
// (overlap undefined).
inline std::optional<double> decoherence_overlap(const SpinorField& sf) {
  const double nu = sf.up.norm();
  const double nd = sf.down.norm();
  if (nu < 1e-15 || nd < 1e-15) return std::nullopt;
  return std::abs(overlap(sf.up, sf.down)) / (nu * nd);
}

// Time-resolved record of a pointer measurement: branch densities at uniform
// snapshot times, for transporting pointer-coordinate trajectories.
struct PointerRun {
  Grid grid;
  double dt = 0.0;        // snapshot spacing
  double coupling = 0.0;  // branch translation speed
  std::vector<std::vector<double>> up_density;    // [snapshot][cell]
  std::vector<std::vector<double>> down_density;  // [snapshot][cell]

  std::size_t snapshot_count() const { return up_density.size(); }
  double time_span() const { return dt * static_cast<double>(snapshot_count() - 1); }
};

inline PointerRun pointer_measure_recording(Complex c1, Complex c2,
                                            const WaveFunction& pointer0, double coupling,
                                            double duration, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("pointer_measure_recording: steps >= 1");
  PointerRun run;
  run.grid = pointer0.grid();
  run.dt = duration / static_cast<double>(steps);
  run.coupling = coupling;
  const double w1 = std::norm(c1), w2 = std::norm(c2);
  for (std::size_t s = 0; s <= steps; ++s) {
    const double t = run.dt * static_cast<double>(s);
    const WaveFunction shifted_up = spectral_translate(pointer0, +coupling * t);
    const WaveFunction shifted_down = spectral_translate(pointer0, -coupling * t);
    std::vector<double> du(run.grid.size()), dd(run.grid.size());
    for (std::size_t k = 0; k < run.grid.size(); ++k) {
      du[k] = w1 * std::norm(shifted_up.value(k));
      dd[k] = w2 * std::norm(shifted_down.value(k));
    }
    run.up_density.push_back(std::move(du));
    run.down_density.push_back(std::move(dd));
  }
  return run;
}

}  // namespace pilotwave
