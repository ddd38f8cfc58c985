#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "pilotwave/errors.hpp"
#include "pilotwave/fft.hpp"
#include "pilotwave/potential.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

// One split-step propagation run: `steps` Strang steps of size dt under
// H = p^2/(2 mass) + V. dt may be negative (backward evolution); the
// phase-wrap guard applies to |dt|.
struct EvolutionSpec {
  double dt = 1e-3;
  std::size_t steps = 0;
  double mass = 1.0;
  std::optional<Potential> potential;  // absent == free

  void validate(const Grid& grid) const {
    if (dt == 0.0 || !std::isfinite(dt))
      throw std::invalid_argument("EvolutionSpec: dt must be finite and nonzero");
    if (!(mass > 0.0)) throw std::invalid_argument("EvolutionSpec: mass must be > 0");
    if (potential && potential->grid() != grid)
      throw GridMismatch("EvolutionSpec: potential grid differs from state grid");
    if (potential && std::abs(dt) * potential->max_abs() >= std::numbers::pi)
      throw PhaseWrapRisk("EvolutionSpec: dt * V_max >= pi, split-step phase would wrap");
  }
};

struct EvolveDiagnostics {
  double max_boundary_mass = 0.0;
  double final_norm = 0.0;
};

namespace detail {

// Probability mass in the outermost cell layer; the periodic-boundary guard
// watches this.
inline double boundary_mass(const Grid& grid, std::span<const Complex> v) {
  const double vol = grid.cell_volume();
  double m = 0.0;
  if (grid.dimension() == 1) {
    const std::size_t n = grid.axis(0).points;
    m = std::norm(v[0]) + std::norm(v[n - 1]);
  } else {
    const std::size_t nx = grid.axis(0).points, ny = grid.axis(1).points;
    for (std::size_t i = 0; i < nx; ++i)
      m += std::norm(v[grid.index(i, 0)]) + std::norm(v[grid.index(i, ny - 1)]);
    for (std::size_t j = 1; j + 1 < ny; ++j)
      m += std::norm(v[grid.index(0, j)]) + std::norm(v[grid.index(nx - 1, j)]);
  }
  return m * vol;
}

// In-place forward/inverse FFT over both axes of a 2D row-major array.
inline void fft2(std::vector<Complex>& v, const Grid& grid, const FftPlan& plan_x,
                 const FftPlan& plan_y, bool inverse) {
  const std::size_t nx = grid.axis(0).points, ny = grid.axis(1).points;
  for (std::size_t i = 0; i < nx; ++i) {
    std::span<Complex> row(v.data() + i * ny, ny);
    inverse ? plan_y.inverse(row) : plan_y.forward(row);
  }
  std::vector<Complex> col(nx);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) col[i] = v[i * ny + j];
    inverse ? plan_x.inverse(col) : plan_x.forward(col);
    for (std::size_t i = 0; i < nx; ++i) v[i * ny + j] = col[i];
  }
}

struct SplitStepOperator {
  SplitStepOperator(const Grid& grid, const EvolutionSpec& spec)
      : grid_(grid),
        plan_x_(grid.axis(0).points),
        plan_y_(grid.dimension() == 2 ? grid.axis(1).points : 2) {
    for (int a = 0; a < grid.dimension(); ++a)
      if (!is_power_of_two(grid.axis(a).points))
        throw std::invalid_argument("evolve: grid points per axis must be a power of two");

    // Half-step kinetic phase per spectral bin: exp(-i dt/2 * k^2 / (2 m)).
    std::vector<std::vector<double>> k(static_cast<std::size_t>(grid.dimension()));
    for (int a = 0; a < grid.dimension(); ++a) {
      const auto ia = static_cast<std::size_t>(a);
      k[ia] = spectral_wavenumbers(grid.axis(a).points, grid.axis(a).spacing());
    }
    kinetic_half_.resize(grid.size());
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      double k2;
      if (grid.dimension() == 1) {
        k2 = k[0][idx] * k[0][idx];
      } else {
        const std::size_t ny = grid.axis(1).points;
        const double kx = k[0][idx / ny], ky = k[1][idx % ny];
        k2 = kx * kx + ky * ky;
      }
      kinetic_half_[idx] = std::polar(1.0, -0.5 * spec.dt * k2 / (2.0 * spec.mass));
    }

    if (spec.potential) {
      potential_phase_.emplace(grid.size());
      for (std::size_t idx = 0; idx < grid.size(); ++idx)
        (*potential_phase_)[idx] = std::polar(1.0, -spec.dt * spec.potential->value(idx));
    }
  }

  // Strang step: half kinetic (spectral), full potential (position), half
  // kinetic (spectral).
  void step(std::vector<Complex>& v) const {
    half_kinetic(v);
    if (potential_phase_)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= (*potential_phase_)[i];
    half_kinetic(v);
  }

 private:
  void half_kinetic(std::vector<Complex>& v) const {
    to_spectral(v, false);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= kinetic_half_[i];
    to_spectral(v, true);
  }

  void to_spectral(std::vector<Complex>& v, bool inverse) const {
    if (grid_.dimension() == 1) {
      inverse ? plan_x_.inverse(v) : plan_x_.forward(v);
    } else {
      fft2(v, grid_, plan_x_, plan_y_, inverse);
    }
  }

  Grid grid_;
  FftPlan plan_x_, plan_y_;
  std::vector<Complex> kinetic_half_;
  std::optional<std::vector<Complex>> potential_phase_;
};

}  // namespace detail

inline constexpr double kBoundaryMassGuard = 1e-6;

// Strang-split spectral propagation. Unitary up to rounding, so the norm is
// conserved; the boundary guard throws if probability mass ever reaches the
// periodic edge (a configuration mistake, not a physical effect).
inline WaveFunction evolve(const WaveFunction& wf, const EvolutionSpec& spec,
                           EvolveDiagnostics* diag = nullptr) {
  spec.validate(wf.grid());
  std::vector<Complex> v(wf.values().begin(), wf.values().end());
  if (spec.steps > 0) {
    detail::SplitStepOperator op(wf.grid(), spec);
    double max_bmass = detail::boundary_mass(wf.grid(), v);
    for (std::size_t s = 0; s < spec.steps; ++s) {
      op.step(v);
      max_bmass = std::max(max_bmass, detail::boundary_mass(wf.grid(), v));
    }
    if (max_bmass > kBoundaryMassGuard)
      throw BoundaryLeak("evolve: probability mass at the periodic boundary exceeded 1e-6");
    if (diag) diag->max_boundary_mass = max_bmass;
  }
  WaveFunction out(wf.grid(), std::move(v));
  if (diag) diag->final_norm = out.norm();
  return out;
}

// As evolve(), but records the state every `stride` steps (snapshot 0 is the
// initial state; the final state is always included).
inline std::vector<WaveFunction> evolve_recording(const WaveFunction& wf,
                                                  const EvolutionSpec& spec,
                                                  std::size_t stride = 1,
                                                  EvolveDiagnostics* diag = nullptr) {
  spec.validate(wf.grid());
  if (stride < 1 || spec.steps % stride != 0)
    throw std::invalid_argument("evolve_recording: stride must divide steps");
  std::vector<WaveFunction> snaps;
  snaps.reserve(spec.steps / stride + 1);
  snaps.push_back(wf);
  std::vector<Complex> v(wf.values().begin(), wf.values().end());
  detail::SplitStepOperator op(wf.grid(), spec);
  double max_bmass = detail::boundary_mass(wf.grid(), v);
  for (std::size_t s = 1; s <= spec.steps; ++s) {
    op.step(v);
    max_bmass = std::max(max_bmass, detail::boundary_mass(wf.grid(), v));
    if (s % stride == 0) snaps.emplace_back(wf.grid(), v);
  }
  if (max_bmass > kBoundaryMassGuard)
    throw BoundaryLeak("evolve: probability mass at the periodic boundary exceeded 1e-6");
  if (diag) {
    diag->max_boundary_mass = max_bmass;
    diag->final_norm = snaps.back().norm();
  }
  return snaps;
}

}  // namespace pilotwave
