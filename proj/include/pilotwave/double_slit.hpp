#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "pilotwave/evolution.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

// Double slit in the transverse coordinate: the longitudinal flight to the
// screen is folded into evolution time (paraxial reduction), so the grid
// axis is the screen coordinate. Slit 1 sits at +separation/2 (upper),
// slit 2 at -separation/2. forward_momentum is the longitudinal wavenumber
// shared by both gap packets; it fixes the screen distance k*t/m but plays
// no role in the transverse dynamics.
struct SlitConfig {
  SlitOpen open = SlitOpen::both;
  double separation = 4.0;
  double width = 0.5;
  double forward_momentum = 10.0;
};

namespace detail {

inline void check_slit_geometry(const Grid& grid, const SlitConfig& cfg) {
  if (grid.dimension() != 1)
    throw std::invalid_argument("prepare_double_slit: transverse model is 1D");
  if (!(cfg.separation > cfg.width) || !(cfg.width > 0.0))
    throw GeometryError("prepare_double_slit: need separation > width > 0");
  const auto& ax = grid.axis(0);
  if (cfg.separation / 2.0 + cfg.width >= ax.max || -cfg.separation / 2.0 - cfg.width <= ax.min)
    throw GeometryError("prepare_double_slit: slits fall outside the grid");
}

// Packet emanating from one gap: a Gaussian of sigma = width/2 centered on
// the gap, zero transverse momentum.
inline WaveFunction gap_packet(const Grid& grid, const SlitConfig& cfg, int slit) {
  const double center = (slit == 1 ? +1.0 : -1.0) * cfg.separation / 2.0;
  return gaussian_packet_1d(grid, center, cfg.width / 2.0);
}

inline WaveFunction initial_slit_state(const Grid& grid, const SlitConfig& cfg) {
  check_slit_geometry(grid, cfg);
  if (cfg.open == SlitOpen::slit1) return gap_packet(grid, cfg, 1);
  if (cfg.open == SlitOpen::slit2) return gap_packet(grid, cfg, 2);
  const WaveFunction g1 = gap_packet(grid, cfg, 1);
  const WaveFunction g2 = gap_packet(grid, cfg, 2);
  std::vector<Complex> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = g1.value(k) + g2.value(k);
  return normalize(WaveFunction(grid, std::move(v)));
}

}  // namespace detail

// Post-slit wavefunction at the screen time: Gaussian packets on the open
// gap(s), then free flight to the screen. For `both` this is the normalized
// symmetric superposition.
inline WaveFunction prepare_double_slit(const Grid& grid, const SlitConfig& cfg,
                                        const EvolutionSpec& spec) {
  return evolve(detail::initial_slit_state(grid, cfg), spec);
}

// As above but recording snapshots, for trajectory transport through the
// interference region.
inline std::vector<WaveFunction> prepare_double_slit_recording(const Grid& grid,
                                                               const SlitConfig& cfg,
                                                               const EvolutionSpec& spec,
                                                               std::size_t stride = 1) {
  return evolve_recording(detail::initial_slit_state(grid, cfg), spec, stride);
}

// The pointwise identity |psi1 + psi2|^2 = |psi1|^2 + |psi2|^2 +
// 2 Re psi1* psi2. sum_density and no_interference_density are normalized;
// cross_term is the raw pointwise 2 Re psi1* psi2.
struct InterferenceDecomposition {
  Density sum_density;
  Density no_interference_density;
  std::vector<double> cross_term;
};

inline InterferenceDecomposition interference_decomposition(const WaveFunction& psi1,
                                                            const WaveFunction& psi2) {
  require_same_grid(psi1.grid(), psi2.grid(), "interference_decomposition: grid mismatch");
  const Grid& g = psi1.grid();
  std::vector<Complex> sum(g.size());
  std::vector<double> no_interf(g.size()), cross(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    sum[k] = psi1.value(k) + psi2.value(k);
    no_interf[k] = std::norm(psi1.value(k)) + std::norm(psi2.value(k));
    cross[k] = 2.0 * std::real(std::conj(psi1.value(k)) * psi2.value(k));
  }
  WaveFunction psi_sum = normalize(WaveFunction(g, std::move(sum)));

  const double no_interf_mass = [&] {
    double s = 0.0;
    for (double w : no_interf) s += w;
    return s * g.cell_volume();
  }();
  if (!(no_interf_mass > 0.0))
    throw ZeroNorm("interference_decomposition: both inputs vanish");
  for (double& w : no_interf) w /= no_interf_mass;

  return InterferenceDecomposition{density(psi_sum), Density(g, std::move(no_interf)),
                                   std::move(cross)};
}

}  // namespace pilotwave
