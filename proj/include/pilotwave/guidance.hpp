#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pilotwave/errors.hpp"
#include "pilotwave/fft.hpp"
#include "pilotwave/pointer.hpp"
#include "pilotwave/sampling.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

// Velocity quotients blow up at nodes of psi; below this fraction of
// max|psi| an evaluation is refused and the integrator shrinks its step.
inline constexpr double kNodeThresholdFraction = 1e-12;

namespace detail {

// d/dx_a psi by spectral differentiation along one axis.
inline std::vector<Complex> spectral_axis_gradient(const Grid& grid,
                                                   std::span<const Complex> values, int axis) {
  const auto& ax = grid.axis(axis);
  if (!is_power_of_two(ax.points))
    throw std::invalid_argument("spectral gradient: grid points must be a power of two");
  FftPlan plan(ax.points);
  const auto k = spectral_wavenumbers(ax.points, ax.spacing());
  std::vector<Complex> out(values.begin(), values.end());

  if (grid.dimension() == 1) {
    plan.forward(out);
    for (std::size_t j = 0; j < ax.points; ++j) out[j] *= Complex(0.0, k[j]);
    plan.inverse(out);
    return out;
  }

  const std::size_t nx = grid.axis(0).points, ny = grid.axis(1).points;
  if (axis == 1) {
    for (std::size_t i = 0; i < nx; ++i) {
      std::span<Complex> row(out.data() + i * ny, ny);
      plan.forward(row);
      for (std::size_t j = 0; j < ny; ++j) row[j] *= Complex(0.0, k[j]);
      plan.inverse(row);
    }
  } else {
    std::vector<Complex> col(nx);
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) col[i] = out[i * ny + j];
      plan.forward(col);
      for (std::size_t i = 0; i < nx; ++i) col[i] *= Complex(0.0, k[i]);
      plan.inverse(col);
      for (std::size_t i = 0; i < nx; ++i) out[i * ny + j] = col[i];
    }
  }
  return out;
}

}  // namespace detail

// Guidance velocity (hbar/m) Im(grad psi / psi) for a frozen wavefunction.
// psi and grad psi are interpolated separately before forming the quotient
// (interpolating the quotient itself amplifies node noise).
class StaticVelocityField {
 public:
  StaticVelocityField(const WaveFunction& wf, double mass)
      : grid_(wf.grid()),
        psi_(wf.values().begin(), wf.values().end()),
        mass_(mass),
        node_floor_(kNodeThresholdFraction * wf.max_abs()) {
    for (int a = 0; a < grid_.dimension(); ++a)
      grad_[static_cast<std::size_t>(a)] =
          detail::spectral_axis_gradient(grid_, wf.values(), a);
  }

  std::optional<Velocity> velocity_at(const Position& p) const {
    const Complex psi = interpolate<Complex>(grid_, psi_, p);
    if (std::abs(psi) < node_floor_) return std::nullopt;
    Velocity v{0.0, 0.0};
    for (int a = 0; a < grid_.dimension(); ++a) {
      const auto ia = static_cast<std::size_t>(a);
      const Complex g = interpolate<Complex>(grid_, grad_[ia], p);
      v[ia] = std::imag(g / psi) / mass_;
    }
    return v;
  }

  double node_floor() const { return node_floor_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  std::vector<Complex> psi_;
  std::array<std::vector<Complex>, 2> grad_;
  double mass_;
  double node_floor_;
};

// One-shot guidance velocity; throws NearNode instead of returning nothing.
inline Velocity velocity(const WaveFunction& wf, const Position& p, double mass = 1.0) {
  StaticVelocityField field(wf, mass);
  const auto v = field.velocity_at(p);
  if (!v) throw NearNode("velocity: |psi| below node threshold at evaluation point");
  return *v;
}

// The evolving pilot wave: wavefunction snapshots at uniform times plus the
// particle mass. Amplitudes (and their spectral gradients) are interpolated
// linearly between snapshots, second-order consistent with the Strang-split
// evolution error.
class GuidanceField {
 public:
  GuidanceField(std::vector<WaveFunction> snapshots, double snapshot_dt, double mass = 1.0,
                double t_start = 0.0)
      : dt_(snapshot_dt), mass_(mass), t_start_(t_start) {
    if (snapshots.empty()) throw std::invalid_argument("GuidanceField: no snapshots");
    if (!(snapshot_dt > 0.0)) throw std::invalid_argument("GuidanceField: snapshot dt must be > 0");
    grid_ = snapshots.front().grid();
    for (const auto& s : snapshots) {
      require_same_grid(grid_, s.grid(), "GuidanceField: snapshots on different grids");
      if (std::abs(s.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("GuidanceField: snapshots must be normalized");
      psi_.emplace_back(s.values().begin(), s.values().end());
      for (int a = 0; a < grid_.dimension(); ++a)
        grad_[static_cast<std::size_t>(a)].push_back(
            detail::spectral_axis_gradient(grid_, s.values(), a));
      node_floor_.push_back(kNodeThresholdFraction * s.max_abs());
    }
    snapshots_ = std::move(snapshots);
  }

  const Grid& grid() const { return grid_; }
  double mass() const { return mass_; }
  double snapshot_dt() const { return dt_; }
  double t_start() const { return t_start_; }
  double t_end() const {
    return t_start_ + dt_ * static_cast<double>(snapshot_count() - 1);
  }
  std::size_t snapshot_count() const { return psi_.size(); }
  const WaveFunction& snapshot(std::size_t k) const { return snapshots_[k]; }

  std::optional<Velocity> velocity_at(const Position& p, double t) const {
    std::size_t k0, k1;
    double a;
    bracket(t, k0, k1, a);
    const Complex psi = blend(psi_[k0], psi_[k1], a, p);
    const double floor = std::max(node_floor_[k0], node_floor_[k1]);
    if (std::abs(psi) < floor) return std::nullopt;
    Velocity v{0.0, 0.0};
    for (int ax = 0; ax < grid_.dimension(); ++ax) {
      const auto ia = static_cast<std::size_t>(ax);
      const Complex g = blend(grad_[ia][k0], grad_[ia][k1], a, p);
      v[ia] = std::imag(g / psi) / mass_;
    }
    return v;
  }

 private:
  void bracket(double t, std::size_t& k0, std::size_t& k1, double& a) const {
    if (snapshot_count() == 1) {
      k0 = k1 = 0;
      a = 0.0;
      return;
    }
    const double last = static_cast<double>(snapshot_count() - 1);
    const double s = std::clamp((t - t_start_) / dt_, 0.0, last);
    k0 = static_cast<std::size_t>(std::min(std::floor(s), last - 1.0));
    k1 = k0 + 1;
    a = s - static_cast<double>(k0);
  }

  Complex blend(const std::vector<Complex>& f0, const std::vector<Complex>& f1, double a,
                const Position& p) const {
    const Complex v0 = interpolate<Complex>(grid_, f0, p);
    if (a == 0.0) return v0;
    const Complex v1 = interpolate<Complex>(grid_, f1, p);
    return v0 * (1.0 - a) + v1 * a;
  }

  Grid grid_;
  double dt_;
  double mass_;
  double t_start_;
  std::vector<WaveFunction> snapshots_;
  std::vector<std::vector<Complex>> psi_;
  std::array<std::vector<std::vector<Complex>>, 2> grad_;
  std::vector<double> node_floor_;
};

struct TrajectoryEnsemble {
  std::vector<double> times;
  std::vector<std::vector<Position>> positions;  // [trajectory][time index]
  std::vector<std::uint8_t> flagged;             // node encounters, kept not dropped
  std::uint64_t seed = 0;
  double dt = 0.0;

  std::size_t count() const { return positions.size(); }
  std::size_t flagged_count() const {
    std::size_t n = 0;
    for (auto f : flagged) n += f;
    return n;
  }
};

namespace detail {

// Classical RK4 on the guidance field. Any stage landing within the node
// threshold fails the step; the driver halves the step up to 20 times and
// flags the trajectory if that is not enough.
template <typename VelocityFn>
inline std::optional<Position> rk4_step(const VelocityFn& vel, const Position& x, double t,
                                        double h) {
  auto shift = [](const Position& p, const Velocity& v, double s) {
    return Position{p[0] + s * v[0], p[1] + s * v[1]};
  };
  const auto k1 = vel(x, t);
  if (!k1) return std::nullopt;
  const auto k2 = vel(shift(x, *k1, h / 2.0), t + h / 2.0);
  if (!k2) return std::nullopt;
  const auto k3 = vel(shift(x, *k2, h / 2.0), t + h / 2.0);
  if (!k3) return std::nullopt;
  const auto k4 = vel(shift(x, *k3, h), t + h);
  if (!k4) return std::nullopt;
  return Position{x[0] + h / 6.0 * ((*k1)[0] + 2.0 * (*k2)[0] + 2.0 * (*k3)[0] + (*k4)[0]),
                  x[1] + h / 6.0 * ((*k1)[1] + 2.0 * (*k2)[1] + 2.0 * (*k3)[1] + (*k4)[1])};
}

template <typename VelocityFn>
inline std::optional<Position> advance(const VelocityFn& vel, const Position& x, double t,
                                       double h, int depth) {
  if (auto next = rk4_step(vel, x, t, h)) return next;
  if (depth >= 20) return std::nullopt;
  const auto mid = advance(vel, x, t, h / 2.0, depth + 1);
  if (!mid) return std::nullopt;
  return advance(vel, *mid, t + h / 2.0, h / 2.0, depth + 1);
}

template <typename VelocityFn>
inline TrajectoryEnsemble integrate(const VelocityFn& vel, const std::vector<Position>& initial,
                                    double t_start, double t_end, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  const auto steps = static_cast<std::size_t>(std::llround((t_end - t_start) / dt));
  TrajectoryEnsemble out;
  out.dt = dt;
  out.times.resize(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j)
    out.times[j] = t_start + dt * static_cast<double>(j);
  out.positions.assign(initial.size(), {});
  out.flagged.assign(initial.size(), 0);

  for (std::size_t i = 0; i < initial.size(); ++i) {
    auto& track = out.positions[i];
    track.reserve(steps + 1);
    track.push_back(initial[i]);
    Position x = initial[i];
    bool dead = false;
    for (std::size_t j = 0; j < steps; ++j) {
      if (!dead) {
        if (auto next = advance(vel, x, out.times[j], dt, 0)) {
          x = *next;
        } else {
          out.flagged[i] = 1;  // NodeEncounter: freeze, keep for the record
          dead = true;
        }
      }
      track.push_back(x);
    }
  }
  return out;
}

}  // namespace detail

struct IntegrationOptions {
  double velocity_scale = 1.0;  // != 1 deliberately corrupts the flow (negative controls)
  double t_end = std::numeric_limits<double>::quiet_NaN();  // NaN: full field span
};

// Transport an ensemble of configuration points along the guidance flow.
// dt must match or subdivide the snapshot spacing. Deterministic given the
// initial points.
inline TrajectoryEnsemble integrate_ensemble(const GuidanceField& field,
                                             const std::vector<Position>& initial, double dt,
                                             const IntegrationOptions& opt = {}) {
  const double ratio = field.snapshot_dt() / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0 - 1e-9)
    throw std::invalid_argument("integrate_ensemble: dt must match or subdivide snapshot spacing");
  for (const Position& p : initial)
    if (!field.grid().contains(p))
      throw std::invalid_argument("integrate_ensemble: initial position outside grid");
  const double t_end = std::isnan(opt.t_end) ? field.t_end() : opt.t_end;
  const double scale = opt.velocity_scale;
  auto vel = [&field, scale](const Position& p, double t) -> std::optional<Velocity> {
    auto v = field.velocity_at(p, t);
    if (v && scale != 1.0) {
      (*v)[0] *= scale;
      (*v)[1] *= scale;
    }
    return v;
  };
  return detail::integrate(vel, initial, field.t_start(), t_end, dt);
}

struct EquivarianceResult {
  double ks_statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::size_t flagged = 0;
  std::size_t used = 0;
};

// The quantum-equilibrium check: sample |psi_0|^2, transport along the flow,
// compare against |psi_t|^2. Equivariance makes this pass for the true flow;
// a corrupted flow (velocity_scale != 1) must fail it.
inline EquivarianceResult equivariance_check(const GuidanceField& field, std::size_t n,
                                             std::uint64_t seed, double t_check,
                                             double velocity_scale = 1.0,
                                             TrajectoryEnsemble* out_ensemble = nullptr) {
  const double idx = (t_check - field.t_start()) / field.snapshot_dt();
  const auto snap_idx = static_cast<std::size_t>(std::llround(idx));
  if (snap_idx >= field.snapshot_count() || std::abs(idx - std::round(idx)) > 1e-9)
    throw std::invalid_argument("equivariance_check: t_check must land on a snapshot");

  const auto initial = sample_positions(density(field.snapshot(0)), n, seed);
  IntegrationOptions opt;
  opt.velocity_scale = velocity_scale;
  opt.t_end = t_check;
  auto ensemble = integrate_ensemble(field, initial, field.snapshot_dt(), opt);
  ensemble.seed = seed;

  EquivarianceResult res;
  res.flagged = ensemble.flagged_count();
  if (static_cast<double>(res.flagged) > 0.01 * static_cast<double>(n))
    throw InsufficientEnsemble("equivariance_check: more than 1% of trajectories flagged");

  const Density target = density(field.snapshot(snap_idx));
  const std::size_t last = ensemble.times.size() - 1;
  double ks = 0.0;
  for (int axis = 0; axis < field.grid().dimension(); ++axis) {
    std::vector<double> coords;
    coords.reserve(n);
    for (std::size_t i = 0; i < ensemble.count(); ++i)
      if (!ensemble.flagged[i])
        coords.push_back(ensemble.positions[i][last][static_cast<std::size_t>(axis)]);
    ks = std::max(ks, ks_statistic(std::move(coords), GridCdf(target, axis)));
  }
  res.used = n - res.flagged;
  res.ks_statistic = ks;
  res.threshold = ks_threshold(res.used);
  res.pass = ks < res.threshold;
  if (out_ensemble) *out_ensemble = std::move(ensemble);
  return res;
}

struct NonlocalityProbeResult {
  double v1_given_a = 0.0;
  double v1_given_b = 0.0;
  double delta = 0.0;
};

// Particle-1 guidance velocity with particle 2 held at two alternative
// positions. For an entangled state the velocity of particle 1 depends on
// where particle 2 sits, however far apart; for a product state the quotient
// factorizes and the dependence vanishes.
inline NonlocalityProbeResult two_particle_nonlocality_probe(const WaveFunction& psi,
                                                             double x1, double x2a, double x2b,
                                                             double mass = 1.0) {
  if (psi.grid().dimension() != 2)
    throw std::invalid_argument("two_particle_nonlocality_probe: need a 2D configuration grid");
  StaticVelocityField field(psi, mass);
  auto component = [&](double x2) {
    const auto v = field.velocity_at({x1, x2});
    if (!v) throw NearNode("two_particle_nonlocality_probe: probe point too close to a node");
    return (*v)[0];
  };
  NonlocalityProbeResult res;
  res.v1_given_a = component(x2a);
  res.v1_given_b = component(x2b);
  res.delta = std::abs(res.v1_given_a - res.v1_given_b);
  return res;
}

struct DoubleSlitTrajectoryResult {
  TrajectoryEnsemble ensemble;
  std::vector<int> slit_attribution;  // 1 = upper gap (x > 0), 2 = lower
  std::size_t crossings = 0;
};

// Trajectories through a both-slits field: each particle goes through the
// gap that contains its starting point, and none may cross the symmetry
// axis (the velocity there is axis-tangent by symmetry).
inline DoubleSlitTrajectoryResult double_slit_trajectories(const GuidanceField& field,
                                                           std::size_t n, std::uint64_t seed) {
  const auto initial = sample_positions(density(field.snapshot(0)), n, seed);
  auto ensemble = integrate_ensemble(field, initial, field.snapshot_dt());
  ensemble.seed = seed;

  DoubleSlitTrajectoryResult res;
  res.slit_attribution.reserve(n);
  for (const Position& p : initial) res.slit_attribution.push_back(p[0] > 0.0 ? 1 : 2);
  for (std::size_t i = 0; i < ensemble.count(); ++i) {
    const bool started_upper = initial[i][0] > 0.0;
    for (const Position& p : ensemble.positions[i]) {
      if ((p[0] > 0.0) != started_upper) {
        ++res.crossings;
        break;
      }
    }
  }
  res.ensemble = std::move(ensemble);
  return res;
}

struct PointerTrajectoryResult {
  TrajectoryEnsemble ensemble;
  double up_fraction = 0.0;  // fraction ending in the +displacement branch
};

// Bohmian transport of the pointer coordinate through a measurement. The
// configuration-level velocity for a two-branch state whose branches
// translate at +-coupling is the density-weighted drift
//   v(y, t) = coupling * (rho_up - rho_down) / (rho_up + rho_down),
// the probability current of the branching dynamics divided by the total
// density. Equivariance then lands a |Psi_0|^2 ensemble in the two branch
// supports with exactly the Born weights.
inline PointerTrajectoryResult pointer_trajectories(const PointerRun& run, std::size_t n,
                                                    std::uint64_t seed) {
  if (run.snapshot_count() < 2)
    throw std::invalid_argument("pointer_trajectories: need at least two snapshots");
  const Grid& g = run.grid;

  std::vector<double> rho0(g.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    rho0[k] = run.up_density[0][k] + run.down_density[0][k];
  const auto initial = sample_positions(Density(g, std::move(rho0)), n, seed);

  auto drift = [&](const Position& p, double t) -> std::optional<Velocity> {
    const double s = std::clamp(t / run.dt, 0.0, static_cast<double>(run.snapshot_count() - 1));
    const auto k0 = static_cast<std::size_t>(
        std::min(std::floor(s), static_cast<double>(run.snapshot_count() - 2)));
    const double a = s - static_cast<double>(k0);
    auto at = [&](const std::vector<std::vector<double>>& d) {
      return (1.0 - a) * interpolate<double>(g, d[k0], p) +
             a * interpolate<double>(g, d[k0 + 1], p);
    };
    const double up = std::max(at(run.up_density), 0.0);
    const double down = std::max(at(run.down_density), 0.0);
    const double total = up + down;
    if (total < 1e-280) return Velocity{0.0, 0.0};  // dead zone between branches
    return Velocity{run.coupling * (up - down) / total, 0.0};
  };

  PointerTrajectoryResult res;
  res.ensemble = detail::integrate(drift, initial, 0.0, run.time_span(), run.dt);
  res.ensemble.seed = seed;
  const std::size_t last = res.ensemble.times.size() - 1;
  std::size_t up_count = 0;
  for (std::size_t i = 0; i < res.ensemble.count(); ++i)
    if (res.ensemble.positions[i][last][0] > 0.0) ++up_count;
  res.up_fraction = static_cast<double>(up_count) / static_cast<double>(n);
  return res;
}

}  // namespace pilotwave
