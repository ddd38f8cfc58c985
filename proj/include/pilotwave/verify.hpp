#pragma once

// The acceptance suite behind `pilotwave verify`: every analytic identity
// and statistical property the laboratory promises, at desk scale, with the
// tolerances pinned here. All randomness flows from the one seed argument.

#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pilotwave/bell.hpp"
#include "pilotwave/double_slit.hpp"
#include "pilotwave/guidance.hpp"
#include "pilotwave/pointer.hpp"
#include "pilotwave/spin.hpp"

namespace pilotwave {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

namespace verify_detail {

inline double normal_cdf(double x, double mean, double sigma) {
  return 0.5 * (1.0 + std::erf((x - mean) / (sigma * std::numbers::sqrt2)));
}

inline double spread_sigma(double t, double sigma0, double mass = 1.0) {
  return std::sqrt(sigma0 * sigma0 + t * t / (4.0 * sigma0 * sigma0 * mass * mass));
}

template <typename Fn>
inline CriterionResult timed(int id, std::string name, Fn&& fn) {
  CriterionResult res;
  res.id = id;
  res.name = std::move(name);
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream details;
  res.pass = fn(details);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  res.details = details.str();
  return res;
}

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace verify_detail

// 1. No-signaling identity: weighted post-measurement marginal equals
// |b|^2 + |d|^2 over 1000 random states x 24 angles, to 1e-12, under 1 s.
inline CriterionResult verify_no_signaling(std::uint64_t seed) {
  using namespace verify_detail;
  return timed(1, "no-signaling identity", [&](std::ostringstream& out) {
    SplitMix64 rng(SplitMix64::derive_stream(seed, 1));
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const TwoQubitState state = TwoQubitState::random(rng);
      for (int a = 0; a < 24; ++a) {
        const MeasurementAxis axis{2.0 * std::numbers::pi * a / 24.0};
        worst = std::max(worst, no_signaling_audit(state, axis).discrepancy);
      }
    }
    out << "max discrepancy " << sci(worst) << " over 1000 states x 24 angles (limit 1e-12)";
    return worst < 1e-12;
  });
}

// 2. Bell bound: enumeration gives min sum exactly 1; 1e4 random mixtures
// never fall below 1 - 1e-12. Under 1 s.
inline CriterionResult verify_bell_bound(std::uint64_t seed) {
  using namespace verify_detail;
  return timed(2, "Bell bound from LHV enumeration", [&](std::ostringstream& out) {
    const BellBoundCertificate cert = bell_bound_certificate();
    bool ok = cert.min_sum == 1.0;
    for (double s : cert.sums) ok = ok && (s == 1.0 || s == 3.0);

    SplitMix64 rng(SplitMix64::derive_stream(seed, 2));
    double min_mixture = 3.0;
    for (int trial = 0; trial < 10000; ++trial) {
      std::array<double, 8> w{};
      double sum = 0.0;
      for (double& x : w) {
        x = -std::log(1.0 - rng.next_unit());
        sum += x;
      }
      for (double& x : w) x /= sum;
      double s2 = 0.0;
      for (double x : w) s2 += x;
      w[7] += 1.0 - s2;
      min_mixture = std::min(min_mixture, bell_sum_lhv(LhvMixture::make(w)));
    }
    ok = ok && (min_mixture >= 1.0 - 1e-12);
    out << "enumeration min " << cert.min_sum << ", witness (" << cert.witness.x_a << ","
        << cert.witness.x_b << "," << cert.witness.x_c << "), min over 1e4 mixtures "
        << min_mixture;
    return ok;
  });
}

// 3. Bell violation at the 120-degree triple: analytic sum 0.75 to 1e-12;
// Monte Carlo (1e5 per pair) within 3 sigma and verdict VIOLATION. < 30 s.
inline CriterionResult verify_bell_violation(std::uint64_t seed) {
  using namespace verify_detail;
  return timed(3, "Bell violation at the 120-degree triple", [&](std::ostringstream& out) {
    const AngleTriple triple = AngleTriple::degrees(0.0, 120.0, 240.0);
    const NonlocalityReport rep =
        nonlocality_demonstration(triple, 100000, SplitMix64::derive_stream(seed, 3));
    const bool analytic_ok = std::abs(rep.quantum_sum_analytic - 0.75) < 1e-12;
    const bool mc_ok = std::abs(rep.quantum_sum_mc - rep.quantum_sum_analytic) <
                       3.0 * rep.mc_sigma;
    out << "analytic " << rep.quantum_sum_analytic << ", MC " << rep.quantum_sum_mc << " +- "
        << sci(rep.mc_sigma) << ", verdict "
        << (rep.violation ? "VIOLATION" : "NO-VIOLATION");
    return analytic_ok && mc_ok && rep.violation;
  });
}

// 4. Born weights from unitary measurement: branch masses 0.3/0.7 to 1e-8,
// and |Psi_0|^2-sampled pointer trajectories land in branch 1 with
// frequency 0.3 within 3 sigma at n = 1e4. < 2 min.
inline CriterionResult verify_born_weights(std::uint64_t seed) {
  using namespace verify_detail;
  return timed(4, "Born weights from the pointer measurement", [&](std::ostringstream& out) {
    const Grid g = Grid::line(-30.0, 30.0, 1024);
    const WaveFunction ready = gaussian_packet_1d(g, 0.0, 1.0);
    const Complex c1 = std::sqrt(0.3), c2 = std::sqrt(0.7);

    const SpinorField sf = pointer_measure(c1, c2, ready, 1.0, 5.0);
    const double mass_up = sf.up.norm_squared();
    const double mass_down = sf.down.norm_squared();
    const bool masses_ok =
        std::abs(mass_up - 0.3) < 1e-8 && std::abs(mass_down - 0.7) < 1e-8;

    const std::size_t n = 10000;
    const PointerRun run = pointer_measure_recording(c1, c2, ready, 1.0, 5.0, 500);
    const auto traj = pointer_trajectories(run, n, SplitMix64::derive_stream(seed, 4));
    const double sigma3 = 3.0 * std::sqrt(0.3 * 0.7 / static_cast<double>(n));
    const bool fraction_ok = std::abs(traj.up_fraction - 0.3) < sigma3;

    out << "branch masses " << mass_up << "/" << mass_down << ", trajectory fraction "
        << traj.up_fraction << " (target 0.3 +- " << sci(sigma3) << ")";
    return masses_ok && fraction_ok;
  });
}

// 5. Equivariance: a |psi_0|^2 ensemble transported by the guidance flow
// matches the analytic |psi_t|^2 by KS at 1.95/sqrt(n); the deliberately
// corrupted flow (velocity x2) fails the same test. < 2 min.
inline CriterionResult verify_equivariance(std::uint64_t seed) {
  using namespace verify_detail;
  return timed(5, "equivariance of the guidance flow", [&](std::ostringstream& out) {
    const Grid g = Grid::line(-40.0, 40.0, 1024);
    const double sigma0 = 1.0, t_check = 2.0;
    EvolutionSpec spec;
    spec.dt = 0.002;
    spec.steps = 1000;
    const auto snaps = evolve_recording(gaussian_packet_1d(g, 0.0, sigma0), spec, 4);
    const GuidanceField field(snaps, 4.0 * spec.dt);

    const std::size_t n = 10000;
    const std::uint64_t sample_seed = SplitMix64::derive_stream(seed, 5);
    const double sigma_t = spread_sigma(t_check, sigma0);
    auto transported_ks = [&](double scale) {
      const auto initial = sample_positions(density(field.snapshot(0)), n, sample_seed);
      IntegrationOptions opt;
      opt.velocity_scale = scale;
      opt.t_end = t_check;
      const auto ens = integrate_ensemble(field, initial, field.snapshot_dt(), opt);
      std::vector<double> xs;
      xs.reserve(n);
      const std::size_t last = ens.times.size() - 1;
      for (std::size_t i = 0; i < ens.count(); ++i)
        if (!ens.flagged[i]) xs.push_back(ens.positions[i][last][0]);
      // Analytic |psi_t|^2 is the spread normal law.
      return ks_statistic(std::move(xs),
                          [&](double x) { return normal_cdf(x, 0.0, sigma_t); });
    };

    const double ks_good = transported_ks(1.0);
    const double ks_bad = transported_ks(2.0);
    const double threshold = ks_threshold(n);
    out << "KS " << sci(ks_good) << " (threshold " << sci(threshold)
        << "), corrupted-flow KS " << sci(ks_bad);
    return ks_good < threshold && ks_bad >= threshold;
  });
}

// 6. Double slit: the pointwise interference identity to 1e-12; the (C)
// density differs from |psi1|^2 + |psi2|^2 with a cross-term peak above 5%
// of the density peak; trajectory endpoints match the (C) screen density by
// KS; no trajectory crosses the symmetry axis (n = 1e4).
inline CriterionResult verify_double_slit(std::uint64_t seed) {
  using namespace verify_detail;
  return timed(6, "double-slit interference and trajectories", [&](std::ostringstream& out) {
    const Grid g = Grid::line(-30.0, 30.0, 1024);
    SlitConfig cfg;
    cfg.open = SlitOpen::both;
    EvolutionSpec spec;
    spec.dt = 0.002;
    spec.steps = 1000;

    SlitConfig cfg1 = cfg;
    cfg1.open = SlitOpen::slit1;
    SlitConfig cfg2 = cfg;
    cfg2.open = SlitOpen::slit2;
    const WaveFunction psi1 = prepare_double_slit(g, cfg1, spec);
    const WaveFunction psi2 = prepare_double_slit(g, cfg2, spec);
    const InterferenceDecomposition dec = interference_decomposition(psi1, psi2);

    double identity_err = 0.0, cross_peak = 0.0, sum_peak = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double lhs = std::norm(psi1.value(k) + psi2.value(k));
      const double rhs = std::norm(psi1.value(k)) + std::norm(psi2.value(k)) + dec.cross_term[k];
      identity_err = std::max(identity_err, std::abs(lhs - rhs));
      cross_peak = std::max(cross_peak, std::abs(dec.cross_term[k]));
      sum_peak = std::max(sum_peak, lhs);
    }
    const bool identity_ok = identity_err < 1e-12;
    const bool cross_ok = cross_peak > 0.05 * sum_peak;

    const auto snaps = prepare_double_slit_recording(g, cfg, spec, 4);
    const GuidanceField field(snaps, 4.0 * spec.dt);
    const std::size_t n = 10000;
    const auto traj = double_slit_trajectories(field, n, SplitMix64::derive_stream(seed, 6));

    std::vector<double> finals;
    finals.reserve(n);
    const std::size_t last = traj.ensemble.times.size() - 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!traj.ensemble.flagged[i]) finals.push_back(traj.ensemble.positions[i][last][0]);
    const double ks =
        ks_statistic(std::move(finals), GridCdf(density(field.snapshot(field.snapshot_count() - 1))));
    const bool ks_ok = ks < ks_threshold(n);
    const bool crossing_ok = traj.crossings == 0;

    out << "identity residual " << sci(identity_err) << ", cross/sum peak ratio "
        << cross_peak / sum_peak << ", endpoint KS " << sci(ks) << ", crossings "
        << traj.crossings;
    return identity_ok && cross_ok && ks_ok && crossing_ok;
  });
}

// 7. Two-particle nonlocal dependence: product states give particle-1
// velocity deltas < 1e-9 under particle-2 displacement; the scripted
// entangled state g(x-y) + g(x+y), g(u) = exp(2iu - u^2/4), gives
// delta > 0.01 at the designated probe points (x1 = 0.5; x2 = 0 vs 1).
inline CriterionResult verify_two_particle_dependence(std::uint64_t) {
  using namespace verify_detail;
  return timed(7, "two-particle nonlocal velocity dependence", [&](std::ostringstream& out) {
    const Grid g = Grid::plane(-8.0, 8.0, 256, -8.0, 8.0, 256);

    const WaveFunction product = gaussian_packet(g, {0.0, 0.0}, {1.2, 0.9}, {0.8, -1.1});
    double product_delta = 0.0;
    for (double x1 : {-1.0, 0.0, 0.5, 1.5})
      for (double y2 : {-1.5, 0.75})
        product_delta =
            std::max(product_delta, two_particle_nonlocality_probe(product, x1, 0.0, y2).delta);

    auto packet = [](double u) { return std::exp(Complex{-u * u / 4.0, 2.0 * u}); };
    const WaveFunction entangled = normalize(WaveFunction::from_function(
        g, [&](const Position& p) { return packet(p[0] - p[1]) + packet(p[0] + p[1]); }));
    const auto probe = two_particle_nonlocality_probe(entangled, 0.5, 0.0, 1.0);

    out << "product max delta " << sci(product_delta) << " (< 1e-9), entangled delta "
        << probe.delta << " (> 0.01)";
    return product_delta < 1e-9 && probe.delta > 0.01;
  });
}

// 8. Numerical hygiene: norm conservation to 1e-8 over 1e4 split steps;
// stationary-state density drift < 1e-6 per period; RK4 step-halving cuts
// the endpoint error at least 8x; reruns under a fixed seed are
// bit-identical.
inline CriterionResult verify_numerical_hygiene(std::uint64_t seed) {
  using namespace verify_detail;
  return timed(8, "numerical hygiene", [&](std::ostringstream& out) {
    const Grid g = Grid::line(-16.0, 16.0, 512);

    // Norm over 1e4 steps in a trap.
    const WaveFunction coherent = normalize(WaveFunction::from_function(g, [](const Position& p) {
      const double d = p[0] - 1.0;
      return Complex{std::exp(-d * d / 2.0), 0.0};
    }));
    EvolutionSpec spec;
    spec.dt = 1e-4;
    spec.steps = 10000;
    spec.potential = Potential::harmonic(g, 1.0);
    EvolveDiagnostics diag;
    evolve(coherent, spec, &diag);
    const double norm_drift = std::abs(diag.final_norm - 1.0);
    const bool norm_ok = norm_drift < 1e-8;

    // Stationary state over one period.
    const WaveFunction ground = normalize(WaveFunction::from_function(g, [](const Position& p) {
      return Complex{std::exp(-p[0] * p[0] / 2.0), 0.0};
    }));
    EvolutionSpec period_spec;
    period_spec.steps = 25000;
    period_spec.dt = 2.0 * std::numbers::pi / static_cast<double>(period_spec.steps);
    period_spec.potential = Potential::harmonic(g, 1.0);
    const WaveFunction after = evolve(ground, period_spec);
    const Density d0 = density(ground), dT = density(after);
    double density_drift = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
      density_drift = std::max(density_drift, std::abs(dT.weight(k) - d0.weight(k)));
    const bool stationary_ok = density_drift < 1e-6;

    // RK4 halving on a smooth velocity field, against a dt/8 reference.
    auto vel = [](const Position& p, double t) -> std::optional<Velocity> {
      return Velocity{std::sin(p[0]) * (1.0 + 0.5 * std::sin(2.0 * t)), 0.0};
    };
    auto endpoint = [&](double dt) {
      return detail::integrate(vel, {{1.0, 0.0}}, 0.0, 2.0, dt).positions[0].back()[0];
    };
    const double ref = endpoint(0.025);
    const double ratio = std::abs(endpoint(0.2) - ref) / std::abs(endpoint(0.1) - ref);
    const bool rk4_ok = ratio >= 8.0;

    // Bit-identical reruns.
    const Density rho = density(gaussian_packet_1d(g, 0.0, 1.0));
    const std::uint64_t s = SplitMix64::derive_stream(seed, 8);
    const auto run_a = sample_positions(rho, 2000, s);
    const auto run_b = sample_positions(rho, 2000, s);
    bool bits_ok = run_a.size() == run_b.size() &&
                   std::memcmp(run_a.data(), run_b.data(), run_a.size() * sizeof(Position)) == 0;
    const auto rep_a = nonlocality_demonstration(AngleTriple::degrees(0, 120, 240), 20000, s);
    const auto rep_b = nonlocality_demonstration(AngleTriple::degrees(0, 120, 240), 20000, s);
    for (int p = 0; p < 3; ++p)
      bits_ok = bits_ok && rep_a.pairs[static_cast<std::size_t>(p)].counts ==
                               rep_b.pairs[static_cast<std::size_t>(p)].counts;

    out << "norm drift " << sci(norm_drift) << ", stationary drift " << sci(density_drift)
        << ", RK4 halving ratio " << ratio << ", bit-identical reruns "
        << (bits_ok ? "yes" : "no");
    return norm_ok && stationary_ok && rk4_ok && bits_ok;
  });
}

inline std::vector<CriterionResult> run_acceptance(std::uint64_t seed) {
  return {verify_no_signaling(seed),   verify_bell_bound(seed),
          verify_bell_violation(seed), verify_born_weights(seed),
          verify_equivariance(seed),   verify_double_slit(seed),
          verify_two_particle_dependence(seed), verify_numerical_hygiene(seed)};
}

// Runtime budgets, seconds, indexed by criterion id (0 = no budget).
inline double runtime_budget(int id) {
  switch (id) {
    case 1:
    case 2:
      return 1.0;
    case 3:
      return 30.0;
    case 4:
    case 5:
      return 120.0;
    default:
      return 0.0;
  }
}

inline bool passed_within_budget(const CriterionResult& r) {
  const double budget = runtime_budget(r.id);
  return r.pass && (budget == 0.0 || r.seconds < budget);
}

}  // namespace pilotwave
