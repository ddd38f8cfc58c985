#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

#include "pilotwave/rng.hpp"
#include "pilotwave/spin.hpp"

namespace pilotwave {

// Pre-existing spin values of the left particle for directions a, b, c.
// The right particle's values are fixed by perfect anticorrelation,
// X_y(R) = -X_y(L), and stored implicitly.
struct LhvAssignment {
  int x_a = +1;
  int x_b = +1;
  int x_c = +1;
};

inline std::array<LhvAssignment, 8> all_lhv_assignments() {
  std::array<LhvAssignment, 8> out{};
  for (int k = 0; k < 8; ++k)
    out[static_cast<std::size_t>(k)] = {(k & 4) ? +1 : -1, (k & 2) ? +1 : -1,
                                        (k & 1) ? +1 : -1};
  return out;
}

// A general local-hidden-variable model for this experiment: a probability
// mixture over the 8 deterministic value tables (the extreme points).
struct LhvMixture {
  std::array<double, 8> weights{};

  static LhvMixture make(const std::array<double, 8>& w) {
    double sum = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) throw std::invalid_argument("LhvMixture: weights must be >= 0");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("LhvMixture: weights must sum to 1");
    return LhvMixture{w};
  }

  static LhvMixture point_mass(const LhvAssignment& a) {
    std::array<double, 8> w{};
    const std::size_t k = static_cast<std::size_t>((a.x_a > 0 ? 4 : 0) + (a.x_b > 0 ? 2 : 0) +
                                                   (a.x_c > 0 ? 1 : 0));
    w[k] = 1.0;
    return LhvMixture{w};
  }
};

// Sum of the three anticorrelation-event probabilities
//   P(X_a(L) = -X_b(R)) + P(X_b(L) = -X_c(R)) + P(X_c(L) = -X_a(R)).
// With the anticorrelation constraint built in, the event X_y(L) = -X_z(R)
// holds iff X_y(L) = X_z(L), so for one assignment each term is a 0/1
// agreement indicator.
inline double bell_sum_lhv(const LhvAssignment& a) {
  return static_cast<double>((a.x_a == a.x_b) + (a.x_b == a.x_c) + (a.x_c == a.x_a));
}

inline double bell_sum_lhv(const LhvMixture& mix) {
  const auto assignments = all_lhv_assignments();
  double s = 0.0;
  for (std::size_t k = 0; k < 8; ++k) s += mix.weights[k] * bell_sum_lhv(assignments[k]);
  return s;
}

struct BellBoundCertificate {
  double min_sum = 0.0;
  LhvAssignment witness;
  std::array<double, 8> sums{};  // per assignment, enumeration order
};

// Exhaustive enumeration of the 8 assignments. Every point sum is 1 or 3,
// the minimum is 1, and by linearity every mixture is bounded below by it:
// the Bell inequality for this experiment.
inline BellBoundCertificate bell_bound_certificate() {
  const auto assignments = all_lhv_assignments();
  BellBoundCertificate cert;
  cert.min_sum = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < 8; ++k) {
    cert.sums[k] = bell_sum_lhv(assignments[k]);
    if (cert.sums[k] < cert.min_sum) {
      cert.min_sum = cert.sums[k];
      cert.witness = assignments[k];
    }
  }
  return cert;
}

// Three detector directions in the plane, as spatial angles.
struct AngleTriple {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static AngleTriple degrees(double a, double b, double c) {
    const double f = std::numbers::pi / 180.0;
    return AngleTriple{a * f, b * f, c * f};
  }

  std::array<std::pair<double, double>, 3> pairs() const {
    return {{{a, b}, {b, c}, {c, a}}};
  }
};

// The quantum prediction for the same three anticorrelation probabilities on
// the singlet state, from the rotate/collapse machinery. Each term equals
// cos^2(theta_yz / 2) for detector directions theta_yz apart.
inline double bell_sum_quantum(const AngleTriple& angles) {
  const TwoQubitState singlet = TwoQubitState::singlet();
  double s = 0.0;
  for (const auto& [y, z] : angles.pairs())
    s += opposite_outcome_probability(singlet, MeasurementAxis::for_direction(y),
                                      MeasurementAxis::for_direction(z));
  return s;
}

struct PairExperiment {
  double left_angle = 0.0;   // spatial direction, radians
  double right_angle = 0.0;
  std::array<std::uint64_t, 4> counts{};   // cells ii, ij, ji, jj
  std::array<double, 4> expected{};        // analytic cell probabilities * n
  double opposite_fraction = 0.0;
};

struct NonlocalityReport {
  double lhv_bound = 0.0;
  LhvAssignment witness;
  double quantum_sum_analytic = 0.0;
  double quantum_sum_mc = 0.0;
  double mc_sigma = 0.0;
  bool violation = false;
  std::size_t samples_per_pair = 0;
  std::array<PairExperiment, 3> pairs{};
};

// The whole Appendix-in-code: the LHV bound with its enumeration
// certificate, the analytic quantum sum, and a Monte Carlo estimate from
// sequential measurements. Verdict is VIOLATION only when the upper 3-sigma
// end of the estimate still sits below the bound.
inline NonlocalityReport nonlocality_demonstration(const AngleTriple& angles, std::size_t n,
                                                   std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("nonlocality_demonstration: n must be >= 1");
  const TwoQubitState singlet = TwoQubitState::singlet();

  NonlocalityReport report;
  const BellBoundCertificate cert = bell_bound_certificate();
  report.lhv_bound = cert.min_sum;
  report.witness = cert.witness;
  report.quantum_sum_analytic = bell_sum_quantum(angles);
  report.samples_per_pair = n;

  const auto pairs = angles.pairs();
  double variance = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto [y, z] = pairs[k];
    const MeasurementAxis left = MeasurementAxis::for_direction(y);
    const MeasurementAxis right = MeasurementAxis::for_direction(z);

    PairExperiment& pe = report.pairs[k];
    pe.left_angle = y;
    pe.right_angle = z;
    pe.counts =
        sample_sequential_measurement(singlet, left, right, n, SplitMix64::derive_stream(seed, k));

    const BranchDecomposition d = rotate_left_basis(singlet, left);
    const double pi_i = d.i_weight > 1e-15 ? up_probability(collapse(d, Outcome::i), right) : 0.0;
    const double pi_j = d.j_weight > 1e-15 ? up_probability(collapse(d, Outcome::j), right) : 0.0;
    const auto dn = static_cast<double>(n);
    pe.expected = {d.i_weight * pi_i * dn, d.i_weight * (1.0 - pi_i) * dn,
                   d.j_weight * pi_j * dn, d.j_weight * (1.0 - pi_j) * dn};

    const double opposite =
        static_cast<double>(pe.counts[1] + pe.counts[2]) / dn;  // cells ij + ji
    pe.opposite_fraction = opposite;
    report.quantum_sum_mc += opposite;
    variance += opposite * (1.0 - opposite) / dn;
  }
  report.mc_sigma = std::sqrt(variance);
  report.violation = report.quantum_sum_mc + 3.0 * report.mc_sigma < report.lhv_bound;
  return report;
}

}  // namespace pilotwave
