#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "pilotwave/errors.hpp"
#include "pilotwave/rng.hpp"

namespace pilotwave {

using Complex = std::complex<double>;

// General entangled two-qubit state
//   a |up>_1 |down>_2 + b |down>_1 |up>_2 + c |down>_1 |down>_2 + d |up>_1 |up>_2
// with |a|^2 + |b|^2 + |c|^2 + |d|^2 = 1.
struct TwoQubitState {
  Complex a{0.0, 0.0};  // up_1 down_2
  Complex b{0.0, 0.0};  // down_1 up_2
  Complex c{0.0, 0.0};  // down_1 down_2
  Complex d{0.0, 0.0};  // up_1 up_2

  double norm_squared() const {
    return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
  }

  static TwoQubitState make(Complex a, Complex b, Complex c, Complex d) {
    TwoQubitState s{a, b, c, d};
    if (std::abs(s.norm_squared() - 1.0) > 1e-12)
      throw std::invalid_argument("TwoQubitState: amplitudes must be normalized");
    return s;
  }

  static TwoQubitState normalized(Complex a, Complex b, Complex c, Complex d) {
    const double n = std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
    if (n < 1e-300) throw ZeroNorm("TwoQubitState: zero amplitudes");
    return TwoQubitState{a / n, b / n, c / n, d / n};
  }

  // Total-spin-zero state: perfectly anticorrelated along every common axis.
  static TwoQubitState singlet() {
    const double r = 1.0 / std::sqrt(2.0);
    return TwoQubitState{Complex{r, 0.0}, Complex{-r, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  }

  // Haar-like random state: four complex normal amplitudes, normalized.
  static TwoQubitState random(SplitMix64& rng) {
    auto z = [&rng] { return Complex{rng.next_normal(), rng.next_normal()}; };
    return normalized(z(), z(), z(), z());
  }
};

// A Stern-Gerlach orientation. gamma is the basis-change angle between the
// chosen direction and z, entering the spinor rotation
//   |up>   = i cos(gamma) + j sin(gamma)
//   |down> = -i sin(gamma) + j cos(gamma)
// directly. Because spinors rotate at half the spatial rate, a detector
// direction at spatial angle theta from z corresponds to gamma = theta / 2;
// use for_direction() when starting from spatial directions.
struct MeasurementAxis {
  double gamma = 0.0;

  static MeasurementAxis from_spinor_angle(double g) {
    if (!std::isfinite(g)) throw std::invalid_argument("MeasurementAxis: angle must be finite");
    const double two_pi = 2.0 * std::numbers::pi;
    double c = std::fmod(g, two_pi);
    if (c < 0.0) c += two_pi;
    return MeasurementAxis{c};
  }

  static MeasurementAxis for_direction(double spatial_angle) {
    return from_spinor_angle(spatial_angle / 2.0);
  }
};

// An unnormalized state of the right qubit over {|up>_2, |down>_2}.
struct QubitAmplitudes {
  Complex up{0.0, 0.0};
  Complex down{0.0, 0.0};

  double norm_squared() const { return std::norm(up) + std::norm(down); }
};

// The state split along the left measurement basis: psi ~ psi_i + psi_j,
// branch weights summing to one.
struct BranchDecomposition {
  QubitAmplitudes i_branch;  // left outcome "spin up along the axis"
  QubitAmplitudes j_branch;  // left outcome "spin down along the axis"
  double i_weight = 0.0;
  double j_weight = 0.0;
};

// Rewrite the state in the measurement basis of the left qubit:
//   psi = i [cos g (a|down>_2 + d|up>_2) - sin g (b|up>_2 + c|down>_2)]
//       + j [sin g (a|down>_2 + d|up>_2) + cos g (b|up>_2 + c|down>_2)].
inline BranchDecomposition rotate_left_basis(const TwoQubitState& s, MeasurementAxis axis) {
  const double cg = std::cos(axis.gamma);
  const double sg = std::sin(axis.gamma);
  BranchDecomposition out;
  out.i_branch = {s.d * cg - s.b * sg, s.a * cg - s.c * sg};
  out.j_branch = {s.d * sg + s.b * cg, s.a * sg + s.c * cg};
  out.i_weight = out.i_branch.norm_squared();
  out.j_weight = out.j_branch.norm_squared();
  return out;
}

// The same rotation, reassembled as a TwoQubitState in the rotated basis
// (i plays up_1, j plays down_1).
inline TwoQubitState rotate_left_state(const TwoQubitState& s, MeasurementAxis axis) {
  const BranchDecomposition d = rotate_left_basis(s, axis);
  return TwoQubitState{d.i_branch.down, d.j_branch.up, d.j_branch.down, d.i_branch.up};
}

enum class Outcome { i, j };

// Collapse onto one branch: the surviving right-qubit state, normalized.
inline QubitAmplitudes collapse(const BranchDecomposition& d, Outcome outcome) {
  const QubitAmplitudes& branch = (outcome == Outcome::i) ? d.i_branch : d.j_branch;
  const double w = branch.norm_squared();
  if (w <= 1e-15) throw ImpossibleOutcome("collapse: branch weight is zero");
  const double s = 1.0 / std::sqrt(w);
  return QubitAmplitudes{branch.up * s, branch.down * s};
}

// P(up along `axis`) for a normalized single-qubit state.
inline double up_probability(const QubitAmplitudes& q, MeasurementAxis axis) {
  const double cg = std::cos(axis.gamma);
  const double sg = std::sin(axis.gamma);
  return std::norm(q.up * cg - q.down * sg);
}

// Probability of |up>_2 at the right magnet with nothing measured on the
// left: |b|^2 + |d|^2.
inline double marginal_up_right(const TwoQubitState& s) {
  return std::norm(s.b) + std::norm(s.d);
}

struct NoSignalingAudit {
  double post_measurement_marginal = 0.0;
  double unmeasured_marginal = 0.0;
  double discrepancy = 0.0;
};

// The no-signaling identity: measuring the left qubit along any axis and
// averaging the collapsed right-up probabilities over the branch weights
// reproduces |b|^2 + |d|^2 exactly. Degenerate branches contribute
// weight * 0.
inline NoSignalingAudit no_signaling_audit(const TwoQubitState& s, MeasurementAxis axis) {
  const BranchDecomposition d = rotate_left_basis(s, axis);
  auto weighted_up = [](const QubitAmplitudes& branch, double w) {
    if (w <= 1e-15) return 0.0;
    return w * (std::norm(branch.up) / w);
  };
  NoSignalingAudit audit;
  audit.post_measurement_marginal =
      weighted_up(d.i_branch, d.i_weight) + weighted_up(d.j_branch, d.j_weight);
  audit.unmeasured_marginal = marginal_up_right(s);
  audit.discrepancy = std::abs(audit.post_measurement_marginal - audit.unmeasured_marginal);
  return audit;
}

// Outcome counts of a sequential pair of Stern-Gerlach measurements, cells
// ordered {ii, ij, ji, jj} (left outcome first). Left outcome drawn from the
// branch weights, state collapsed, right outcome drawn in the right basis.
inline std::array<std::uint64_t, 4> sample_sequential_measurement(const TwoQubitState& s,
                                                                  MeasurementAxis left,
                                                                  MeasurementAxis right,
                                                                  std::size_t n,
                                                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_sequential_measurement: n must be >= 1");
  const BranchDecomposition d = rotate_left_basis(s, left);
  const double p_left_i = d.i_weight;
  const double p_right_i_given_i =
      d.i_weight > 1e-15 ? up_probability(collapse(d, Outcome::i), right) : 0.0;
  const double p_right_i_given_j =
      d.j_weight > 1e-15 ? up_probability(collapse(d, Outcome::j), right) : 0.0;

  SplitMix64 rng(seed);
  std::array<std::uint64_t, 4> cells{0, 0, 0, 0};
  for (std::size_t k = 0; k < n; ++k) {
    const bool left_i = rng.next_unit() < p_left_i;
    const double p_right_i = left_i ? p_right_i_given_i : p_right_i_given_j;
    const bool right_i = rng.next_unit() < p_right_i;
    const std::size_t cell = (left_i ? 0u : 2u) + (right_i ? 0u : 1u);
    ++cells[cell];
  }
  return cells;
}

// P(opposite outcomes) when the two magnets measure along `left` and
// `right`, via the collapse machinery (not the closed form).
inline double opposite_outcome_probability(const TwoQubitState& s, MeasurementAxis left,
                                           MeasurementAxis right) {
  const BranchDecomposition d = rotate_left_basis(s, left);
  double p = 0.0;
  if (d.i_weight > 1e-15)
    p += d.i_weight * (1.0 - up_probability(collapse(d, Outcome::i), right));
  if (d.j_weight > 1e-15) p += d.j_weight * up_probability(collapse(d, Outcome::j), right);
  return p;
}

}  // namespace pilotwave
