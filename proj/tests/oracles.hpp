#pragma once

// Independent analytic oracles for the test suite. Everything here is a
// closed form evaluated directly -- no grids, no FFTs, no library calls --
// so these stay independent of the implementation paths they check.

#include <cmath>
#include <complex>
#include <numbers>

namespace oracles {

// Free 1D Gaussian packet, hbar = 1. Initial state
//   psi_0(x) = (2 pi sigma0^2)^(-1/4) exp(-(x - x0)^2 / (4 sigma0^2) + i k0 (x - x0))
// propagated for time t under H = p^2 / (2 m):
//   psi(x,t) = (2 pi sigma0^2)^(-1/4) sqrt(sigma0^2 / A) *
//              exp(-B^2 / (4 A) + i k0 (x - x0) - i k0^2 t / (2 m))
// with A = sigma0^2 + i t/(2m) and B = x - x0 - k0 t / m.
inline std::complex<double> free_gaussian(double x, double t, double x0, double sigma0,
                                          double k0, double mass = 1.0) {
  const std::complex<double> A(sigma0 * sigma0, t / (2.0 * mass));
  const double B = x - x0 - k0 * t / mass;
  const std::complex<double> pref =
      std::pow(2.0 * std::numbers::pi * sigma0 * sigma0, -0.25) *
      std::sqrt(sigma0 * sigma0 / A);
  const std::complex<double> phase(0.0, k0 * (x - x0) - k0 * k0 * t / (2.0 * mass));
  return pref * std::exp(-B * B / (4.0 * A) + phase);
}

// |psi(x,t)|^2 of the packet above: a normal density with
// sigma_t^2 = sigma0^2 + t^2 / (4 sigma0^2 m^2), center x0 + k0 t / m.
inline double free_gaussian_sigma_t(double t, double sigma0, double mass = 1.0) {
  const double s2 = sigma0 * sigma0 + t * t / (4.0 * sigma0 * sigma0 * mass * mass);
  return std::sqrt(s2);
}

inline double normal_cdf(double x, double mean, double sigma) {
  return 0.5 * (1.0 + std::erf((x - mean) / (sigma * std::numbers::sqrt2)));
}

inline double normal_density(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// Bohmian trajectory of the free spreading Gaussian: the flow is the scaling
// map about the moving center, x(t) = center(t) + (x_init - x0) * sigma_t/sigma0.
inline double free_gaussian_trajectory(double x_init, double t, double x0, double sigma0,
                                       double k0, double mass = 1.0) {
  return x0 + k0 * t / mass +
         (x_init - x0) * free_gaussian_sigma_t(t, sigma0, mass) / sigma0;
}

// Overlap of two unit Gaussians of common width displaced by delta:
// exp(-delta^2 / (8 sigma^2)).
inline double gaussian_overlap(double delta, double sigma) {
  return std::exp(-delta * delta / (8.0 * sigma * sigma));
}

// Singlet-state probability of opposite outcomes along detector directions
// theta apart: cos^2(theta / 2).
inline double singlet_opposite_probability(double theta) {
  const double c = std::cos(theta / 2.0);
  return c * c;
}

// Direct-summation screen density of the symmetric two-packet double slit:
// |g1(x,t) + g2(x,t)|^2 / 2 with gaps at +-separation/2 and packet width
// sigma = width/2 (unnormalized by the 1/2 convention of the symmetric
// superposition; normalize by quadrature if an exact density is needed).
inline double double_slit_screen_density(double x, double t, double separation, double width,
                                         double mass = 1.0) {
  const double a = separation / 2.0;
  const double sigma = width / 2.0;
  const std::complex<double> g1 = free_gaussian(x, t, +a, sigma, 0.0, mass);
  const std::complex<double> g2 = free_gaussian(x, t, -a, sigma, 0.0, mass);
  return 0.5 * std::norm(g1 + g2);
}

}  // namespace oracles
