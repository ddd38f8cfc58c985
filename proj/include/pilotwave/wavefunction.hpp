#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pilotwave/errors.hpp"
#include "pilotwave/grid.hpp"

namespace pilotwave {

using Complex = std::complex<double>;

// Nonnegative weights on a grid; quadrature sum of weight * cell_volume is 1
// for a probability density.
class Density {
 public:
  Density(Grid grid, std::vector<double> weights)
      : grid_(std::move(grid)), weights_(std::move(weights)) {
    if (weights_.size() != grid_.size())
      throw std::invalid_argument("Density: weight count does not match grid");
    for (double w : weights_)
      if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("Density: weights must be finite and >= 0");
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t k) const { return weights_[k]; }

  double total_mass() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s * grid_.cell_volume();
  }

  double max_weight() const {
    double m = 0.0;
    for (double w : weights_) m = std::max(m, w);
    return m;
  }

 private:
  Grid grid_;
  std::vector<double> weights_;
};

// Complex amplitudes on a grid. Units of length^(-d/2): |psi|^2 integrates
// to one for a normalized state.
class WaveFunction {
 public:
  WaveFunction(Grid grid, std::vector<Complex> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("WaveFunction: value count does not match grid");
    for (const Complex& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::invalid_argument("WaveFunction: values must be finite");
  }

  static WaveFunction from_function(const Grid& grid,
                                    const std::function<Complex(const Position&)>& f) {
    std::vector<Complex> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) v[k] = f(grid.point(k));
    return WaveFunction(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  Complex value(std::size_t k) const { return values_[k]; }

  // Rectangle-rule L2 norm. On a periodic grid the trapezoid rule reduces to
  // this (the right edge is the wrapped image of the left one).
  double norm_squared() const {
    double s = 0.0;
    for (const Complex& v : values_) s += std::norm(v);
    return s * grid_.cell_volume();
  }
  double norm() const { return std::sqrt(norm_squared()); }

  double max_abs() const {
    double m = 0.0;
    for (const Complex& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Grid grid_;
  std::vector<Complex> values_;
};

// Scale to unit L2 norm by one positive real constant.
inline WaveFunction normalize(const WaveFunction& wf) {
  const double n2 = wf.norm_squared();
  if (!(std::sqrt(n2) >= 1e-300)) throw ZeroNorm("normalize: quadrature norm underflows");
  const double s = 1.0 / std::sqrt(n2);
  std::vector<Complex> v(wf.values().begin(), wf.values().end());
  for (Complex& x : v) x *= s;
  return WaveFunction(wf.grid(), std::move(v));
}

// rho = |psi|^2 pointwise.
inline Density density(const WaveFunction& wf) {
  std::vector<double> w(wf.grid().size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::norm(wf.value(k));
  return Density(wf.grid(), std::move(w));
}

// Quadrature of conj(f) * g. |overlap| <= 1 for normalized inputs.
inline Complex overlap(const WaveFunction& f, const WaveFunction& g) {
  require_same_grid(f.grid(), g.grid(), "overlap: operands on different grids");
  Complex s{0.0, 0.0};
  for (std::size_t k = 0; k < f.grid().size(); ++k)
    s += std::conj(f.value(k)) * g.value(k);
  return s * f.grid().cell_volume();
}

// Normalized Gaussian packet exp(i k.x) * exp(-|x - c|^2 / (4 sigma^2)),
// one factor per axis. sigma is the standard deviation of |psi|^2.
inline WaveFunction gaussian_packet(const Grid& grid, const Position& center,
                                    const Position& sigma, const Position& momentum) {
  auto f = [&](const Position& p) {
    double logmag = 0.0;
    double phase = 0.0;
    for (int a = 0; a < grid.dimension(); ++a) {
      const auto ia = static_cast<std::size_t>(a);
      const double d = p[ia] - center[ia];
      logmag -= d * d / (4.0 * sigma[ia] * sigma[ia]);
      phase += momentum[ia] * p[ia];
    }
    return std::polar(std::exp(logmag), phase);
  };
  return normalize(WaveFunction::from_function(grid, f));
}

inline WaveFunction gaussian_packet_1d(const Grid& grid, double center, double sigma,
                                       double momentum = 0.0) {
  return gaussian_packet(grid, {center, 0.0}, {sigma, 1.0}, {momentum, 0.0});
}

// Periodic linear (1D) / bilinear (2D) interpolation of grid data at an
// arbitrary point.
template <typename T>
inline T interpolate(const Grid& grid, std::span<const T> data, const Position& p) {
  std::array<std::size_t, 2> i0{0, 0}, i1{0, 0};
  std::array<double, 2> f{0.0, 0.0};
  for (int a = 0; a < grid.dimension(); ++a) {
    const auto ia = static_cast<std::size_t>(a);
    const auto& ax = grid.axis(a);
    const double s = (p[ia] - ax.min) / ax.spacing();
    double base = std::floor(s);
    f[ia] = s - base;
    const auto n = static_cast<long long>(ax.points);
    long long b = static_cast<long long>(base) % n;
    if (b < 0) b += n;
    i0[ia] = static_cast<std::size_t>(b);
    i1[ia] = static_cast<std::size_t>((b + 1) % n);
  }
  if (grid.dimension() == 1)
    return data[i0[0]] * (1.0 - f[0]) + data[i1[0]] * f[0];
  const T v00 = data[grid.index(i0[0], i0[1])];
  const T v01 = data[grid.index(i0[0], i1[1])];
  const T v10 = data[grid.index(i1[0], i0[1])];
  const T v11 = data[grid.index(i1[0], i1[1])];
  return (v00 * (1.0 - f[1]) + v01 * f[1]) * (1.0 - f[0]) +
         (v10 * (1.0 - f[1]) + v11 * f[1]) * f[0];
}

}  // namespace pilotwave
