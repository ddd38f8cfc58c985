#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pilotwave/errors.hpp"
#include "pilotwave/rng.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

namespace detail {

// Nearest grid cell of a coordinate, point-centered, periodic wrap.
inline std::size_t nearest_cell(const AxisSpec& ax, double x) {
  const auto n = static_cast<long long>(ax.points);
  long long k = static_cast<long long>(std::floor((x - ax.min) / ax.spacing() + 0.5));
  k %= n;
  if (k < 0) k += n;
  return static_cast<std::size_t>(k);
}

}  // namespace detail

// Rejection sampling against the density's maximum: propose uniformly over
// the grid box, accept with probability w(cell)/w_max where the cell is the
// nearest grid point. Generalizes unchanged to 2D. Deterministic given seed.
inline std::vector<Position> sample_positions(const Density& d, std::size_t n,
                                              std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_positions: n must be >= 1");
  const double w_max = d.max_weight();
  if (w_max <= 0.0) throw DegenerateDensity("sample_positions: density has zero maximum");

  const Grid& g = d.grid();
  SplitMix64 rng(seed);
  std::vector<Position> out;
  out.reserve(n);
  while (out.size() < n) {
    Position p{0.0, 0.0};
    std::array<std::size_t, 2> cell{0, 0};
    for (int a = 0; a < g.dimension(); ++a) {
      const auto ia = static_cast<std::size_t>(a);
      const auto& ax = g.axis(a);
      p[ia] = rng.next_uniform(ax.min, ax.max);
      cell[ia] = detail::nearest_cell(ax, p[ia]);
    }
    const double w = d.weight(g.index(cell[0], cell[1]));
    if (rng.next_unit() * w_max <= w) out.push_back(p);
  }
  return out;
}

// Piecewise-linear CDF of a grid density along one axis (the marginal, in
// 2D). Cells are point-centered, so the cumulative sums realize the midpoint
// rule and converge at second order.
class GridCdf {
 public:
  GridCdf(const Density& d, int axis = 0) {
    const Grid& g = d.grid();
    const auto& ax = g.axis(axis);
    min_ = ax.min;
    spacing_ = ax.spacing();
    const std::size_t n = ax.points;

    std::vector<double> marginal(n, 0.0);
    if (g.dimension() == 1) {
      for (std::size_t k = 0; k < n; ++k) marginal[k] = d.weight(k);
    } else {
      const int other = 1 - axis;
      const double h_other = g.axis(other).spacing();
      for (std::size_t i = 0; i < g.axis(0).points; ++i)
        for (std::size_t j = 0; j < g.axis(1).points; ++j) {
          const std::size_t along = (axis == 0) ? i : j;
          marginal[along] += d.weight(g.index(i, j)) * h_other;
        }
    }

    cum_.resize(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) cum_[k + 1] = cum_[k] + marginal[k] * spacing_;
    const double total = cum_[n];
    if (total > 0.0)
      for (double& c : cum_) c /= total;
  }

  double operator()(double x) const {
    const auto n = cum_.size() - 1;
    // Cell k spans [min + (k - 1/2) h, min + (k + 1/2) h).
    const double s = (x - min_) / spacing_ + 0.5;
    if (s <= 0.0) return 0.0;
    if (s >= static_cast<double>(n)) return 1.0;
    const auto k = static_cast<std::size_t>(std::floor(s));
    const double f = s - static_cast<double>(k);
    return cum_[k] + f * (cum_[k + 1] - cum_[k]);
  }

 private:
  double min_ = 0.0;
  double spacing_ = 1.0;
  std::vector<double> cum_;
};

// Two-sided Kolmogorov-Smirnov statistic of samples against a reference CDF.
template <typename Cdf>
inline double ks_statistic(std::vector<double> xs, const Cdf& cdf) {
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

// Critical value used throughout: two-sided, alpha ~ 0.001, chosen so
// equivariance checks are stable in CI.
inline double ks_threshold(std::size_t n) {
  return 1.95 / std::sqrt(static_cast<double>(n));
}

}  // namespace pilotwave
