#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "pilotwave/errors.hpp"
#include "pilotwave/grid.hpp"

namespace pilotwave {

enum class SlitOpen { slit1, slit2, both };

// Real-valued potential sampled on a grid, dimensionless energy units.
class Potential {
 public:
  static Potential zero(const Grid& grid) {
    return Potential(grid, std::vector<double>(grid.size(), 0.0));
  }

  // V = 1/2 omega^2 (x^2 [+ y^2]).
  static Potential harmonic(const Grid& grid, double omega) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Position p = grid.point(k);
      double r2 = p[0] * p[0];
      if (grid.dimension() == 2) r2 += p[1] * p[1];
      v[k] = 0.5 * omega * omega * r2;
    }
    return Potential(grid, std::move(v));
  }

  // A wall of height `height` across the transverse axis with one or two
  // open gaps of width `gap_width`, centered at +-separation/2 (slit 1 on
  // the positive side).
  static Potential slit_barrier(const Grid& grid, double height, double gap_width,
                                double separation, SlitOpen open) {
    if (grid.dimension() != 1)
      throw std::invalid_argument("slit_barrier: transverse model is 1D");
    if (!(height > 0.0)) throw std::invalid_argument("slit_barrier: height must be > 0");
    if (!(separation > gap_width) || !(gap_width > 0.0))
      throw GeometryError("slit_barrier: need separation > width > 0");
    const auto& ax = grid.axis(0);
    const double c1 = separation / 2.0, c2 = -separation / 2.0;
    if (c1 + gap_width / 2.0 >= ax.max || c2 - gap_width / 2.0 <= ax.min)
      throw GeometryError("slit_barrier: slits fall outside the grid");

    auto in_gap = [&](double x, double c) { return std::abs(x - c) <= gap_width / 2.0; };
    std::vector<double> v(grid.size(), height);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double x = grid.coordinate(0, k);
      const bool open1 = (open != SlitOpen::slit2) && in_gap(x, c1);
      const bool open2 = (open != SlitOpen::slit1) && in_gap(x, c2);
      if (open1 || open2) v[k] = 0.0;
    }
    return Potential(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t k) const { return values_[k]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Potential(Grid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    for (double v : values_)
      if (!std::isfinite(v))
        throw std::invalid_argument("Potential: values must be finite");
  }

  Grid grid_;
  std::vector<double> values_;
};

}  // namespace pilotwave
