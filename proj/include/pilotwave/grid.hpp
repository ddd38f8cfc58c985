#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "pilotwave/errors.hpp"

namespace pilotwave {

// A point in configuration space. Only the first Grid::dimension() entries
// are meaningful; the rest stay zero.
using Position = std::array<double, 2>;
using Velocity = std::array<double, 2>;

struct AxisSpec {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;

  double spacing() const { return (max - min) / static_cast<double>(points); }
};

// Uniform periodic grid over a 1D interval or a 2D box. Coordinate k on an
// axis maps to min + k*spacing; max itself is not a sample point (it is the
// periodic image of min), matching the spectral transform's conventions.
class Grid {
 public:
  static Grid line(double min, double max, std::size_t points) {
    Grid g;
    g.dim_ = 1;
    g.axes_[0] = {min, max, points};
    g.validate();
    return g;
  }

  static Grid plane(double x_min, double x_max, std::size_t x_points,
                    double y_min, double y_max, std::size_t y_points) {
    Grid g;
    g.dim_ = 2;
    g.axes_[0] = {x_min, x_max, x_points};
    g.axes_[1] = {y_min, y_max, y_points};
    g.validate();
    return g;
  }

  int dimension() const { return dim_; }
  const AxisSpec& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }

  std::size_t size() const {
    std::size_t n = axes_[0].points;
    if (dim_ == 2) n *= axes_[1].points;
    return n;
  }

  double coordinate(int a, std::size_t k) const {
    const auto& ax = axes_[static_cast<std::size_t>(a)];
    return ax.min + static_cast<double>(k) * ax.spacing();
  }

  // Row-major over axis 0: flat = ix * ny + iy.
  std::size_t index(std::size_t ix, std::size_t iy = 0) const {
    return dim_ == 1 ? ix : ix * axes_[1].points + iy;
  }

  Position point(std::size_t flat) const {
    if (dim_ == 1) return {coordinate(0, flat), 0.0};
    const std::size_t ny = axes_[1].points;
    return {coordinate(0, flat / ny), coordinate(1, flat % ny)};
  }

  // h in 1D, hx*hy in 2D: the quadrature cell volume.
  double cell_volume() const {
    double v = axes_[0].spacing();
    if (dim_ == 2) v *= axes_[1].spacing();
    return v;
  }

  bool contains(const Position& p) const {
    for (int a = 0; a < dim_; ++a) {
      const auto& ax = axes_[static_cast<std::size_t>(a)];
      if (p[static_cast<std::size_t>(a)] < ax.min || p[static_cast<std::size_t>(a)] >= ax.max)
        return false;
    }
    return true;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i) {
      const auto& x = a.axes_[static_cast<std::size_t>(i)];
      const auto& y = b.axes_[static_cast<std::size_t>(i)];
      if (x.min != y.min || x.max != y.max || x.points != y.points) return false;
    }
    return true;
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  void validate() const {
    for (int a = 0; a < dim_; ++a) {
      const auto& ax = axes_[static_cast<std::size_t>(a)];
      if (ax.points < 8)
        throw std::invalid_argument("Grid: need at least 8 points per axis");
      if (!(ax.spacing() > 0.0) || !std::isfinite(ax.spacing()))
        throw std::invalid_argument("Grid: axis extent must give positive spacing");
    }
  }

  int dim_ = 1;
  std::array<AxisSpec, 2> axes_{};
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw GridMismatch(what);
}

}  // namespace pilotwave
