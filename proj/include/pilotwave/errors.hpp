#pragma once

#include <stdexcept>

namespace pilotwave {

// Base class for every failure this library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Normalization requested for a state whose quadrature norm underflows.
class ZeroNorm : public Error {
 public:
  using Error::Error;
};

// Two operands live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// Sampling requested from a density whose maximum weight is zero.
class DegenerateDensity : public Error {
 public:
  using Error::Error;
};

// dt * V_max >= pi: the split-step potential phase would wrap.
class PhaseWrapRisk : public Error {
 public:
  using Error::Error;
};

// Slit geometry falls outside the grid.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Velocity evaluation requested too close to a node of the wavefunction.
class NearNode : public Error {
 public:
  using Error::Error;
};

// Collapse onto a branch of (numerically) zero weight.
class ImpossibleOutcome : public Error {
 public:
  using Error::Error;
};

// Too many trajectories were flagged for statistics to be trustworthy.
class InsufficientEnsemble : public Error {
 public:
  using Error::Error;
};

// Probability mass at the periodic boundary exceeded the runtime guard.
class BoundaryLeak : public Error {
 public:
  using Error::Error;
};

// Bad run configuration (CLI / config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pilotwave
