// Von Neumann pointer measurement and decoherence diagnostics.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "pilotwave/pointer.hpp"
#include "oracles.hpp"

using namespace pilotwave;
using Catch::Approx;

namespace {
const Grid kPointerGrid = Grid::line(-30.0, 30.0, 1024);

WaveFunction ready_state(double sigma = 1.0) {
  return gaussian_packet_1d(kPointerGrid, 0.0, sigma);
}
}  // namespace

TEST_CASE("spectral translation displaces a packet rigidly") {
  const WaveFunction psi = ready_state();
  const WaveFunction shifted = spectral_translate(psi, 3.5);
  // Compare against the packet constructed at the displaced center.
  const WaveFunction direct = gaussian_packet_1d(kPointerGrid, 3.5, 1.0);
  for (std::size_t k = 0; k < kPointerGrid.size(); ++k)
    CHECK(std::abs(std::abs(shifted.value(k)) - std::abs(direct.value(k))) < 1e-9);
  CHECK(shifted.norm() == Approx(1.0).margin(1e-12));
}

TEST_CASE("single branch: c1 = 1 leaves all mass in a displaced ready state") {
  const WaveFunction psi0 = ready_state();
  const SpinorField sf = pointer_measure({1.0, 0.0}, {0.0, 0.0}, psi0, 1.0, 4.0);
  CHECK(sf.down.norm_squared() == Approx(0.0).margin(1e-12));
  CHECK(sf.up.norm_squared() == Approx(1.0).margin(1e-8));
  const WaveFunction displaced = gaussian_packet_1d(kPointerGrid, 4.0, 1.0);
  for (std::size_t k = 0; k < kPointerGrid.size(); ++k)
    CHECK(std::abs(std::abs(sf.up.value(k)) - std::abs(displaced.value(k))) < 1e-9);
}

TEST_CASE("equal superposition, branches driven 10 sigma apart each way") {
  const double r = 1.0 / std::sqrt(2.0);
  // Each branch displaced +-10 sigma: packet separation 20 sigma, overlap
  // e^(-400/8) ~ 2e-22. Full decoherence for all practical purposes.
  const SpinorField sf = pointer_measure({r, 0.0}, {r, 0.0}, ready_state(), 1.0, 10.0);
  CHECK(sf.up.norm_squared() == Approx(0.5).margin(1e-8));
  CHECK(sf.down.norm_squared() == Approx(0.5).margin(1e-8));
  const auto ov = decoherence_overlap(sf);
  REQUIRE(ov.has_value());
  CHECK(*ov < 1e-10);
}

TEST_CASE("Born weights emerge from unitary branching: masses 0.3 / 0.7") {
  const Complex c1 = std::sqrt(0.3);
  const Complex c2 = std::sqrt(0.7);
  const SpinorField sf = pointer_measure(c1, c2, ready_state(), 1.0, 5.0);
  CHECK(sf.up.norm_squared() == Approx(0.3).margin(1e-8));
  CHECK(sf.down.norm_squared() == Approx(0.7).margin(1e-8));
}

TEST_CASE("decoherence overlap: no displacement means no measurement") {
  const double r = 1.0 / std::sqrt(2.0);
  const SpinorField sf = pointer_measure({r, 0.0}, {r, 0.0}, ready_state(), 1.0, 0.0);
  const auto ov = decoherence_overlap(sf);
  REQUIRE(ov.has_value());
  CHECK(*ov == Approx(1.0).margin(1e-9));
}

TEST_CASE("decoherence overlap matches the Gaussian closed form") {
  const double r = 1.0 / std::sqrt(2.0);
  // Branches displaced by +-delta/2 each: total separation delta.
  auto overlap_at = [&](double delta) {
    const SpinorField sf = pointer_measure({r, 0.0}, {r, 0.0}, ready_state(), 1.0, delta / 2.0);
    const auto ov = decoherence_overlap(sf);
    REQUIRE(ov.has_value());
    return *ov;
  };
  // Separation sigma: e^(-1/8) ~ 0.8825.
  CHECK(overlap_at(1.0) == Approx(oracles::gaussian_overlap(1.0, 1.0)).margin(1e-3));
  // Separation 10 sigma: e^(-12.5) < 1e-5.
  CHECK(overlap_at(10.0) == Approx(oracles::gaussian_overlap(10.0, 1.0)).margin(1e-9));
}

TEST_CASE("decoherence overlap decreases monotonically with displacement") {
  const double r = 1.0 / std::sqrt(2.0);
  double prev = 1.1;
  for (double d : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const SpinorField sf = pointer_measure({r, 0.0}, {r, 0.0}, ready_state(), 1.0, d);
    const auto ov = decoherence_overlap(sf);
    REQUIRE(ov.has_value());
    CHECK(*ov < prev);
    prev = *ov;
  }
}

TEST_CASE("zero branch reports NotApplicable") {
  const SpinorField sf = pointer_measure({1.0, 0.0}, {0.0, 0.0}, ready_state(), 1.0, 2.0);
  CHECK_FALSE(decoherence_overlap(sf).has_value());
}

TEST_CASE("pointer_measure validates its preconditions") {
  CHECK_THROWS_AS(pointer_measure({1.0, 0.0}, {1.0, 0.0}, ready_state(), 1.0, 1.0),
                  std::invalid_argument);  // |c1|^2 + |c2|^2 = 2
  const WaveFunction unnormalized(kPointerGrid,
                                  std::vector<Complex>(kPointerGrid.size(), {0.1, 0.0}));
  CHECK_THROWS_AS(pointer_measure({1.0, 0.0}, {0.0, 0.0}, unnormalized, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("recording run: branch masses constant, displacement linear in time") {
  const Complex c1 = std::sqrt(0.3), c2 = std::sqrt(0.7);
  const PointerRun run = pointer_measure_recording(c1, c2, ready_state(), 2.0, 3.0, 64);
  REQUIRE(run.snapshot_count() == 65);
  CHECK(run.dt == Approx(3.0 / 64.0));
  const double h = run.grid.cell_volume();
  for (std::size_t s : {std::size_t{0}, std::size_t{32}, std::size_t{64}}) {
    double up = 0.0, down = 0.0;
    for (std::size_t k = 0; k < run.grid.size(); ++k) {
      up += run.up_density[s][k];
      down += run.down_density[s][k];
    }
    CHECK(up * h == Approx(0.3).margin(1e-8));
    CHECK(down * h == Approx(0.7).margin(1e-8));
  }
  // Peak of the up branch at t = 3 sits at coupling * t = 6.
  std::size_t argmax = 0;
  for (std::size_t k = 0; k < run.grid.size(); ++k)
    if (run.up_density[64][k] > run.up_density[64][argmax]) argmax = k;
  CHECK(run.grid.coordinate(0, argmax) == Approx(6.0).margin(run.grid.cell_volume() + 1e-9));
}
