#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace pilotwave {

inline constexpr bool is_power_of_two(std::size_t n) {
  return n != 0 && (n & (n - 1)) == 0;
}

// Iterative radix-2 Cooley-Tukey transform with precomputed twiddles.
// Power-of-two sizes only, by design: grids are constrained to powers of two
// so no other radix is ever needed. The operation order is fixed, so results
// are bit-stable run to run -- golden tests depend on that.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (!is_power_of_two(n_) || n_ < 2)
      throw std::invalid_argument("FftPlan: size must be a power of two >= 2");

    bitrev_.resize(n_);
    std::size_t log2n = 0;
    for (std::size_t m = n_; m > 1; m >>= 1) ++log2n;
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < log2n; ++b) r |= ((i >> b) & 1u) << (log2n - 1 - b);
      bitrev_[i] = r;
    }

    // Forward twiddles exp(-2*pi*i*j/len) for every stage, concatenated.
    twiddles_.reserve(n_ - 1);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
      for (std::size_t j = 0; j < len / 2; ++j)
        twiddles_.push_back(std::polar(1.0, ang * static_cast<double>(j)));
    }
  }

  std::size_t size() const { return n_; }

  // In-place forward DFT, no scaling.
  void forward(std::span<std::complex<double>> a) const { transform(a, false); }

  // In-place inverse DFT, scaled by 1/n so inverse(forward(x)) == x.
  void inverse(std::span<std::complex<double>> a) const {
    transform(a, true);
    const double s = 1.0 / static_cast<double>(n_);
    for (auto& v : a) v *= s;
  }

 private:
  void transform(std::span<std::complex<double>> a, bool inverse) const {
    if (a.size() != n_) throw std::invalid_argument("FftPlan: span size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j = bitrev_[i];
      if (i < j) std::swap(a[i], a[j]);
    }
    std::size_t tw_off = 0;
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      for (std::size_t i = 0; i < n_; i += len) {
        for (std::size_t j = 0; j < half; ++j) {
          std::complex<double> w = twiddles_[tw_off + j];
          if (inverse) w = std::conj(w);
          const std::complex<double> u = a[i + j];
          const std::complex<double> t = w * a[i + j + half];
          a[i + j] = u + t;
          a[i + j + half] = u - t;
        }
      }
      tw_off += half;
    }
  }

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddles_;
};

// Angular wavenumbers in FFT bin order: bin j carries 2*pi*j/(n*h) for
// j < n/2 and 2*pi*(j - n)/(n*h) above (negative frequencies).
inline std::vector<double> spectral_wavenumbers(std::size_t n, double spacing) {
  std::vector<double> k(n);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * spacing);
  for (std::size_t j = 0; j < n; ++j) {
    const auto sj = static_cast<double>(j);
    k[j] = (j < n / 2) ? dk * sj : dk * (sj - static_cast<double>(n));
  }
  return k;
}

}  // namespace pilotwave
