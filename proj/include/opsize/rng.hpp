#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace opsize {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream seed = mix64 chain over (master, a, b). Samplers key stream a by
// sample index and stream b by site (or block) index, so any single draw can
// be reproduced in isolation and results never depend on thread layout.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = mix64(master + kGolden);
  z = mix64(z ^ (a + kGolden));
  z = mix64(z ^ (b + 2 * kGolden));
  return z;
}

// Slot for draws that are not attached to any single site (whole-chain
// states, bootstrap resampling).
inline constexpr std::uint64_t kGlobalSlot = 0xffffffffULL;
inline constexpr std::uint64_t kBootstrapSlot = 0xb007ULL;

// splitmix64 counter generator with explicit Box-Muller. Everything here is
// spelled out in integer and libm arithmetic so two builds (or two thread
// counts) produce bit-identical streams.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}
  RngStream(std::uint64_t master, std::uint64_t a, std::uint64_t b)
      : state_(derive_stream_seed(master, a, b)) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // [0, 1), 53-bit mantissa
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1], safe under log()
  double uniform01_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform01_pos();
    const double v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 2.0 * M_PI * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> gaussian_cx() {
    const double re = gaussian();
    return {re, gaussian()};
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}
