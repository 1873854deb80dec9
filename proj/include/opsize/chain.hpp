#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace opsize {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u32 = std::uint32_t;

inline i64 pow_i64(i64 base, int exp) {
  i64 r = 1;
  for (int k = 0; k < exp; ++k) {
    if (r > (i64{1} << 56) / base)
      throw std::overflow_error("pow_i64: index space exceeds 2^56");
    r *= base;
  }
  return r;
}

// Largest N whose operator table d^{2N} still fits in 2^24 entries;
// for qubits this is 12 sites (16M coefficients, ~134 MB of doubles).
inline int default_operator_site_cap(int d) {
  int n = 0;
  i64 table = 1;
  const i64 limit = i64{1} << 24;
  while (table * d * d <= limit) {
    table *= i64{d} * d;
    ++n;
  }
  return n;
}

// Chain geometry: N sites of local dimension d. Everything downstream
// (state dimension d^N, coefficient table dimension d^{2N}, support masks)
// derives its index arithmetic from this. N = 0 is legal and describes the
// scalar left over after tracing out every site.
struct ChainSpec {
  int n_sites = 1;
  int local_dim = 2;
  // 0 means use default_operator_site_cap(local_dim).
  int operator_site_cap = 0;

  void validate() const {
    if (n_sites < 0) throw std::invalid_argument("ChainSpec: negative site count");
    if (local_dim < 2) throw std::invalid_argument("ChainSpec: local dimension must be >= 2");
    if (n_sites > 32) throw std::invalid_argument("ChainSpec: site count exceeds mask width");
  }

  i64 dim() const { return pow_i64(local_dim, n_sites); }
  i64 table_dim() const { return pow_i64(i64{local_dim} * local_dim, n_sites); }
  int letters_per_site() const { return local_dim * local_dim; }

  int effective_operator_cap() const {
    return operator_site_cap > 0 ? operator_site_cap : default_operator_site_cap(local_dim);
  }

  // Called by the d^{2N} code paths (decomposition, region distributions).
  void require_operator_side(const char* who) const {
    validate();
    if (n_sites > effective_operator_cap())
      throw std::invalid_argument(std::string(who) + ": " + std::to_string(n_sites) +
                                  " sites exceeds the operator-side cap of " +
                                  std::to_string(effective_operator_cap()) +
                                  " for local dimension " + std::to_string(local_dim));
  }

  void require_site(int site, const char* who) const {
    if (site < 0 || site >= n_sites)
      throw std::invalid_argument(std::string(who) + ": site index " + std::to_string(site) +
                                  " out of range for " + std::to_string(n_sites) + " sites");
  }

  u32 full_mask() const { return n_sites == 32 ? ~u32{0} : ((u32{1} << n_sites) - 1); }

  bool operator==(const ChainSpec& o) const {
    return n_sites == o.n_sites && local_dim == o.local_dim;
  }
};

}
