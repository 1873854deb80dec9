#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "opsize/decompose.hpp"

namespace opsize {

// p_l for l = 0..N: probability that the operator carries a string of size l.
struct SizeDistribution {
  ChainSpec chain;
  std::vector<double> p;
};

// p_R over the 2^N support masks; popcount aggregation gives SizeDistribution.
struct RegionDistribution {
  ChainSpec chain;
  std::vector<double> p;
};

inline RegionDistribution region_distribution(const CoefficientTable& c) {
  if (c.norm2 <= 0.0) throw std::invalid_argument("region_distribution: zero operator");
  const int d2 = c.chain.letters_per_site();
  RegionDistribution r;
  r.chain = c.chain;
  r.p.assign(size_t{1} << c.chain.n_sites, 0.0);
  std::vector<int> digits(static_cast<size_t>(c.chain.n_sites), 0);
  u32 mask = 0;
  for (i64 s = 0; s < static_cast<i64>(c.values.size()); ++s) {
    const double v = c.values[static_cast<size_t>(s)];
    r.p[mask] += v * v;
    for (int n = 0; n < c.chain.n_sites; ++n) {
      if (++digits[static_cast<size_t>(n)] < d2) {
        mask |= u32{1} << n;
        break;
      }
      digits[static_cast<size_t>(n)] = 0;
      mask &= ~(u32{1} << n);
    }
  }
  for (double& x : r.p) x /= c.norm2;
  return r;
}

inline SizeDistribution size_distribution(const RegionDistribution& r) {
  SizeDistribution s;
  s.chain = r.chain;
  s.p.assign(static_cast<size_t>(r.chain.n_sites) + 1, 0.0);
  for (u32 mask = 0; mask < r.p.size(); ++mask)
    s.p[static_cast<size_t>(std::popcount(mask))] += r.p[mask];
  return s;
}

inline SizeDistribution size_distribution(const CoefficientTable& c) {
  return size_distribution(region_distribution(c));
}

inline cxd generating_function(const SizeDistribution& s, cxd z) {
  cxd f = 0.0;
  for (size_t l = s.p.size(); l-- > 0;) f = f * z + s.p[l];
  return f;
}

// Recover p_l from F evaluated at the N+1 roots of unity z_k = e^{2 pi i k/(N+1)}
// by inverse DFT. Residues beyond tolerance mean the samples were not produced
// by a real nonnegative size distribution.
inline SizeDistribution size_from_samples(const ChainSpec& chain, const std::vector<cxd>& f_values) {
  chain.validate();
  const size_t m = static_cast<size_t>(chain.n_sites) + 1;
  if (f_values.size() != m)
    throw std::invalid_argument("size_from_samples: need N+1 samples at the N+1 roots of unity");
  SizeDistribution s;
  s.chain = chain;
  s.p.assign(m, 0.0);
  for (size_t l = 0; l < m; ++l) {
    cxd acc = 0.0;
    for (size_t k = 0; k < m; ++k) {
      const double ang = -2.0 * M_PI * static_cast<double>(k * l % m) / static_cast<double>(m);
      acc += f_values[k] * cxd(std::cos(ang), std::sin(ang));
    }
    acc /= static_cast<double>(m);
    if (std::abs(acc.imag()) > kDistributionClip)
      throw std::runtime_error("size_from_samples: imaginary residue exceeds tolerance");
    double v = acc.real();
    if (v < 0.0) {
      if (v < -kDistributionClip)
        throw std::runtime_error("size_from_samples: negative coefficient beyond round-off");
      v = 0.0;
    }
    s.p[l] = v;
  }
  return s;
}

// Size distribution of a uniformly random operator-space vector: each site is
// the identity with weight 1/d^2 and any of the d^2 - 1 letters otherwise,
// independently, so the size is binomial. The l = 0 term is kept exactly as
// the closed form gives it; condition_min_size strips it when comparing
// against traceless draws.
inline SizeDistribution random_baseline(const ChainSpec& chain) {
  chain.validate();
  const int n = chain.n_sites;
  const double d2 = static_cast<double>(chain.local_dim) * chain.local_dim;
  const double q = (d2 - 1.0) / d2;
  SizeDistribution s;
  s.chain = chain;
  s.p.assign(static_cast<size_t>(n) + 1, 0.0);
  double binom = 1.0;
  for (int l = 0; l <= n; ++l) {
    s.p[static_cast<size_t>(l)] =
        binom * std::pow(q, l) * std::pow(1.0 - q, n - l);
    binom *= static_cast<double>(n - l) / static_cast<double>(l + 1);
  }
  return s;
}

inline double tv_distance(const SizeDistribution& a, const SizeDistribution& b) {
  if (a.p.size() != b.p.size())
    throw std::invalid_argument("tv_distance: length mismatch");
  double acc = 0.0;
  for (size_t l = 0; l < a.p.size(); ++l) acc += std::abs(a.p[l] - b.p[l]);
  return 0.5 * acc;
}

inline SizeDistribution condition_min_size(const SizeDistribution& s, int lmin) {
  SizeDistribution out = s;
  double kept = 0.0;
  for (size_t l = 0; l < out.p.size(); ++l) {
    if (static_cast<int>(l) < lmin) out.p[l] = 0.0;
    kept += out.p[l];
  }
  if (kept <= 0.0) throw std::invalid_argument("condition_min_size: no mass at or above lmin");
  for (double& x : out.p) x /= kept;
  return out;
}

}
