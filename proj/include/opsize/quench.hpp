#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "opsize/dense.hpp"
#include "opsize/distributions.hpp"
#include "opsize/ensemble.hpp"
#include "opsize/parallel.hpp"
#include "opsize/site_basis.hpp"

namespace opsize {

inline constexpr int kDefaultBootstrapResamples = 1000;

struct QuenchSamples {
  std::vector<double> values;
  double mean = 0.0;
  double variance = 0.0;
  double stderr_of_variance = 0.0;
  std::vector<double> bootstrap_variances;
  int sample_count = 0;
  double t = 0.0;

  // q in [0,1]; linear interpolation between order statistics.
  double bootstrap_quantile(double q) const {
    if (bootstrap_variances.empty())
      throw std::logic_error("QuenchSamples: no bootstrap distribution stored");
    std::vector<double> sorted = bootstrap_variances;
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  }
};

inline double expectation(const DenseOperator& o, const StateVector& psi) {
  if (o.mat.rows() != psi.amps.size())
    throw std::invalid_argument("expectation: dimension mismatch");
  const cxd val = psi.amps.dot(o.mat * psi.amps);
  if (std::abs(val.imag()) > kExpectationImagTol * std::max(1.0, std::abs(val.real())))
    throw std::runtime_error("expectation: imaginary residue exceeds tolerance; operator not Hermitian?");
  return val.real();
}

namespace detail {

inline double unbiased_variance(const std::vector<double>& values, double mean) {
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size() - 1);
}

// Sample statistics plus a bootstrap distribution of the variance estimator.
// The resampling stream hangs off (master_seed, bootstrap slot) and runs
// single-threaded, so the stderr is as reproducible as the samples.
inline QuenchSamples finish_samples(std::vector<double> values, double t, u64 master_seed,
                                    int bootstrap_resamples) {
  if (values.size() < 2) throw std::invalid_argument("quench sampling: need M >= 2");
  QuenchSamples out;
  out.sample_count = static_cast<int>(values.size());
  out.t = t;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  out.variance = unbiased_variance(values, out.mean);
  if (bootstrap_resamples > 1) {
    RngStream stream(master_seed, kBootstrapSlot, kGlobalSlot);
    const size_t m = values.size();
    std::vector<double> resample(m);
    out.bootstrap_variances.reserve(static_cast<size_t>(bootstrap_resamples));
    for (int b = 0; b < bootstrap_resamples; ++b) {
      double rsum = 0.0;
      for (size_t i = 0; i < m; ++i) {
        resample[i] = values[static_cast<size_t>(stream.below(m))];
        rsum += resample[i];
      }
      out.bootstrap_variances.push_back(unbiased_variance(resample, rsum / static_cast<double>(m)));
    }
    double bmean = 0.0;
    for (double v : out.bootstrap_variances) bmean += v;
    bmean /= static_cast<double>(out.bootstrap_variances.size());
    out.stderr_of_variance = std::sqrt(
        unbiased_variance(out.bootstrap_variances, bmean));
  }
  out.values = std::move(values);
  return out;
}

}

// Monte-Carlo second moment of O_Psi(t) = <Psi|O(t)|Psi> over the ensemble.
// Deterministic for fixed (spec, seed) at any thread count: each sample
// writes its own slot and the reductions run in index order.
inline QuenchSamples mc_variance(const DenseOperator& o_t, const EnsembleSpec& e, int m,
                                 int n_threads = 1,
                                 int bootstrap_resamples = kDefaultBootstrapResamples,
                                 double t = 0.0) {
  if (m < 2) throw std::invalid_argument("mc_variance: need M >= 2");
  e.validate(o_t.chain);
  std::vector<double> values(static_cast<size_t>(m));
  parallel_for(m, n_threads, [&](i64 i) {
    values[static_cast<size_t>(i)] =
        expectation(o_t, sample_initial_state(o_t.chain, e, static_cast<u64>(i)));
  });
  return detail::finish_samples(std::move(values), t, e.master_seed, bootstrap_resamples);
}

// F((1-eps)^2/(d+1)): the product-ensemble variance of a traceless operator
// normalized to tr(O^2) = d^N, with the preparation-error damping folded into
// the generating-function argument.
inline double exact_variance(const SizeDistribution& p, const PrepErrorModel& err = {}) {
  err.validate();
  const double lam = 1.0 - err.epsilon;
  const double z = lam * lam / static_cast<double>(p.chain.local_dim + 1);
  return generating_function(p, z).real();
}

// Doubled-space oracle: delta O^2 = tr[O x O prod_n (X_n + I_n)] / (d^N (d+1)^N),
// evaluated with per-site delta factors instead of materializing the d^{2N}
// x d^{2N} product. Traceless input required: the first-moment term is absent.
inline double exact_variance_doubled(const DenseOperator& o) {
  o.chain.validate();
  if (o.chain.n_sites > 5)
    throw std::invalid_argument("exact_variance_doubled: guarded to N <= 5");
  if (!o.check_traceless())
    throw std::invalid_argument("exact_variance_doubled: traceless operator required");
  const int n = o.chain.n_sites;
  const int d = o.chain.local_dim;
  const i64 dim = o.chain.dim();
  // tr[(O x O)(X + I per site)] = sum_{IJ,I'J'} O_{IJ} O_{I'J'} prod_n
  // [delta_{J_n I'_n} delta_{J'_n I_n} + delta_{J_n I_n} delta_{J'_n I'_n}]
  cxd acc = 0.0;
  std::vector<int> di(static_cast<size_t>(n)), dj(static_cast<size_t>(n)),
      dip(static_cast<size_t>(n)), djp(static_cast<size_t>(n));
  auto digits_of = [&](i64 x, std::vector<int>& out) {
    for (int k = 0; k < n; ++k) {
      out[static_cast<size_t>(k)] = static_cast<int>(x % d);
      x /= d;
    }
  };
  for (i64 i = 0; i < dim; ++i) {
    digits_of(i, di);
    for (i64 j = 0; j < dim; ++j) {
      digits_of(j, dj);
      for (i64 ip = 0; ip < dim; ++ip) {
        digits_of(ip, dip);
        for (i64 jp = 0; jp < dim; ++jp) {
          digits_of(jp, djp);
          double factor = 1.0;
          for (int k = 0; k < n; ++k) {
            const size_t s = static_cast<size_t>(k);
            const double swap_term = (dj[s] == dip[s] && djp[s] == di[s]) ? 1.0 : 0.0;
            const double id_term = (dj[s] == di[s] && djp[s] == dip[s]) ? 1.0 : 0.0;
            factor *= swap_term + id_term;
            if (factor == 0.0) break;
          }
          if (factor != 0.0) acc += factor * o.mat(i, j) * o.mat(ip, jp);
        }
      }
    }
  }
  const double norm = static_cast<double>(dim) * std::pow(static_cast<double>(d + 1), n);
  const cxd out = acc / norm;
  if (std::abs(out.imag()) > kExpectationImagTol * std::max(1.0, std::abs(out.real())))
    throw std::runtime_error("exact_variance_doubled: imaginary residue exceeds tolerance");
  return out.real();
}

// Per-target preparation sampling for noisy product states. reps = 0 averages
// the preparation noise analytically per target (the infinite-repetition
// limit); reps >= 1 draws that many noisy preparations per target. Raw shots
// use the perturbed superposition as written, whose ensemble average carries
// the (1-eps)^2 damping of the closed form; normalized shots renormalize each
// preparation, which damps slightly harder and departs from the closed form
// as eps grows.
enum class PrepShotNorm { raw, normalized };

struct PrepSampling {
  PrepErrorModel err;
  int reps = 256;
  PrepShotNorm shot_norm = PrepShotNorm::raw;
};

inline QuenchSamples mc_variance_prepared(const DenseOperator& o_t, const EnsembleSpec& e,
                                          const PrepSampling& prep, int m, int n_threads = 1,
                                          int bootstrap_resamples = kDefaultBootstrapResamples,
                                          double t = 0.0) {
  if (m < 2) throw std::invalid_argument("mc_variance_prepared: need M >= 2");
  if (e.kind != EnsembleKind::haar_product)
    throw std::invalid_argument("mc_variance_prepared: haar_product targets required");
  prep.err.validate();
  if (prep.reps < 0)
    throw std::invalid_argument("mc_variance_prepared: negative repetition count");
  if (prep.reps == 0 && prep.shot_norm == PrepShotNorm::normalized)
    throw std::invalid_argument(
        "mc_variance_prepared: analytic preparation average exists only for raw shots");
  e.validate(o_t.chain);
  const ChainSpec& chain = o_t.chain;
  const int d = chain.local_dim;
  const double eps = prep.err.epsilon;
  std::vector<double> values(static_cast<size_t>(m));
  parallel_for(m, n_threads, [&](i64 sample) {
    std::vector<Vector> targets(static_cast<size_t>(chain.n_sites));
    std::vector<RngStream> streams;
    streams.reserve(static_cast<size_t>(chain.n_sites));
    for (int n = 0; n < chain.n_sites; ++n) {
      streams.emplace_back(e.master_seed, static_cast<u64>(sample), static_cast<u64>(n));
      targets[static_cast<size_t>(n)] = sample_haar_vector(d, streams.back());
    }
    if (prep.reps == 0) {
      Matrix rho = Matrix::Ones(1, 1);
      for (int n = chain.n_sites - 1; n >= 0; --n) {
        const Vector& psi = targets[static_cast<size_t>(n)];
        const Matrix site_rho = (1.0 - eps) * (psi * psi.adjoint()) +
                                (eps / d) * Matrix::Identity(d, d);
        rho = kron(rho, site_rho);
      }
      const cxd val = o_t.mat.conjugate().cwiseProduct(rho).sum();
      values[static_cast<size_t>(sample)] = val.real();
      return;
    }
    double acc = 0.0;
    for (int rep = 0; rep < prep.reps; ++rep) {
      Vector chi = Vector::Ones(1);
      double weight = 1.0;
      for (int n = chain.n_sites - 1; n >= 0; --n) {
        const PerturbedDraw draw = perturbed_state(targets[static_cast<size_t>(n)], prep.err,
                                                   streams[static_cast<size_t>(n)]);
        chi = kron(chi, draw.state);
        weight *= draw.raw_norm2;
      }
      const cxd val = chi.dot(o_t.mat * chi);
      const double shot = prep.shot_norm == PrepShotNorm::raw ? weight * val.real() : val.real();
      acc += shot;
    }
    values[static_cast<size_t>(sample)] = acc / static_cast<double>(prep.reps);
  });
  return detail::finish_samples(std::move(values), t, e.master_seed, bootstrap_resamples);
}

// delta O^R(t)^2 = sum_{S subset of R} p_S (d+1)^{-|S|}.
inline double region_variance_exact(const RegionDistribution& r, u32 region) {
  if (region & ~r.chain.full_mask())
    throw std::invalid_argument("region_variance_exact: region has bits outside the chain");
  const double w = 1.0 / static_cast<double>(r.chain.local_dim + 1);
  double acc = 0.0;
  u32 s = region;
  while (true) {
    acc += r.p[s] * std::pow(w, std::popcount(s));
    if (s == 0) break;
    s = (s - 1) & region;
  }
  return acc;
}

// Monte-Carlo variance of the region-restricted observable
// O^R = tr_{complement}(O) / d^{N-|R|} over product states on R alone.
inline QuenchSamples mc_region_variance(const DenseOperator& o_t, u32 region,
                                        const EnsembleSpec& e, int m, int n_threads = 1,
                                        int bootstrap_resamples = kDefaultBootstrapResamples,
                                        double t = 0.0) {
  if (m < 2) throw std::invalid_argument("mc_region_variance: need M >= 2");
  if (e.kind != EnsembleKind::haar_product)
    throw std::invalid_argument("mc_region_variance: haar_product ensemble required");
  if (region & ~o_t.chain.full_mask())
    throw std::invalid_argument("mc_region_variance: region has bits outside the chain");
  const int n_kept = std::popcount(region);
  DenseOperator reduced = partial_trace(o_t, region);
  reduced.mat /= static_cast<double>(pow_i64(o_t.chain.local_dim, o_t.chain.n_sites - n_kept));
  reduced.hermitian = o_t.hermitian;
  std::vector<int> region_sites;
  for (int n = 0; n < o_t.chain.n_sites; ++n)
    if (region & (u32{1} << n)) region_sites.push_back(n);
  const int d = o_t.chain.local_dim;
  std::vector<double> values(static_cast<size_t>(m));
  parallel_for(m, n_threads, [&](i64 sample) {
    Vector state = Vector::Ones(1);
    for (size_t k = region_sites.size(); k-- > 0;) {
      RngStream stream(e.master_seed, static_cast<u64>(sample),
                       static_cast<u64>(region_sites[k]));
      state = kron(state, sample_haar_vector(d, stream));
    }
    values[static_cast<size_t>(sample)] =
        expectation(reduced, StateVector{reduced.chain, std::move(state)});
  });
  return detail::finish_samples(std::move(values), t, e.master_seed, bootstrap_resamples);
}

// Inclusion-exclusion over the subsets of R:
// p_R = (d+1)^{|R|} sum_{Q subset of R} (-1)^{|R|-|Q|} delta O^Q(t)^2.
// The map must provide every subset, including Q = 0 (whose variance is 0 by
// convention: the fully averaged value does not fluctuate).
inline double recover_region_value(const std::unordered_map<u32, double>& variances, u32 region,
                                   int d) {
  const int r_size = std::popcount(region);
  double acc = 0.0;
  u32 q = region;
  while (true) {
    const auto it = variances.find(q);
    if (it == variances.end())
      throw std::invalid_argument("recover_region_value: missing subset variance");
    const int sign = ((r_size - std::popcount(q)) % 2 == 0) ? 1 : -1;
    acc += sign * it->second;
    if (q == 0) break;
    q = (q - 1) & region;
  }
  return std::pow(static_cast<double>(d + 1), r_size) * acc;
}

// Exact variance under a clustered ensemble: every block that meets the
// string's support contributes (d^{|B|} + 1)^{-1}; untouched blocks
// contribute 1. Cross-string terms vanish by per-site orthogonality.
inline double exact_variance_clustered(const RegionDistribution& r,
                                       const std::vector<std::vector<int>>& blocks) {
  EnsembleSpec probe;
  probe.kind = EnsembleKind::clustered_haar;
  probe.blocks = blocks;
  probe.validate(r.chain);
  std::vector<u32> block_masks;
  for (const auto& block : blocks) {
    u32 mask = 0;
    for (int n : block) mask |= u32{1} << n;
    block_masks.push_back(mask);
  }
  double acc = 0.0;
  for (u32 region = 0; region < r.p.size(); ++region) {
    if (r.p[region] == 0.0) continue;
    double weight = 1.0;
    for (size_t k = 0; k < block_masks.size(); ++k)
      if (region & block_masks[k])
        weight /= static_cast<double>(pow_i64(r.chain.local_dim,
                                              static_cast<int>(blocks[k].size())) + 1);
    acc += r.p[region] * weight;
  }
  return acc;
}

// Distribution of the number of blocks a string touches: the size
// distribution after coarse-graining sites into clusters.
inline std::vector<double> coarse_grained_sizes(const RegionDistribution& r,
                                                const std::vector<std::vector<int>>& blocks) {
  EnsembleSpec probe;
  probe.kind = EnsembleKind::clustered_haar;
  probe.blocks = blocks;
  probe.validate(r.chain);
  std::vector<u32> block_masks;
  for (const auto& block : blocks) {
    u32 mask = 0;
    for (int n : block) mask |= u32{1} << n;
    block_masks.push_back(mask);
  }
  std::vector<double> q(blocks.size() + 1, 0.0);
  for (u32 region = 0; region < r.p.size(); ++region) {
    int touched = 0;
    for (u32 mask : block_masks)
      if (region & mask) ++touched;
    q[static_cast<size_t>(touched)] += r.p[region];
  }
  return q;
}

}
