#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "opsize/dense.hpp"
#include "opsize/pauli_string.hpp"
#include "opsize/rng.hpp"
#include "opsize/spectral.hpp"

namespace opsize {

// stream slot for deriving per-sample measurement seeds
inline constexpr u64 kShotSlot = 0x5807ULL;

struct ShotPlan {
  i64 shots = 1;
  u64 seed = 0;

  void validate() const {
    if (shots < 1) throw std::invalid_argument("ShotPlan: need at least one shot");
  }
};

struct ShotEstimate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  i64 shots = 0;
};

namespace detail {

inline ShotEstimate sample_outcomes(const std::vector<double>& outcomes,
                                    const std::vector<double>& probs, const ShotPlan& plan) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  // Born weights can drift a hair from 1; the inverse-CDF draw clamps.
  RngStream stream(plan.seed, 0, kGlobalSlot);
  double sum = 0.0, sum2 = 0.0;
  for (i64 shot = 0; shot < plan.shots; ++shot) {
    const double u = stream.uniform01() * acc;
    const size_t idx = static_cast<size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const double v = outcomes[std::min(idx, outcomes.size() - 1)];
    sum += v;
    sum2 += v * v;
  }
  ShotEstimate est;
  est.shots = plan.shots;
  est.mean = sum / static_cast<double>(plan.shots);
  if (plan.shots > 1) {
    const double var =
        (sum2 - sum * sum / static_cast<double>(plan.shots)) / static_cast<double>(plan.shots - 1);
    est.stderr_of_mean = std::sqrt(std::max(0.0, var) / static_cast<double>(plan.shots));
  }
  return est;
}

// In-place local matrix application on one site of a state vector.
inline void apply_local(Vector& amps, const ChainSpec& chain, int site, const Matrix& m) {
  const int d = chain.local_dim;
  const i64 stride = pow_i64(d, site);
  const i64 dim = amps.size();
  Vector in(d), out(d);
  for (i64 block = 0; block < dim; block += stride * d)
    for (i64 off = block; off < block + stride; ++off) {
      for (int a = 0; a < d; ++a) in(a) = amps(off + a * stride);
      out.noalias() = m * in;
      for (int a = 0; a < d; ++a) amps(off + a * stride) = out(a);
    }
}

}

// Simulated projective measurement of O in state psi: k draws from the Born
// distribution over O's eigenvalues, sample mean and k^{-1/2} stderr.
// General operators pay one (cached) eigendecomposition.
inline ShotEstimate shot_noise_expectation(const DenseOperator& o, const StateVector& psi,
                                           const ShotPlan& plan) {
  plan.validate();
  if (o.mat.rows() != psi.amps.size())
    throw std::invalid_argument("shot_noise_expectation: dimension mismatch");
  const auto spectral = eigendecompose(o);
  const Vector proj = spectral->eigenvectors.adjoint() * psi.amps;
  std::vector<double> outcomes(static_cast<size_t>(proj.size()));
  std::vector<double> probs(static_cast<size_t>(proj.size()));
  for (i64 i = 0; i < proj.size(); ++i) {
    outcomes[static_cast<size_t>(i)] = spectral->eigenvalues(i);
    probs[static_cast<size_t>(i)] = std::norm(proj(i));
  }
  return detail::sample_outcomes(outcomes, probs, plan);
}

// Pauli-string measurement path: rotate each supported site into the letter's
// eigenbasis, then outcomes are products of single-site eigenvalues; no
// global diagonalization.
inline ShotEstimate shot_noise_expectation(const PauliString& s, const SiteBasis& basis,
                                           const StateVector& psi, const ShotPlan& plan) {
  plan.validate();
  if (s.chain.local_dim != basis.local_dim)
    throw std::invalid_argument("shot_noise_expectation: basis dimension mismatch");
  if (psi.amps.size() != s.chain.dim())
    throw std::invalid_argument("shot_noise_expectation: dimension mismatch");
  const int d = s.chain.local_dim;
  Vector rotated = psi.amps;
  std::vector<Eigen::VectorXd> site_eigs(static_cast<size_t>(s.chain.n_sites));
  for (int n = 0; n < s.chain.n_sites; ++n) {
    const int a = s.letters[static_cast<size_t>(n)];
    if (a == 0) {
      site_eigs[static_cast<size_t>(n)] = Eigen::VectorXd::Ones(d);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(basis.letter(a));
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("shot_noise_expectation: site diagonalization failed");
    site_eigs[static_cast<size_t>(n)] = solver.eigenvalues();
    detail::apply_local(rotated, s.chain, n, solver.eigenvectors().adjoint());
  }
  const i64 dim = s.chain.dim();
  std::vector<double> outcomes(static_cast<size_t>(dim));
  std::vector<double> probs(static_cast<size_t>(dim));
  for (i64 x = 0; x < dim; ++x) {
    double val = 1.0;
    i64 rest = x;
    for (int n = 0; n < s.chain.n_sites; ++n) {
      val *= site_eigs[static_cast<size_t>(n)](static_cast<int>(rest % d));
      rest /= d;
    }
    outcomes[static_cast<size_t>(x)] = val;
    probs[static_cast<size_t>(x)] = std::norm(rotated(x));
  }
  return detail::sample_outcomes(outcomes, probs, plan);
}

}
