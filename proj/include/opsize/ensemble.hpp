#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "opsize/dense.hpp"
#include "opsize/rng.hpp"

namespace opsize {

enum class EnsembleKind { haar_product, finite_product, clustered_haar };

// Unentangled initial-state ensemble: independent per-site Haar states, a
// finite per-site state list with probabilities, or independent Haar states
// on contiguous blocks. All draws are keyed by (master_seed, sample_index,
// site-or-block index), so a sample is reproducible in isolation.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::haar_product;
  std::vector<std::pair<double, Vector>> finite_states;
  std::vector<std::vector<int>> blocks;
  u64 master_seed = 0;

  void validate(const ChainSpec& chain) const {
    chain.validate();
    if (kind == EnsembleKind::finite_product) {
      if (finite_states.empty())
        throw std::invalid_argument("EnsembleSpec: finite_product needs at least one state");
      double total = 0.0;
      for (const auto& [prob, state] : finite_states) {
        if (prob < 0.0) throw std::invalid_argument("EnsembleSpec: negative probability");
        if (state.size() != chain.local_dim)
          throw std::invalid_argument("EnsembleSpec: finite state has wrong local dimension");
        if (std::abs(state.norm() - 1.0) > kStateNormTol)
          throw std::invalid_argument("EnsembleSpec: finite state not normalized");
        total += prob;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("EnsembleSpec: probabilities must sum to 1");
    } else if (kind == EnsembleKind::clustered_haar) {
      std::vector<int> seen(static_cast<size_t>(chain.n_sites), 0);
      for (const auto& block : blocks) {
        if (block.empty()) throw std::invalid_argument("EnsembleSpec: empty block");
        for (size_t k = 0; k < block.size(); ++k) {
          chain.require_site(block[k], "EnsembleSpec");
          if (k > 0 && block[k] != block[k - 1] + 1)
            throw std::invalid_argument("EnsembleSpec: blocks must be contiguous");
          ++seen[static_cast<size_t>(block[k])];
        }
      }
      for (int n = 0; n < chain.n_sites; ++n)
        if (seen[static_cast<size_t>(n)] != 1)
          throw std::invalid_argument("EnsembleSpec: blocks must partition the sites exactly");
    }
  }
};

// Gaussian vector, normalized: Haar on the unit sphere for any dim.
inline Vector sample_haar_vector(i64 dim, RngStream& stream) {
  if (dim < 1) throw std::invalid_argument("sample_haar_vector: dimension must be >= 1");
  Vector v(dim);
  for (i64 i = 0; i < dim; ++i) v(i) = stream.gaussian_cx();
  const double n = v.norm();
  if (n <= 0.0) throw std::runtime_error("sample_haar_vector: degenerate draw");
  return v / n;
}

inline StateVector sample_haar_state(const ChainSpec& chain, RngStream& stream) {
  return StateVector{chain, sample_haar_vector(chain.dim(), stream)};
}

inline StateVector sample_initial_state(const ChainSpec& chain, const EnsembleSpec& e,
                                        u64 sample_index) {
  e.validate(chain);
  const int d = chain.local_dim;
  Vector state = Vector::Ones(1);
  switch (e.kind) {
    case EnsembleKind::haar_product:
      for (int n = chain.n_sites - 1; n >= 0; --n) {
        RngStream stream(e.master_seed, sample_index, static_cast<u64>(n));
        state = kron(state, sample_haar_vector(d, stream));
      }
      break;
    case EnsembleKind::finite_product:
      for (int n = chain.n_sites - 1; n >= 0; --n) {
        RngStream stream(e.master_seed, sample_index, static_cast<u64>(n));
        const double u = stream.uniform01();
        double acc = 0.0;
        size_t pick = e.finite_states.size() - 1;
        for (size_t i = 0; i < e.finite_states.size(); ++i) {
          acc += e.finite_states[i].first;
          if (u < acc) {
            pick = i;
            break;
          }
        }
        state = kron(state, e.finite_states[pick].second);
      }
      break;
    case EnsembleKind::clustered_haar: {
      auto blocks = e.blocks;
      std::sort(blocks.begin(), blocks.end(),
                [](const auto& a, const auto& b) { return a.front() < b.front(); });
      for (size_t k = blocks.size(); k-- > 0;) {
        RngStream stream(e.master_seed, sample_index, static_cast<u64>(k));
        state = kron(state, sample_haar_vector(pow_i64(d, static_cast<int>(blocks[k].size())),
                                               stream));
      }
      break;
    }
  }
  return StateVector{chain, std::move(state)};
}

// Noisy preparation of a target: sqrt(1-eps) psi + sqrt(eps) phi with phi a
// fresh Haar draw, renormalized. The raw (pre-normalization) squared norm is
// what the closed-form damping (1-eps)^2 weighs shots by, so it is returned
// alongside; see mc_variance_prepared.
struct PerturbedDraw {
  Vector state;
  double raw_norm2 = 1.0;
};

struct PrepErrorModel {
  double epsilon = 0.0;

  void validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
      throw std::invalid_argument("PrepErrorModel: epsilon must lie in [0, 1]");
  }
};

inline PerturbedDraw perturbed_state(const Vector& target, const PrepErrorModel& err,
                                     RngStream& stream) {
  err.validate();
  if (err.epsilon == 0.0) return {target, 1.0};
  const Vector phi = sample_haar_vector(target.size(), stream);
  Vector chi = std::sqrt(1.0 - err.epsilon) * target + std::sqrt(err.epsilon) * phi;
  const double n2 = chi.squaredNorm();
  if (n2 <= 0.0) throw std::runtime_error("perturbed_state: degenerate draw");
  return {chi / std::sqrt(n2), n2};
}

struct TwoDesignReport {
  double first_moment_residual = 0.0;
  double second_moment_residual = 0.0;
  bool first_moment_pass = false;
  bool second_moment_pass = false;
  bool pass = false;
};

// Checks the two moment conditions a finite site ensemble must satisfy to
// stand in for Haar states: sum p|psi><psi| = I/d and
// sum p (|psi><psi|)^{x2} = (X + I)/(d(d+1)).
inline TwoDesignReport verify_2design(const std::vector<std::pair<double, Vector>>& states,
                                      int d) {
  if (d < 2) throw std::invalid_argument("verify_2design: local dimension must be >= 2");
  Matrix first = Matrix::Zero(d, d);
  Matrix second = Matrix::Zero(i64{d} * d, i64{d} * d);
  for (const auto& [prob, state] : states) {
    if (state.size() != d)
      throw std::invalid_argument("verify_2design: state has wrong dimension");
    const Matrix proj = state * state.adjoint();
    first += prob * proj;
    second += prob * kron(proj, proj);
  }
  TwoDesignReport report;
  report.first_moment_residual =
      (first - Matrix::Identity(d, d) / double(d)).cwiseAbs().maxCoeff();
  const Matrix target =
      (swap_operator(d) + Matrix::Identity(i64{d} * d, i64{d} * d)) / (double(d) * (d + 1));
  report.second_moment_residual = (second - target).cwiseAbs().maxCoeff();
  report.first_moment_pass = report.first_moment_residual < kTwoDesignTol;
  report.second_moment_pass = report.second_moment_residual < kTwoDesignTol;
  report.pass = report.first_moment_pass && report.second_moment_pass;
  return report;
}

// Six single-qubit Pauli eigenstates at weight 1/6: the built-in verified
// 2-design for d = 2.
inline std::vector<std::pair<double, Vector>> pauli6_states() {
  const double w = 1.0 / 6.0;
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<std::pair<double, Vector>> states;
  Vector v(2);
  v << 1.0, 0.0;
  states.emplace_back(w, v);
  v << 0.0, 1.0;
  states.emplace_back(w, v);
  v << r, r;
  states.emplace_back(w, v);
  v << r, -r;
  states.emplace_back(w, v);
  v << r, cxd(0.0, r);
  states.emplace_back(w, v);
  v << r, cxd(0.0, -r);
  states.emplace_back(w, v);
  return states;
}

inline EnsembleSpec haar_product_ensemble(u64 master_seed) {
  EnsembleSpec e;
  e.kind = EnsembleKind::haar_product;
  e.master_seed = master_seed;
  return e;
}

inline EnsembleSpec pauli6_ensemble(u64 master_seed) {
  EnsembleSpec e;
  e.kind = EnsembleKind::finite_product;
  e.finite_states = pauli6_states();
  e.master_seed = master_seed;
  return e;
}

inline EnsembleSpec clustered_ensemble(const ChainSpec& chain, int block_size, u64 master_seed) {
  if (block_size < 1 || chain.n_sites % block_size != 0)
    throw std::invalid_argument("clustered_ensemble: block size must divide the chain length");
  EnsembleSpec e;
  e.kind = EnsembleKind::clustered_haar;
  e.master_seed = master_seed;
  for (int first = 0; first < chain.n_sites; first += block_size) {
    std::vector<int> block;
    for (int n = first; n < first + block_size; ++n) block.push_back(n);
    e.blocks.push_back(std::move(block));
  }
  return e;
}

}
