#pragma once

#include <Eigen/Dense>
#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "opsize/dense.hpp"

namespace opsize {

struct SpectralData {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;
  u64 source_hash = 0;
};

namespace detail {

inline u64 fnv1a(const void* data, size_t bytes, u64 seed = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  u64 h = seed;
  for (size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline u64 operator_hash(const DenseOperator& o) {
  u64 h = fnv1a(&o.chain.n_sites, sizeof(o.chain.n_sites));
  h = fnv1a(&o.chain.local_dim, sizeof(o.chain.local_dim), h);
  return fnv1a(o.mat.data(), sizeof(cxd) * static_cast<size_t>(o.mat.size()), h);
}

struct SpectralCache {
  std::mutex mu;
  std::unordered_map<u64, std::shared_ptr<const SpectralData>> entries;
};

inline SpectralCache& spectral_cache() {
  static SpectralCache cache;
  return cache;
}

}

inline void clear_spectral_cache() {
  auto& cache = detail::spectral_cache();
  std::lock_guard<std::mutex> lock(cache.mu);
  cache.entries.clear();
}

// Dense self-adjoint eigendecomposition, verified against reconstruction and
// unitarity gates and cached by a fingerprint of the matrix bytes. One
// Hamiltonian is typically reused across many times and samples.
inline std::shared_ptr<const SpectralData> eigendecompose(const DenseOperator& h) {
  h.chain.validate();
  if (!h.check_hermitian())
    throw std::invalid_argument("eigendecompose: matrix is not Hermitian within tolerance");
  const u64 key = detail::operator_hash(h);
  auto& cache = detail::spectral_cache();
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    auto it = cache.entries.find(key);
    if (it != cache.entries.end() && it->second->eigenvalues.size() == h.mat.rows())
      return it->second;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.mat);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: solver failed to converge");
  auto data = std::make_shared<SpectralData>();
  data->eigenvalues = solver.eigenvalues();
  data->eigenvectors = solver.eigenvectors();
  data->source_hash = key;
  const double scale = std::max(1.0, h.max_abs());
  const Matrix rebuilt = data->eigenvectors * data->eigenvalues.asDiagonal() *
                         data->eigenvectors.adjoint();
  if ((rebuilt - h.mat).cwiseAbs().maxCoeff() > kSpectralResidualTol * scale)
    throw std::runtime_error("eigendecompose: reconstruction residual exceeds tolerance");
  const Matrix gram = data->eigenvectors.adjoint() * data->eigenvectors;
  if ((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > kUnitarityTol)
    throw std::runtime_error("eigendecompose: eigenvector matrix not unitary within tolerance");
  std::lock_guard<std::mutex> lock(cache.mu);
  auto [it, inserted] = cache.entries.emplace(key, std::move(data));
  return it->second;
}

// Heisenberg evolution e^{iHt} O e^{-iHt}: conjugate into the eigenbasis,
// apply the phase e^{i(E_a - E_b)t} entrywise, conjugate back.
inline DenseOperator evolve_operator(const DenseOperator& o, const SpectralData& s, double t) {
  if (o.mat.rows() != s.eigenvectors.rows())
    throw std::invalid_argument("evolve_operator: dimension mismatch");
  if (t == 0.0) return o;
  Matrix a = s.eigenvectors.adjoint() * o.mat * s.eigenvectors;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double phase = (s.eigenvalues(i) - s.eigenvalues(j)) * t;
      a(i, j) *= cxd(std::cos(phase), std::sin(phase));
    }
  return DenseOperator{o.chain, s.eigenvectors * a * s.eigenvectors.adjoint(), o.hermitian,
                       o.traceless};
}

// Schroedinger evolution e^{-iHt} psi.
inline StateVector evolve_state(const StateVector& psi, const SpectralData& s, double t) {
  if (psi.amps.size() != s.eigenvectors.rows())
    throw std::invalid_argument("evolve_state: dimension mismatch");
  if (t == 0.0) return psi;
  Vector coeffs = s.eigenvectors.adjoint() * psi.amps;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    const double phase = -s.eigenvalues(i) * t;
    coeffs(i) *= cxd(std::cos(phase), std::sin(phase));
  }
  return StateVector{psi.chain, s.eigenvectors * coeffs};
}

}
