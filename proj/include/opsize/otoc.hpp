#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>

#include "opsize/quench.hpp"
#include "opsize/spectral.hpp"

namespace opsize {

// Retarded-response setup: C_psi = -i <psi|[W(t2), V(t1)]|psi> theta(t2 - t1),
// with both operators evolved under the same Hamiltonian. theta(0) = 1.
struct ResponsePair {
  DenseOperator w;
  DenseOperator v;
  std::shared_ptr<const SpectralData> spectral;
  double t1 = 0.0;
  double t2 = 0.0;

  void validate() const {
    if (!spectral) throw std::invalid_argument("ResponsePair: missing spectral data");
    if (!(w.chain == v.chain) || w.mat.rows() != v.mat.rows() ||
        w.mat.rows() != spectral->eigenvectors.rows())
      throw std::invalid_argument("ResponsePair: dimension mismatch");
    if (!w.check_hermitian() || !v.check_hermitian())
      throw std::invalid_argument("ResponsePair: W and V must be Hermitian");
  }

  bool causal() const { return t2 >= t1; }
};

// K = -i [W(t2), V(t1)], Hermitian and traceless; the response is <psi|K|psi>.
inline DenseOperator response_kernel(const ResponsePair& rp) {
  rp.validate();
  const DenseOperator w_t = evolve_operator(rp.w, *rp.spectral, rp.t2);
  const DenseOperator v_t = evolve_operator(rp.v, *rp.spectral, rp.t1);
  const Matrix comm = w_t.mat * v_t.mat - v_t.mat * w_t.mat;
  return DenseOperator{rp.w.chain, cxd(0.0, -1.0) * comm, true, true};
}

inline double response(const ResponsePair& rp, const StateVector& psi) {
  rp.validate();
  if (!rp.causal()) return 0.0;
  return expectation(response_kernel(rp), psi);
}

inline StateVector sample_global_haar(const ChainSpec& chain, RngStream& stream) {
  return sample_haar_state(chain, stream);
}

// Variance of the response over global Haar states. Each state keys off
// (master_seed, sample_index, global slot); the kernel is built once.
inline QuenchSamples mc_otoc_variance(const ResponsePair& rp, int m, u64 master_seed,
                                      int n_threads = 1,
                                      int bootstrap_resamples = kDefaultBootstrapResamples) {
  if (m < 2) throw std::invalid_argument("mc_otoc_variance: need M >= 2");
  rp.validate();
  std::vector<double> values(static_cast<size_t>(m), 0.0);
  if (rp.causal()) {
    const DenseOperator kernel = response_kernel(rp);
    parallel_for(m, n_threads, [&](i64 sample) {
      RngStream stream(master_seed, static_cast<u64>(sample), kGlobalSlot);
      values[static_cast<size_t>(sample)] =
          expectation(kernel, sample_global_haar(rp.w.chain, stream));
    });
  }
  return detail::finish_samples(std::move(values), rp.t2, master_seed, bootstrap_resamples);
}

// The infinite-temperature identity: the response variance over Haar states
// equals -tr([W(t2), V(t1)]^2) / (D (D+1)) for t2 >= t1 and 0 before.
// tr(K^2) = -tr([W,V]^2) is a squared Frobenius norm, hence >= 0.
inline double exact_otoc(const ResponsePair& rp) {
  rp.validate();
  if (!rp.causal()) return 0.0;
  const DenseOperator kernel = response_kernel(rp);
  const double dim = static_cast<double>(kernel.mat.rows());
  return kernel.mat.squaredNorm() / (dim * (dim + 1.0));
}

}
