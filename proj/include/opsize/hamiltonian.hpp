#pragma once

#include <cmath>
#include <stdexcept>

#include "opsize/dense.hpp"

namespace opsize {

// Open-boundary XYZ chain with uniform fields,
// H = sum_{n<N-1} sum_a J_a sigma_a^n sigma_a^{n+1} + sum_n sum_a h_a sigma_a^n.
// The transverse-field Ising chain is the sub-case J_x = J_y = h_y = 0.
struct SpinChainParams {
  ChainSpec chain;
  double jx = 0, jy = 0, jz = 0;
  double hx = 0, hy = 0, hz = 0;

  void validate() const {
    chain.validate();
    if (chain.n_sites < 1) throw std::invalid_argument("SpinChainParams: empty chain");
    if (chain.local_dim != 2)
      throw std::invalid_argument("SpinChainParams: spin-chain builder supports qubits only");
    for (double v : {jx, jy, jz, hx, hy, hz})
      if (!std::isfinite(v)) throw std::invalid_argument("SpinChainParams: non-finite parameter");
  }
};

inline DenseOperator build_xyz(const SpinChainParams& p) {
  p.validate();
  const ChainSpec& chain = p.chain;
  const SiteBasis basis = site_basis(2);
  const double couplings[3] = {p.jx, p.jy, p.jz};
  const double fields[3] = {p.hx, p.hy, p.hz};
  const i64 dim = chain.dim();
  Matrix h = Matrix::Zero(dim, dim);
  for (int a = 0; a < 3; ++a) {
    if (couplings[a] != 0.0) {
      const Matrix bond = kron(basis.matrices[static_cast<size_t>(a)],
                               basis.matrices[static_cast<size_t>(a)]);
      for (int n = 0; n + 1 < chain.n_sites; ++n)
        h += couplings[a] * embed_adjacent(chain, n, bond, 2).mat;
    }
    if (fields[a] != 0.0)
      for (int n = 0; n < chain.n_sites; ++n)
        h += fields[a] * embed_site(chain, n, basis.matrices[static_cast<size_t>(a)]).mat;
  }
  return DenseOperator{chain, std::move(h), true, true};
}

}
