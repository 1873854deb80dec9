#pragma once

#include <Eigen/Dense>
#include <bit>
#include <stdexcept>
#include <vector>

#include "opsize/chain.hpp"
#include "opsize/pauli_string.hpp"
#include "opsize/rng.hpp"
#include "opsize/site_basis.hpp"
#include "opsize/tolerances.hpp"

namespace opsize {

struct DenseOperator {
  ChainSpec chain;
  Matrix mat;
  bool hermitian = false;
  bool traceless = false;

  double max_abs() const { return mat.size() == 0 ? 0.0 : mat.cwiseAbs().maxCoeff(); }

  bool check_hermitian(double rel_tol = kHermitianTol) const {
    const double scale = std::max(1.0, max_abs());
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
  }

  bool check_traceless(double rel_tol = kHermitianTol) const {
    const double scale = std::max(1.0, max_abs());
    return std::abs(mat.trace()) <= rel_tol * scale;
  }

  // tr(O^2) for Hermitian O equals the squared Frobenius norm.
  double hs_norm2() const { return mat.squaredNorm(); }
};

struct StateVector {
  ChainSpec chain;
  Vector amps;

  void validate() const {
    chain.validate();
    if (amps.size() != chain.dim())
      throw std::invalid_argument("StateVector: amplitude count does not match chain");
    if (std::abs(amps.norm() - 1.0) > kStateNormTol)
      throw std::invalid_argument("StateVector: not normalized");
  }
};

// kron(A, B) indexes B as the fast factor, so folding a chain from the last
// site down to site 0 leaves site 0 as the least significant digit. Every
// tensor assembly in the library goes through this one convention.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline DenseOperator string_to_matrix(const PauliString& s, const SiteBasis& basis) {
  if (s.chain.local_dim != basis.local_dim)
    throw std::invalid_argument("string_to_matrix: basis dimension mismatch");
  const int d = basis.local_dim;
  const Matrix eye = Matrix::Identity(d, d);
  Matrix m = Matrix::Identity(1, 1);
  for (int n = s.chain.n_sites - 1; n >= 0; --n) {
    const int a = s.letters[static_cast<size_t>(n)];
    m = kron(m, a == 0 ? eye : basis.letter(a));
  }
  return DenseOperator{s.chain, std::move(m), true, s.support != 0};
}

inline cxd hs_trace_inner(const DenseOperator& a, const DenseOperator& b) {
  if (!(a.chain == b.chain) || a.mat.rows() != b.mat.rows())
    throw std::invalid_argument("hs_trace_inner: dimension mismatch");
  return a.mat.conjugate().cwiseProduct(b.mat).sum();
}

namespace detail {

// Indices of the subspace selected by `mask`, expanded to their positions in
// the full index space (remaining digits zero).
inline std::vector<i64> expand_table(const ChainSpec& chain, u32 mask) {
  const int d = chain.local_dim;
  std::vector<int> sites;
  for (int n = 0; n < chain.n_sites; ++n)
    if (mask & (u32{1} << n)) sites.push_back(n);
  std::vector<i64> strides(sites.size());
  for (size_t k = 0; k < sites.size(); ++k) strides[k] = pow_i64(d, sites[k]);
  const i64 sub_dim = pow_i64(d, static_cast<int>(sites.size()));
  std::vector<i64> table(static_cast<size_t>(sub_dim));
  std::vector<int> digits(sites.size(), 0);
  i64 cur = 0;
  for (i64 x = 0; x < sub_dim; ++x) {
    table[static_cast<size_t>(x)] = cur;
    for (size_t k = 0; k < sites.size(); ++k) {
      cur += strides[k];
      if (++digits[k] < d) break;
      digits[k] = 0;
      cur -= strides[k] * d;
    }
  }
  return table;
}

}

// Raw partial trace over the complement of `keep`; no normalization. Kept
// sites retain their relative order. An empty keep set yields the 1x1 matrix
// [tr(O)] on a zero-site chain.
inline DenseOperator partial_trace(const DenseOperator& o, u32 keep) {
  o.chain.validate();
  if (keep & ~o.chain.full_mask())
    throw std::invalid_argument("partial_trace: keep mask has bits outside the chain");
  const u32 drop = o.chain.full_mask() & ~keep;
  const auto kept_idx = detail::expand_table(o.chain, keep);
  const auto drop_idx = detail::expand_table(o.chain, drop);
  const i64 dk = static_cast<i64>(kept_idx.size());
  ChainSpec out_chain{std::popcount(keep), o.chain.local_dim, o.chain.operator_site_cap};
  Matrix out = Matrix::Zero(dk, dk);
  for (i64 col = 0; col < dk; ++col)
    for (i64 row = 0; row < dk; ++row) {
      cxd acc = 0.0;
      for (i64 c : drop_idx) acc += o.mat(kept_idx[static_cast<size_t>(row)] + c,
                                          kept_idx[static_cast<size_t>(col)] + c);
      out(row, col) = acc;
    }
  return DenseOperator{out_chain, std::move(out), o.hermitian, false};
}

// Operator acting as `local` on `width` adjacent sites starting at `first`,
// identity elsewhere.
inline DenseOperator embed_adjacent(const ChainSpec& chain, int first, const Matrix& local,
                                    int width) {
  chain.require_site(first, "embed_adjacent");
  chain.require_site(first + width - 1, "embed_adjacent");
  const int d = chain.local_dim;
  if (local.rows() != pow_i64(d, width) || local.cols() != local.rows())
    throw std::invalid_argument("embed_adjacent: local block has wrong dimension");
  const Matrix eye = Matrix::Identity(d, d);
  Matrix m = Matrix::Identity(1, 1);
  for (int n = chain.n_sites - 1; n >= 0;) {
    if (n == first + width - 1) {
      m = kron(m, local);
      n -= width;
    } else {
      m = kron(m, eye);
      --n;
    }
  }
  return DenseOperator{chain, std::move(m), false, false};
}

inline DenseOperator embed_site(const ChainSpec& chain, int site, const Matrix& local) {
  return embed_adjacent(chain, site, local, 1);
}

// GUE-style draw: invariant under conjugation, iid real coefficients on any
// trace-orthonormal Hermitian basis. Options project out the trace and fix
// the normalization tr(O^2) = d^N used throughout.
inline DenseOperator random_hermitian(const ChainSpec& chain, RngStream& stream,
                                      bool make_traceless = true, bool normalize = true) {
  chain.validate();
  const i64 dim = chain.dim();
  Matrix a(dim, dim);
  for (i64 j = 0; j < dim; ++j)
    for (i64 i = 0; i < dim; ++i) a(i, j) = stream.gaussian_cx();
  Matrix h = 0.5 * (a + a.adjoint());
  if (make_traceless) h -= (h.trace() / static_cast<double>(dim)) * Matrix::Identity(dim, dim);
  DenseOperator out{chain, std::move(h), true, make_traceless};
  if (normalize) {
    const double n2 = out.hs_norm2();
    if (n2 <= 0.0) throw std::runtime_error("random_hermitian: degenerate draw");
    out.mat *= std::sqrt(static_cast<double>(dim) / n2);
  }
  return out;
}

}
