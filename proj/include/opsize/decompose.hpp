#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "opsize/dense.hpp"

namespace opsize {

// Real Pauli-string amplitudes of a Hermitian operator,
// values[s] = d^{-N} tr(O * string(s)). Index s reads as base-d^2 digits,
// site 0 least significant, digit 0 the identity letter. With the
// tr(sigma_a sigma_b) = d delta_ab basis normalization the squared amplitudes
// sum to tr(O^2)/d^N, cached as norm2.
struct CoefficientTable {
  ChainSpec chain;
  std::vector<double> values;
  double norm2 = 0.0;
};

namespace detail {

// Per-site transform: out[a] = sum_{alpha,beta} [sigma_a]_{beta,alpha}/d *
// in[alpha + d*beta], with sigma_0 = I. Row a of T is the letter-a pairing.
inline Matrix site_transform_matrix(const SiteBasis& basis) {
  const int d = basis.local_dim;
  const int d2 = d * d;
  Matrix t = Matrix::Zero(d2, d2);
  for (int alpha = 0; alpha < d; ++alpha) t(0, alpha + d * alpha) = 1.0 / d;
  for (int a = 1; a < d2; ++a) {
    const Matrix& m = basis.letter(a);
    for (int alpha = 0; alpha < d; ++alpha)
      for (int beta = 0; beta < d; ++beta) t(a, alpha + d * beta) = m(beta, alpha) / double(d);
  }
  return t;
}

}

// Site-by-site block transform. Pass n contracts the site-n row digit
// (stride d^n) against the site-n column digit (stride D*d^n) through the
// d^2 x d^2 pairing matrix, leaving a letter digit in their place; a final
// gather pass interleaves the letter digits into the base-d^2 layout. Total
// work is O(N d^{2N}) small matrix applications, never d^{2N} full traces.
inline CoefficientTable decompose(const DenseOperator& o) {
  o.chain.require_operator_side("decompose");
  if (!o.check_hermitian())
    throw std::invalid_argument("decompose: operator is not Hermitian within tolerance");
  const int n_sites = o.chain.n_sites;
  const int d = o.chain.local_dim;
  const int d2 = d * d;
  const i64 dim = o.chain.dim();
  const i64 total = o.chain.table_dim();
  const SiteBasis basis = site_basis(d);
  const Matrix t = detail::site_transform_matrix(basis);

  std::vector<cxd> work(static_cast<size_t>(total));
  Eigen::Map<Matrix>(work.data(), dim, dim) = o.mat;

  std::vector<cxd> in(static_cast<size_t>(d2)), out(static_cast<size_t>(d2));
  for (int n = 0; n < n_sites; ++n) {
    const i64 si = pow_i64(d, n);
    const i64 sj = dim * si;
    for (i64 ob = 0; ob < total; ob += sj * d)
      for (i64 ib = ob; ib < ob + sj; ib += si * d)
        for (i64 off = ib; off < ib + si; ++off) {
          for (int beta = 0; beta < d; ++beta)
            for (int alpha = 0; alpha < d; ++alpha)
              in[static_cast<size_t>(alpha + d * beta)] = work[static_cast<size_t>(off + alpha * si + beta * sj)];
          for (int a = 0; a < d2; ++a) {
            cxd acc = 0.0;
            for (int p = 0; p < d2; ++p) acc += t(a, p) * in[static_cast<size_t>(p)];
            out[static_cast<size_t>(a)] = acc;
          }
          for (int a = 0; a < d2; ++a)
            work[static_cast<size_t>(off + (a % d) * si + (a / d) * sj)] = out[static_cast<size_t>(a)];
        }
  }

  CoefficientTable table;
  table.chain = o.chain;
  table.values.resize(static_cast<size_t>(total));
  std::vector<i64> digit_place(static_cast<size_t>(n_sites) * d2);
  for (int n = 0; n < n_sites; ++n) {
    const i64 si = pow_i64(d, n);
    for (int a = 0; a < d2; ++a)
      digit_place[static_cast<size_t>(n * d2 + a)] = (a % d) * si + (a / d) * dim * si;
  }
  std::vector<int> digits(static_cast<size_t>(n_sites), 0);
  double max_imag = 0.0, max_abs = 0.0;
  i64 src = 0;
  for (i64 s = 0; s < total; ++s) {
    const cxd v = work[static_cast<size_t>(src)];
    max_imag = std::max(max_imag, std::abs(v.imag()));
    max_abs = std::max(max_abs, std::abs(v.real()));
    table.values[static_cast<size_t>(s)] = v.real();
    table.norm2 += v.real() * v.real();
    for (int n = 0; n < n_sites; ++n) {
      const size_t base = static_cast<size_t>(n * d2);
      src -= digit_place[base + static_cast<size_t>(digits[static_cast<size_t>(n)])];
      if (++digits[static_cast<size_t>(n)] < d2) {
        src += digit_place[base + static_cast<size_t>(digits[static_cast<size_t>(n)])];
        break;
      }
      digits[static_cast<size_t>(n)] = 0;
    }
  }
  if (max_imag > kCoeffImagTol * std::max(1.0, max_abs))
    throw std::runtime_error("decompose: imaginary residue exceeds tolerance");
  return table;
}

// Literal d^{-N} tr(O * string) for every string; test oracle only.
inline CoefficientTable decompose_oracle(const DenseOperator& o) {
  o.chain.validate();
  if (o.chain.n_sites > 5)
    throw std::invalid_argument("decompose_oracle: guarded to N <= 5");
  const int d = o.chain.local_dim;
  const int d2 = d * d;
  const double dn = static_cast<double>(o.chain.dim());
  const SiteBasis basis = site_basis(d);
  const i64 total = o.chain.table_dim();
  CoefficientTable table;
  table.chain = o.chain;
  table.values.resize(static_cast<size_t>(total));
  std::vector<int> letters(static_cast<size_t>(o.chain.n_sites), 0);
  double max_imag = 0.0, max_abs = 0.0;
  for (i64 s = 0; s < total; ++s) {
    const DenseOperator m = string_to_matrix(PauliString(o.chain, letters), basis);
    const cxd tr = o.mat.transpose().cwiseProduct(m.mat).sum();
    const cxd v = tr / dn;
    max_imag = std::max(max_imag, std::abs(v.imag()));
    max_abs = std::max(max_abs, std::abs(v.real()));
    table.values[static_cast<size_t>(s)] = v.real();
    table.norm2 += v.real() * v.real();
    for (auto& digit : letters) {
      if (++digit < d2) break;
      digit = 0;
    }
  }
  if (max_imag > kCoeffImagTol * std::max(1.0, max_abs))
    throw std::runtime_error("decompose_oracle: imaginary residue exceeds tolerance");
  return table;
}

}
