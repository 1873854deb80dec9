#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "opsize/chain.hpp"

namespace opsize {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Single-site operator basis: d^2 - 1 traceless Hermitian matrices with
// tr(sigma_a sigma_b) = d * delta_ab, so each has the same norm as the
// identity. For d = 2 these are exactly the Pauli matrices in x, y, z order.
// For d > 2 they are the generalized Gell-Mann matrices rescaled by
// sqrt(d/2), ordered: all symmetric pairs (j < k, lexicographic), then all
// antisymmetric pairs (same order), then the d - 1 diagonal matrices.
struct SiteBasis {
  int local_dim = 2;
  std::vector<Matrix> matrices;

  const Matrix& letter(int a) const { return matrices.at(static_cast<size_t>(a) - 1); }
  int n_letters() const { return static_cast<int>(matrices.size()); }
};

inline SiteBasis site_basis(int d) {
  if (d < 2) throw std::invalid_argument("site_basis: local dimension must be >= 2");
  SiteBasis basis;
  basis.local_dim = d;
  const double scale = std::sqrt(d / 2.0);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Matrix m = Matrix::Zero(d, d);
      m(j, k) = scale;
      m(k, j) = scale;
      basis.matrices.push_back(m);
    }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Matrix m = Matrix::Zero(d, d);
      m(j, k) = cxd(0.0, -scale);
      m(k, j) = cxd(0.0, scale);
      basis.matrices.push_back(m);
    }
  for (int l = 1; l < d; ++l) {
    Matrix m = Matrix::Zero(d, d);
    const double w = scale * std::sqrt(2.0 / (l * (l + 1.0)));
    for (int mm = 0; mm < l; ++mm) m(mm, mm) = w;
    m(l, l) = -w * l;
    basis.matrices.push_back(m);
  }
  return basis;
}

// Two-site swap: X |a>|b> = |b>|a>. Hermitian, squares to the identity, and
// ties the basis together through sum_a sigma_a x sigma_a = d X - I.
inline Matrix swap_operator(int d) {
  if (d < 2) throw std::invalid_argument("swap_operator: local dimension must be >= 2");
  Matrix x = Matrix::Zero(i64{d} * d, i64{d} * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) x(a * d + b, b * d + a) = 1.0;
  return x;
}

}
