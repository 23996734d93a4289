#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <vector>

#include "la/matrix.hpp"

namespace testutil {

using dhstab::la::Matrix;
using dhstab::la::Rng;

inline double diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

inline bool is_identity(const Matrix& m, double tol) {
  return diff(m, Matrix::identity(m.rows())) <= tol;
}

// Nonsymmetric matrix with prescribed singular value range [lo, hi].
inline Matrix well_conditioned(Rng& rng, std::size_t n, double lo, double hi) {
  Matrix q1 = rng.orthogonal(n);
  Matrix q2 = rng.orthogonal(n);
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = rng.uniform(lo, hi);
  return q1 * d * q2.transpose();
}

// Symmetric positive definite matrix with eigenvalues in [lo, hi].
inline Matrix spd_with_spectrum(Rng& rng, std::size_t n, double lo, double hi) {
  Matrix q = rng.orthogonal(n);
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = rng.uniform(lo, hi);
  return dhstab::la::symmetrize(q * d * q.transpose());
}

inline Matrix kron(const Matrix& p, const Matrix& q) {
  Matrix out(p.rows() * q.rows(), p.cols() * q.cols());
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j)
      for (std::size_t k = 0; k < q.rows(); ++k)
        for (std::size_t l = 0; l < q.cols(); ++l)
          out(i * q.rows() + k, j * q.cols() + l) = p(i, j) * q(k, l);
  return out;
}

// Column-major vectorization, so vec(AXB) = kron(B^T, A) vec(X).
inline Matrix vec_cm(const Matrix& m) {
  Matrix out(m.rows() * m.cols(), 1);
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (std::size_t r = 0; r < m.rows(); ++r) out(c * m.rows() + r, 0) = m(r, c);
  return out;
}

inline Matrix unvec_cm(const Matrix& v, std::size_t rows, std::size_t cols) {
  Matrix out(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) out(r, c) = v(c * rows + r, 0);
  return out;
}

// Worst distance from each expected eigenvalue to a greedily matched computed
// one; 1e300 when the multiset sizes cannot be matched.
inline double spectrum_gap(std::vector<std::complex<double>> got,
                           const std::vector<std::complex<double>>& expect) {
  if (got.size() != expect.size()) return 1e300;
  double worst = 0.0;
  for (const auto& e : expect) {
    std::size_t best = got.size();
    double bd = 1e300;
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double d = std::abs(got[i] - e);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    worst = std::max(worst, bd);
    got.erase(got.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

}  // namespace testutil
