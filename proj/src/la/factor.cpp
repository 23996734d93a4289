#include "la/factor.hpp"

#include <cmath>

namespace dhstab::la {

LuFactors lu_factor(Matrix a) {
  if (!a.square()) throw std::invalid_argument("lu_factor: not square");
  const std::size_t n = a.rows();
  LuFactors f;
  f.piv.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::fabs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > best) {
        best = std::fabs(a(i, k));
        p = i;
      }
    f.piv[k] = static_cast<int>(p);
    if (p != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
    if (a(k, k) == 0.0) {
      f.singular = true;
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      const double lik = a(i, k);
      if (lik == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
    }
  }
  f.lu = std::move(a);
  return f;
}

Matrix lu_solve(const LuFactors& f, Matrix b) {
  if (f.singular) throw std::runtime_error("lu_solve: singular matrix");
  const std::size_t n = f.lu.rows();
  if (b.rows() != n) throw std::invalid_argument("lu_solve: shape mismatch");
  const std::size_t m = b.cols();
  // The packed factors live in fully pivoted row order, so all interchanges
  // must hit b before the triangular solves.
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = static_cast<std::size_t>(f.piv[k]);
    if (p != k)
      for (std::size_t j = 0; j < m; ++j) std::swap(b(k, j), b(p, j));
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = k + 1; i < n; ++i) {
      const double lik = f.lu(i, k);
      if (lik == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) b(i, j) -= lik * b(k, j);
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) b(k, j) /= f.lu(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      const double uik = f.lu(i, k);
      if (uik == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) b(i, j) -= uik * b(k, j);
    }
  }
  return b;
}

Matrix solve(const Matrix& a, const Matrix& b) { return lu_solve(lu_factor(a), b); }

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

CholFactors cholesky(const Matrix& s) {
  if (!s.square()) throw std::invalid_argument("cholesky: not square");
  const std::size_t n = s.rows();
  CholFactors f;
  f.l = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= f.l(j, k) * f.l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return f;  // ok stays false
    f.l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= f.l(i, k) * f.l(j, k);
      f.l(i, j) = v / f.l(j, j);
    }
  }
  f.ok = true;
  return f;
}

Matrix chol_solve(const CholFactors& f, Matrix b) {
  if (!f.ok) throw std::runtime_error("chol_solve: factorization failed");
  const std::size_t n = f.l.rows();
  if (b.rows() != n) throw std::invalid_argument("chol_solve: shape mismatch");
  const std::size_t m = b.cols();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      double v = b(k, j);
      for (std::size_t i = 0; i < k; ++i) v -= f.l(k, i) * b(i, j);
      b(k, j) = v / f.l(k, k);
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      double v = b(k, j);
      for (std::size_t i = k + 1; i < n; ++i) v -= f.l(i, k) * b(i, j);
      b(k, j) = v / f.l(k, k);
    }
  }
  return b;
}

Matrix spd_inverse(const Matrix& s) {
  CholFactors f = cholesky(s);
  if (!f.ok) throw std::runtime_error("spd_inverse: matrix not positive definite");
  return symmetrize(chol_solve(f, Matrix::identity(s.rows())));
}

QrFactors qr(const Matrix& a) {
  const std::size_t n = a.rows(), m = a.cols();
  Matrix r = a;
  Matrix q = Matrix::identity(n);
  std::vector<double> v(n);
  const std::size_t steps = std::min(m, n ? n - 1 : 0);
  for (std::size_t k = 0; k < steps; ++k) {
    double nrm = 0.0;
    for (std::size_t i = k; i < n; ++i) nrm += r(i, k) * r(i, k);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) continue;
    const double alpha = r(k, k) >= 0.0 ? -nrm : nrm;
    double vss = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      v[i] = r(i, k) - (i == k ? alpha : 0.0);
      vss += v[i] * v[i];
    }
    if (vss == 0.0) continue;
    const double beta = 2.0 / vss;
    // r <- (I - beta v v^T) r
    for (std::size_t j = k; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += v[i] * r(i, j);
      s *= beta;
      for (std::size_t i = k; i < n; ++i) r(i, j) -= s * v[i];
    }
    // q <- q (I - beta v v^T)
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k; j < n; ++j) s += q(i, j) * v[j];
      s *= beta;
      for (std::size_t j = k; j < n; ++j) q(i, j) -= s * v[j];
    }
  }
  // clean the triangle
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < std::min(i, m); ++j) r(i, j) = 0.0;
  return {std::move(q), std::move(r)};
}

}  // namespace dhstab::la
