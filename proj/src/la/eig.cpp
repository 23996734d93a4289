#include "la/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dhstab::la {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// radix-2 norm balancing (diagonal similarity); eigenvalues unchanged
void balance(Matrix& a) {
  const std::size_t n = a.rows();
  bool converged = false;
  int guard = 0;
  while (!converged && guard++ < 100) {
    converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::fabs(a(j, i));
        r += std::fabs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / 2.0;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c >= g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s && f != 1.0) {
        converged = false;
        const double gi = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= gi;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg; optionally accumulates the
// orthogonal factor into z (a = z * h * z^T).
void hessenberg(Matrix& a, Matrix* z) {
  const std::size_t n = a.rows();
  if (z) *z = Matrix::identity(n);
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double nrm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) nrm = std::hypot(nrm, a(i, k));
    if (nrm == 0.0) continue;
    const double alpha = a(k + 1, k) >= 0.0 ? -nrm : nrm;
    double vss = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k) - (i == k + 1 ? alpha : 0.0);
      vss += v[i] * v[i];
    }
    if (vss == 0.0) continue;
    const double beta = 2.0 / vss;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    if (z) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) s += (*z)(i, j) * v[j];
        s *= beta;
        for (std::size_t j = k + 1; j < n; ++j) (*z)(i, j) -= s * v[j];
      }
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    a(k + 1, k) = alpha;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix; converges h to real
// Schur form. z (if given) accumulates the similarity on the right.
void francis(Matrix& h, Matrix* z) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  double hnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i ? i - 1 : 0); j < n; ++j) hnorm += std::fabs(h(i, j));
  if (hnorm == 0.0) return;

  auto negligible = [&](std::size_t i) {
    double tol = kEps * (std::fabs(h(i - 1, i - 1)) + std::fabs(h(i, i)));
    if (tol == 0.0) tol = kEps * hnorm;
    return std::fabs(h(i, i - 1)) <= tol;
  };

  std::size_t hi = n - 1;
  int iter = 0;
  long total = 0;
  const long total_cap = 60 * static_cast<long>(n);
  while (true) {
    // deflate converged trailing blocks
    while (hi > 0 && negligible(hi)) {
      h(hi, hi - 1) = 0.0;
      --hi;
      iter = 0;
    }
    if (hi == 0) break;
    std::size_t lo = hi;
    while (lo > 0 && !negligible(lo)) --lo;
    if (lo > 0) h(lo, lo - 1) = 0.0;
    if (lo == hi) {  // isolated 1x1
      if (hi == 0) break;
      --hi;
      iter = 0;
      continue;
    }
    if (lo + 1 == hi) {  // 2x2 block: leave for extraction
      if (hi < 2) break;
      hi -= 2;
      iter = 0;
      continue;
    }
    if (++total > total_cap || ++iter > 40)
      throw EigFailure("eig: QR iteration did not converge");

    double tsum = h(hi - 1, hi - 1) + h(hi, hi);
    double tdet = h(hi - 1, hi - 1) * h(hi, hi) - h(hi - 1, hi) * h(hi, hi - 1);
    if (iter % 10 == 0) {
      const double s = std::fabs(h(hi, hi - 1)) + std::fabs(h(hi - 1, hi - 2));
      tsum = 3.0 * s;
      tdet = 2.25 * s * s;
    }

    for (std::size_t k = lo; k <= hi - 1; ++k) {
      double p, q, r;
      const bool three = k <= hi - 2;
      if (k == lo) {
        const double x = h(lo, lo), y = h(lo + 1, lo);
        p = x * x + h(lo, lo + 1) * y - tsum * x + tdet;
        q = y * (x + h(lo + 1, lo + 1) - tsum);
        r = three ? y * h(lo + 2, lo + 1) : 0.0;
      } else {
        p = h(k, k - 1);
        q = h(k + 1, k - 1);
        r = three ? h(k + 2, k - 1) : 0.0;
      }
      const double scale = std::fabs(p) + std::fabs(q) + std::fabs(r);
      if (scale == 0.0) continue;
      p /= scale;
      q /= scale;
      r /= scale;
      const double nrm = std::sqrt(p * p + q * q + r * r);
      const double alpha = p >= 0.0 ? -nrm : nrm;
      if (alpha == 0.0) continue;
      double v0 = p - alpha, v1 = q, v2 = r;
      const double vss = v0 * v0 + v1 * v1 + v2 * v2;
      if (vss == 0.0) continue;
      const double beta = 2.0 / vss;
      const std::size_t rows = three ? 3 : 2;
      const std::size_t cstart = (k == lo) ? lo : k - 1;
      // left application to rows k..k+rows-1
      for (std::size_t j = cstart; j < n; ++j) {
        double s = v0 * h(k, j) + v1 * h(k + 1, j);
        if (rows == 3) s += v2 * h(k + 2, j);
        s *= beta;
        h(k, j) -= s * v0;
        h(k + 1, j) -= s * v1;
        if (rows == 3) h(k + 2, j) -= s * v2;
      }
      // right application to columns k..k+rows-1
      const std::size_t rend = std::min(hi, k + 3);
      for (std::size_t i = 0; i <= rend; ++i) {
        double s = v0 * h(i, k) + v1 * h(i, k + 1);
        if (rows == 3) s += v2 * h(i, k + 2);
        s *= beta;
        h(i, k) -= s * v0;
        h(i, k + 1) -= s * v1;
        if (rows == 3) h(i, k + 2) -= s * v2;
      }
      if (z) {
        for (std::size_t i = 0; i < n; ++i) {
          double s = v0 * (*z)(i, k) + v1 * (*z)(i, k + 1);
          if (rows == 3) s += v2 * (*z)(i, k + 2);
          s *= beta;
          (*z)(i, k) -= s * v0;
          (*z)(i, k + 1) -= s * v1;
          if (rows == 3) (*z)(i, k + 2) -= s * v2;
        }
      }
      if (k > lo) {
        h(k + 1, k - 1) = 0.0;
        if (three) h(k + 2, k - 1) = 0.0;
      }
    }
  }
}

std::vector<std::complex<double>> quasi_tri_eigenvalues(const Matrix& t) {
  const std::size_t n = t.rows();
  std::vector<std::complex<double>> ev;
  ev.reserve(n);
  std::size_t i = 0;
  while (i < n) {
    if (i + 1 == n || t(i + 1, i) == 0.0) {
      ev.emplace_back(t(i, i), 0.0);
      ++i;
    } else {
      const double p = 0.5 * (t(i, i) - t(i + 1, i + 1));
      const double disc = p * p + t(i, i + 1) * t(i + 1, i);
      const double base = t(i + 1, i + 1) + p;  // = (t_ii + t_jj)/2
      if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        ev.emplace_back(base + s, 0.0);
        ev.emplace_back(base - s, 0.0);
      } else {
        const double s = std::sqrt(-disc);
        ev.emplace_back(base, s);
        ev.emplace_back(base, -s);
      }
      i += 2;
    }
  }
  return ev;
}

}  // namespace

double Spectrum::abscissa() const {
  double a = -std::numeric_limits<double>::infinity();
  for (const auto& v : values) a = std::max(a, v.real());
  return a;
}

SchurResult schur(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("schur: not square");
  a.require_finite("schur");
  Matrix t = a;
  Matrix z;
  hessenberg(t, &z);
  francis(t, &z);
  return {std::move(t), std::move(z)};
}

Spectrum eig(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("eig: not square");
  a.require_finite("eig");
  Matrix h = a;
  balance(h);
  hessenberg(h, nullptr);
  francis(h, nullptr);
  return {quasi_tri_eigenvalues(h)};
}

double spectral_abscissa(const Matrix& a) { return eig(a).abscissa(); }

EigPairs eig_pairs(const Matrix& a) {
  using C = std::complex<double>;
  const Spectrum sp = eig(a);
  const std::size_t n = a.rows();
  EigPairs out;
  out.values = sp.values;
  const double scale = std::max(a.norm_fro(), 1e-300);
  for (const C& lam : sp.values) {
    // inverse iteration on (a - lambda I); tiny pivots are floored so the
    // nearly singular solve acts as a projector onto the eigenvector
    std::vector<C> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m[i * n + j] = C(a(i, j), 0.0) - (i == j ? lam : C(0.0, 0.0));
    std::vector<std::size_t> piv(n);
    const double floor_piv = kEps * scale;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(m[i * n + k]) > std::abs(m[p * n + k])) p = i;
      piv[k] = p;
      if (p != k)
        for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
      if (std::abs(m[k * n + k]) < floor_piv) m[k * n + k] = C(floor_piv, 0.0);
      for (std::size_t i = k + 1; i < n; ++i) {
        m[i * n + k] /= m[k * n + k];
        const C lik = m[i * n + k];
        for (std::size_t j = k + 1; j < n; ++j) m[i * n + j] -= lik * m[k * n + j];
      }
    }
    std::vector<C> v(n, C(1.0, 0.0));
    for (int pass = 0; pass < 3; ++pass) {
      for (std::size_t k = 0; k < n; ++k) {
        if (piv[k] != k) std::swap(v[k], v[piv[k]]);
        for (std::size_t i = k + 1; i < n; ++i) v[i] -= m[i * n + k] * v[k];
      }
      for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = k + 1; j < n; ++j) v[k] -= m[k * n + j] * v[j];
        v[k] /= m[k * n + k];
      }
      double nrm = 0.0;
      for (const C& x : v) nrm += std::norm(x);
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) break;
      for (C& x : v) x /= nrm;
    }
    out.vectors.push_back(std::move(v));
  }
  return out;
}

SymEig symmetric_eig(const Matrix& s) {
  if (!s.square()) throw std::invalid_argument("symmetric_eig: not square");
  s.require_finite("symmetric_eig");
  const std::size_t n = s.rows();
  Matrix a = symmetrize(s);
  Matrix v = Matrix::identity(n);
  if (n <= 1) return {{n ? a(0, 0) : 0.0}, std::move(v)};
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off == 0.0) break;
    const double thresh = (sweep < 3) ? 0.2 * off / (n * n) : 0.0;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double small = 100.0 * std::fabs(apq);
        if (sweep > 3 && std::fabs(a(p, p)) + small == std::fabs(a(p, p)) &&
            std::fabs(a(q, q)) + small == std::fabs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        if (apq * apq <= thresh) continue;
        rotated = true;
        const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - sn * aiq;
          a(i, q) = sn * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj - sn * aqj;
          a(q, j) = sn * apj + c * aqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - sn * viq;
          v(i, q) = sn * vip + c * viq;
        }
      }
    }
    if (!rotated && sweep >= 3) break;
  }
  SymEig out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  out.v = std::move(v);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < n; ++j)
      if (out.values[j] < out.values[best]) best = j;
    if (best != i) {
      std::swap(out.values[i], out.values[best]);
      for (std::size_t t = 0; t < n; ++t) std::swap(out.v(t, i), out.v(t, best));
    }
  }
  return out;
}

double min_eig_sym(const Matrix& s) {
  return symmetric_eig(s).values.front();
}

double max_eig_sym(const Matrix& s) {
  return symmetric_eig(s).values.back();
}

Matrix sym_sqrt(const Matrix& s) {
  SymEig f = symmetric_eig(s);
  const std::size_t n = s.rows();
  Matrix out(n, n);
  for (std::size_t t = 0; t < n; ++t) {
    const double r = f.values[t] > 0.0 ? std::sqrt(f.values[t]) : 0.0;
    if (r == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += r * f.v(i, t) * f.v(j, t);
  }
  return symmetrize(out);
}

Matrix spd_inverse_floored(const Matrix& s, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("spd_inverse_floored: floor must be positive");
  SymEig f = symmetric_eig(symmetrize(s));
  const std::size_t n = s.rows();
  Matrix out(n, n);
  for (std::size_t t = 0; t < n; ++t) {
    const double r = 1.0 / std::max(f.values[t], floor);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += r * f.v(i, t) * f.v(j, t);
  }
  return symmetrize(out);
}

}  // namespace dhstab::la
