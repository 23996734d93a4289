#include "la/svd.hpp"

#include <cmath>
#include <limits>

namespace dhstab::la {

namespace {

double sign_of(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

// Golub-Kahan-Reinsch on a matrix with rows >= cols. Householder
// bidiagonalization followed by implicit-shift QR on the bidiagonal, with
// full accumulation of both orthogonal factors.
SvdResult svd_tall(const Matrix& m) {
  const std::size_t n = m.rows(), c = m.cols();
  Matrix w = m;
  std::vector<std::vector<double>> lv(c), rv(c);  // householder vectors
  std::vector<double> lb(c, 0.0), rb(c, 0.0);     // their beta factors

  for (std::size_t k = 0; k < c; ++k) {
    // left reflection clearing column k below the diagonal
    double nrm = 0.0;
    for (std::size_t i = k; i < n; ++i) nrm = std::hypot(nrm, w(i, k));
    if (nrm > 0.0) {
      const double alpha = w(k, k) >= 0.0 ? -nrm : nrm;
      std::vector<double> v(n - k);
      v[0] = w(k, k) - alpha;
      for (std::size_t i = k + 1; i < n; ++i) v[i - k] = w(i, k);
      double vss = 0.0;
      for (double x : v) vss += x * x;
      if (vss > 0.0) {
        const double beta = 2.0 / vss;
        for (std::size_t j = k; j < c; ++j) {
          double s = 0.0;
          for (std::size_t i = k; i < n; ++i) s += v[i - k] * w(i, j);
          s *= beta;
          for (std::size_t i = k; i < n; ++i) w(i, j) -= s * v[i - k];
        }
        lv[k] = std::move(v);
        lb[k] = beta;
      }
    }
    // right reflection clearing row k beyond the superdiagonal
    if (k + 2 < c) {
      double rn = 0.0;
      for (std::size_t j = k + 1; j < c; ++j) rn = std::hypot(rn, w(k, j));
      if (rn > 0.0) {
        const double alpha = w(k, k + 1) >= 0.0 ? -rn : rn;
        std::vector<double> v(c - k - 1);
        v[0] = w(k, k + 1) - alpha;
        for (std::size_t j = k + 2; j < c; ++j) v[j - k - 1] = w(k, j);
        double vss = 0.0;
        for (double x : v) vss += x * x;
        if (vss > 0.0) {
          const double beta = 2.0 / vss;
          for (std::size_t i = k; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < c; ++j) s += v[j - k - 1] * w(i, j);
            s *= beta;
            for (std::size_t j = k + 1; j < c; ++j) w(i, j) -= s * v[j - k - 1];
          }
          rv[k] = std::move(v);
          rb[k] = beta;
        }
      }
    }
  }

  std::vector<double> d(c, 0.0), e(c, 0.0);  // diagonal, superdiagonal e[k]=B(k,k+1)
  for (std::size_t k = 0; k < c; ++k) {
    d[k] = w(k, k);
    if (k + 1 < c) e[k] = w(k, k + 1);
  }

  Matrix u = Matrix::identity(n);
  for (std::size_t kk = c; kk-- > 0;) {
    if (lv[kk].empty()) continue;
    const auto& v = lv[kk];
    const double beta = lb[kk];
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = kk; i < n; ++i) s += v[i - kk] * u(i, j);
      s *= beta;
      for (std::size_t i = kk; i < n; ++i) u(i, j) -= s * v[i - kk];
    }
  }
  Matrix vt = Matrix::identity(c);
  for (std::size_t kk = c; kk-- > 0;) {
    if (rv[kk].empty()) continue;
    const auto& v = rv[kk];
    const double beta = rb[kk];
    for (std::size_t j = 0; j < c; ++j) {
      double s = 0.0;
      for (std::size_t i = kk + 1; i < c; ++i) s += v[i - kk - 1] * vt(i, j);
      s *= beta;
      for (std::size_t i = kk + 1; i < c; ++i) vt(i, j) -= s * v[i - kk - 1];
    }
  }

  double anorm = 0.0;
  for (std::size_t k = 0; k < c; ++k)
    anorm = std::max(anorm, std::fabs(d[k]) + std::fabs(e[k]));
  const double eps = std::numeric_limits<double>::epsilon();

  auto rot_cols = [](Matrix& a, std::size_t p, std::size_t q, double cc, double ss) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double x = a(i, p), z = a(i, q);
      a(i, p) = x * cc + z * ss;
      a(i, q) = z * cc - x * ss;
    }
  };

  // e[k] couples d[k] and d[k+1]; shift indexing so the classic recurrences
  // (which treat rv1[k] as the coupling of d[k-1], d[k]) apply directly.
  std::vector<double> r(c, 0.0);
  for (std::size_t k = 1; k < c; ++k) r[k] = e[k - 1];

  for (std::size_t k = c; k-- > 0;) {
    for (int iter = 0; iter < 60; ++iter) {
      bool cancel = false;
      std::size_t l = k + 1;
      while (l-- > 0) {
        if (l == 0 || std::fabs(r[l]) <= eps * anorm) {
          r[l] = 0.0;
          cancel = false;
          break;
        }
        if (std::fabs(d[l - 1]) <= eps * anorm) {
          cancel = true;
          break;
        }
      }
      if (cancel) {
        // annihilate r[l] against the vanished d[l-1]
        double cc = 0.0, ss = 1.0;
        for (std::size_t i = l; i <= k; ++i) {
          const double f = ss * r[i];
          r[i] = cc * r[i];
          if (std::fabs(f) <= eps * anorm) break;
          const double g = d[i];
          const double h = std::hypot(f, g);
          d[i] = h;
          cc = g / h;
          ss = -f / h;
          rot_cols(u, l - 1, i, cc, ss);
        }
      }
      const double z = d[k];
      std::size_t low = 0;
      for (std::size_t i = k + 1; i-- > 0;) {
        if (r[i] == 0.0) {
          low = i;
          break;
        }
      }
      if (low == k) {
        if (z < 0.0) {
          d[k] = -z;
          for (std::size_t i = 0; i < c; ++i) vt(i, k) = -vt(i, k);
        }
        break;
      }
      if (iter == 59) throw SvdFailure("svd: QR iteration did not converge");
      const std::size_t lo = low;
      const std::size_t nm = k - 1;
      double x = d[lo], y = d[nm];
      double g = r[nm], h = r[k];
      double f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
      g = std::hypot(f, 1.0);
      f = ((x - z) * (x + z) + h * (y / (f + sign_of(g, f)) - h)) / x;
      double cc = 1.0, ss = 1.0;
      for (std::size_t j = lo; j <= nm; ++j) {
        const std::size_t i = j + 1;
        g = r[i];
        y = d[i];
        h = ss * g;
        g = cc * g;
        double zz = std::hypot(f, h);
        r[j] = zz;
        cc = f / zz;
        ss = h / zz;
        f = x * cc + g * ss;
        g = g * cc - x * ss;
        h = y * ss;
        y = y * cc;
        rot_cols(vt, j, i, cc, ss);
        zz = std::hypot(f, h);
        d[j] = zz;
        if (zz != 0.0) {
          cc = f / zz;
          ss = h / zz;
        }
        f = cc * g + ss * y;
        x = cc * y - ss * g;
        rot_cols(u, j, i, cc, ss);
      }
      r[lo] = 0.0;
      r[k] = f;
      d[k] = x;
    }
  }

  // descending order; swap the paired columns along
  for (std::size_t i = 0; i < c; ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < c; ++j)
      if (d[j] > d[best]) best = j;
    if (best != i) {
      std::swap(d[i], d[best]);
      for (std::size_t t = 0; t < n; ++t) std::swap(u(t, i), u(t, best));
      for (std::size_t t = 0; t < c; ++t) std::swap(vt(t, i), vt(t, best));
    }
  }
  return {std::move(u), std::move(d), std::move(vt)};
}

}  // namespace

Matrix SvdResult::reconstruct() const {
  Matrix d(u.cols(), v.cols());
  for (std::size_t i = 0; i < s.size(); ++i) d(i, i) = s[i];
  return u * d * v.transpose();
}

SvdResult svd(const Matrix& m) {
  m.require_finite("svd");
  if (m.rows() == 0 || m.cols() == 0)
    return {Matrix::identity(m.rows()), {}, Matrix::identity(m.cols())};
  // The shift computation squares magnitudes, so pull extreme inputs back to
  // unit scale first. A power of two keeps u, v exact and is undone exactly.
  const double mx = m.max_abs();
  if (mx > 0.0 && (mx > 0x1p+200 || mx < 0x1p-200)) {
    const double s = std::exp2(static_cast<double>(-std::ilogb(mx)));
    SvdResult f = svd(m * s);
    for (double& x : f.s) x /= s;
    return f;
  }
  if (m.rows() >= m.cols()) return svd_tall(m);
  SvdResult t = svd_tall(m.transpose());
  return {std::move(t.v), std::move(t.s), std::move(t.u)};
}

double default_rank_tol(const Matrix& m, const std::vector<double>& s) {
  const double smax = s.empty() ? 0.0 : s[0];
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon() * smax;
}

std::size_t numeric_rank(const std::vector<double>& s, double tol) {
  std::size_t k = 0;
  while (k < s.size() && s[k] > tol) ++k;
  return k;
}

Matrix pinv(const Matrix& m) {
  SvdResult f = svd(m);
  return pinv(m, default_rank_tol(m, f.s));
}

Matrix pinv(const Matrix& m, double rank_tol) {
  if (rank_tol < 0.0) throw std::invalid_argument("pinv: negative tolerance");
  SvdResult f = svd(m);
  const std::size_t k = numeric_rank(f.s, rank_tol);
  Matrix p(m.cols(), m.rows());
  for (std::size_t t = 0; t < k; ++t) {
    const double inv = 1.0 / f.s[t];
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const double vit = f.v(i, t) * inv;
      if (vit == 0.0) continue;
      for (std::size_t j = 0; j < m.rows(); ++j) p(i, j) += vit * f.u(j, t);
    }
  }
  return p;
}

double norm_two(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  SvdResult f = svd(m);
  return f.s.empty() ? 0.0 : f.s[0];
}

RangeSplit range_splitter(const Matrix& b, double rank_tol) {
  SvdResult f = svd(b);
  if (rank_tol < 0.0) rank_tol = default_rank_tol(b, f.s);
  return {std::move(f.u), numeric_rank(f.s, rank_tol)};
}

Matrix null_basis(const Matrix& m, double rank_tol) {
  SvdResult f = svd(m);
  if (rank_tol < 0.0) rank_tol = default_rank_tol(m, f.s);
  const std::size_t k = numeric_rank(f.s, rank_tol);
  return f.v.block(0, k, m.cols(), m.cols() - k);
}

}  // namespace dhstab::la
