#include "dh/dh.hpp"

#include <cmath>

#include "la/eig.hpp"
#include "la/factor.hpp"
#include "la/lyapunov.hpp"
#include "la/svd.hpp"

namespace dhstab::dh {

using la::max_eig_sym;
using la::min_eig_sym;
using la::norm_two;
using la::null_basis;
using la::pinv;
using la::skew_part;
using la::spectral_abscissa;
using la::symmetrize;

namespace {

constexpr double kPsdTol = 1e-10;   // slack for R >= 0, scaled by (1 + ||R||)
constexpr double kGaugeTol = 1e-8;  // slack for P >= I

void require_square(const Matrix& m, const char* who) {
  if (!m.square()) throw std::invalid_argument(std::string(who) + ": not square");
}

double norm_of(const Matrix& m, NormKind norm) {
  return norm == NormKind::frobenius ? m.norm_fro() : norm_two(m);
}

}  // namespace

DHTriple::DHTriple(Matrix j, Matrix r, Matrix q, double tol_pd) {
  require_square(j, "DHTriple");
  if (r.rows() != j.rows() || q.rows() != j.rows())
    throw std::invalid_argument("DHTriple: dimension mismatch");
  j_ = skew_part(j);
  r_ = symmetrize(r);
  q_ = symmetrize(q);
  if (min_eig_sym(r_) < -kPsdTol * (1.0 + r_.norm_fro()))
    throw std::invalid_argument("DHTriple: R is not positive semidefinite");
  if (j_.rows() > 0 && min_eig_sym(q_) < tol_pd)
    throw std::invalid_argument("DHTriple: Q is not positive definite");
}

DHTripleInv::DHTripleInv(Matrix j, Matrix r, Matrix p) {
  require_square(j, "DHTripleInv");
  if (r.rows() != j.rows() || p.rows() != j.rows())
    throw std::invalid_argument("DHTripleInv: dimension mismatch");
  j_ = skew_part(j);
  r_ = symmetrize(r);
  p_ = symmetrize(p);
  if (min_eig_sym(r_) < -kPsdTol * (1.0 + r_.norm_fro()))
    throw std::invalid_argument("DHTripleInv: R is not positive semidefinite");
  if (j_.rows() > 0 && min_eig_sym(p_) < 1.0 - kGaugeTol)
    throw std::invalid_argument("DHTripleInv: P is below the unit gauge");
}

SystemPair::SystemPair(Matrix a_, Matrix b_) : a(std::move(a_)), b(std::move(b_)) {
  require_square(a, "SystemPair");
  if (b.rows() != a.rows()) throw std::invalid_argument("SystemPair: B row count");
  a.require_finite("SystemPair");
  b.require_finite("SystemPair");
}

SystemTriplet::SystemTriplet(Matrix a_, Matrix b_, Matrix c_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {
  require_square(a, "SystemTriplet");
  if (b.rows() != a.rows()) throw std::invalid_argument("SystemTriplet: B row count");
  if (c.cols() != a.rows()) throw std::invalid_argument("SystemTriplet: C col count");
  a.require_finite("SystemTriplet");
  b.require_finite("SystemTriplet");
  c.require_finite("SystemTriplet");
}

Matrix compose(const DHTriple& t) { return (t.j() - t.r()) * t.q(); }

DHTriple dh_from_stable(const Matrix& a, double tol_pd) {
  require_square(a, "dh_from_stable");
  if (spectral_abscissa(a) >= 0.0)
    throw NotStable("dh_from_stable: spectral abscissa is nonnegative");
  Matrix x;
  try {
    x = la::lyap_solve(a, Matrix::identity(a.rows()) * -1.0);
  } catch (const la::LyapunovSingular&) {
    throw LyapunovFailure("dh_from_stable: Lyapunov system is singular");
  }
  if (min_eig_sym(x) <= 0.0)
    throw LyapunovFailure("dh_from_stable: Gram matrix is not positive definite");
  Matrix q;
  try {
    q = la::spd_inverse(x);
  } catch (const std::runtime_error&) {
    throw LyapunovFailure("dh_from_stable: Gram matrix is not invertible");
  }
  const Matrix m = a * x;
  return DHTriple(skew_part(m), symmetrize(m) * -1.0, std::move(q), tol_pd);
}

DHTriple transform_dh(const DHTriple& t, const Matrix& u) {
  require_square(u, "transform_dh");
  if (u.rows() != t.n()) throw std::invalid_argument("transform_dh: dimension");
  if ((u.transpose() * u - Matrix::identity(u.rows())).norm_fro() > 1e-10)
    throw NotOrthogonal("transform_dh: U is not orthogonal");
  const Matrix ut = u.transpose();
  return DHTriple(ut * t.j() * u, ut * t.r() * u, ut * t.q() * u);
}

bool sun_solvable(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (a.rows() != c.rows() || b.cols() != c.cols())
    throw std::invalid_argument("sun_solvable: dimension mismatch");
  const Matrix lhs = a * pinv(a) * c * pinv(b) * b;
  return (lhs - c).norm_fro() <= 1e-8 * (1.0 + c.norm_fro());
}

Matrix sun_solution(const Matrix& a, const Matrix& b, const Matrix& c,
                    const Matrix& z) {
  if (z.rows() != a.cols() || z.cols() != b.rows())
    throw std::invalid_argument("sun_solution: Z dimension mismatch");
  if (!sun_solvable(a, b, c))
    throw NotSolvable("sun_solution: A E B = C has no solution");
  const Matrix pa = pinv(a);
  const Matrix pb = pinv(b);
  return pa * c * pb + z - pa * a * z * b * pb;
}

bool psd_block_check(const Matrix& r, std::size_t s) {
  require_square(r, "psd_block_check");
  const std::size_t n = r.rows();
  if (s == 0 || s >= n) throw std::invalid_argument("psd_block_check: bad split");
  const double tol = 1e-9 * (1.0 + r.norm_fro());
  if ((r - r.transpose()).norm_fro() > tol)
    throw NotSymmetric("psd_block_check: matrix is not symmetric");
  const Matrix b1 = r.block(0, 0, s, s);
  const Matrix c1t = r.block(0, s, s, n - s);
  const Matrix d1 = symmetrize(r.block(s, s, n - s, n - s));
  if (min_eig_sym(d1) < -tol) return false;
  const Matrix nb = null_basis(d1);
  if (nb.cols() > 0 && (c1t * nb).norm_fro() > tol) return false;
  const Matrix schur = symmetrize(b1 - c1t * pinv(d1) * c1t.transpose());
  return min_eig_sym(schur) >= -tol;
}

Matrix g_feedback(const SystemPair& p, const DHTriple& t) {
  if (t.n() != p.n()) throw std::invalid_argument("g_feedback: dimension");
  return pinv(p.b) * (p.a - compose(t));
}

double ssf_residual(const SystemPair& p, const DHTriple& t, NormKind norm) {
  if (t.n() != p.n()) throw std::invalid_argument("ssf_residual: dimension");
  const Matrix proj = Matrix::identity(p.n()) - p.b * pinv(p.b);
  return norm_of(proj * (p.a - compose(t)), norm);
}

Matrix f_feedback(const SystemTriplet& s, const DHTriple& t) {
  if (t.n() != s.n()) throw std::invalid_argument("f_feedback: dimension");
  return pinv(s.b) * (s.a - compose(t)) * pinv(s.c);
}

SofResiduals sof_residuals(const SystemTriplet& s, const DHTriple& t,
                           NormKind norm) {
  if (t.n() != s.n()) throw std::invalid_argument("sof_residuals: dimension");
  const Matrix gap = s.a - compose(t);
  const Matrix id = Matrix::identity(s.n());
  SofResiduals out;
  out.left = norm_of((id - s.b * pinv(s.b)) * gap, norm);
  out.right = norm_of(gap * (pinv(s.c) * s.c - id), norm);
  return out;
}

Matrix w_to_k(const Matrix& w, const Matrix& b, const Matrix& y) {
  if (w.rows() != b.rows() || !w.square())
    throw std::invalid_argument("w_to_k: W must be n x n");
  if (y.rows() != b.cols() || y.cols() != w.cols())
    throw std::invalid_argument("w_to_k: Y must be m x n");
  const Matrix pb = pinv(b);
  return pb * w + (Matrix::identity(b.cols()) - pb * b) * y;
}

Matrix k_to_w(const Matrix& k, const Matrix& b, const Matrix& n) {
  if (k.rows() != b.cols() || k.cols() != b.rows())
    throw std::invalid_argument("k_to_w: K must be m x n");
  if (n.rows() != b.rows() || !n.square())
    throw std::invalid_argument("k_to_w: N must be n x n");
  return b * k + (Matrix::identity(b.rows()) - b * pinv(b)) * n;
}

Matrix rho_shift(const Matrix& a, double rho) {
  require_square(a, "rho_shift");
  return a + Matrix::identity(a.rows()) * rho;
}

}  // namespace dhstab::dh
