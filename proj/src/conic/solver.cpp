#include "conic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "la/eig.hpp"
#include "la/factor.hpp"
#include "la/matrix.hpp"

namespace dhstab::conic {
namespace {

using la::Matrix;

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Reduced problem: zero-cone coordinates eliminated (they are identically 0),
// single-coordinate second-order blocks folded into the nonnegative cone, and
// rows left without coefficients resolved up front.

struct Block {
  lmi::ConeKind kind;
  int offset;  // first coordinate in the reduced variable vector
  int size;
  int order;  // matrix order for psd blocks, 0 otherwise
  int cpos;   // first coordinate in cone-coordinate numbering, -1 for free
};

struct Reduced {
  int n = 0;
  int m = 0;
  int nc = 0;  // cone coordinates
  int deg = 0;
  std::vector<double> c;
  std::vector<double> b;
  std::vector<lmi::Triplet> a;   // col = reduced coordinate
  std::vector<lmi::Triplet> ac;  // col = cone position
  std::vector<Block> blocks;     // all blocks over reduced coordinates
  std::vector<int> cblocks;      // indices of non-free blocks
  std::vector<int> col_origin;   // reduced coordinate -> original coordinate
  std::vector<int> row_origin;   // reduced row -> original row
  int orig_n = 0;
  int orig_m = 0;
  double c_norm = 0.0;
  double b_norm = 0.0;

  // early resolution of rows with no surviving coefficients
  bool trivially_infeasible = false;
  int infeasible_row = -1;
  double infeasible_rhs = 0.0;
};

Reduced reduce(const lmi::ConicProgram& prog) {
  Reduced red;
  red.orig_n = prog.num_vars();
  red.orig_m = prog.num_rows();

  std::vector<int> col_map(prog.num_vars(), -1);
  int offset = 0;
  for (const lmi::ConeBlock& cb : prog.cones) {
    if (cb.kind == lmi::ConeKind::zero) {
      offset += cb.size;
      continue;
    }
    Block blk;
    blk.kind = (cb.kind == lmi::ConeKind::soc && cb.size == 1) ? lmi::ConeKind::nonneg : cb.kind;
    blk.offset = red.n;
    blk.size = cb.size;
    blk.order = cb.kind == lmi::ConeKind::psd ? lmi::psd_order_from_size(cb.size) : 0;
    blk.cpos = -1;
    for (int i = 0; i < cb.size; ++i) {
      col_map[offset + i] = red.n + i;
      red.col_origin.push_back(offset + i);
    }
    red.n += cb.size;
    offset += cb.size;
    red.blocks.push_back(blk);
  }

  red.c.assign(red.n, 0.0);
  for (int i = 0; i < prog.num_vars(); ++i) {
    if (col_map[i] >= 0) red.c[col_map[i]] = prog.objective[i];
  }

  std::vector<char> row_has(prog.num_rows(), 0);
  for (const lmi::Triplet& t : prog.eq_coeffs) {
    if (col_map[t.col] >= 0 && t.value != 0.0) row_has[t.row] = 1;
  }
  std::vector<int> row_map(prog.num_rows(), -1);
  for (int r = 0; r < prog.num_rows(); ++r) {
    if (row_has[r]) {
      row_map[r] = red.m++;
      red.b.push_back(prog.eq_rhs[r]);
      red.row_origin.push_back(r);
    } else if (prog.eq_rhs[r] != 0.0) {
      red.trivially_infeasible = true;
      red.infeasible_row = r;
      red.infeasible_rhs = prog.eq_rhs[r];
      return red;
    }
  }
  for (const lmi::Triplet& t : prog.eq_coeffs) {
    if (col_map[t.col] < 0 || t.value == 0.0) continue;
    red.a.push_back({row_map[t.row], col_map[t.col], t.value});
  }

  // cone coordinate numbering
  for (Block& blk : red.blocks) {
    if (blk.kind == lmi::ConeKind::free_var) continue;
    blk.cpos = red.nc;
    red.nc += blk.size;
    switch (blk.kind) {
      case lmi::ConeKind::nonneg: red.deg += blk.size; break;
      case lmi::ConeKind::soc: red.deg += 1; break;
      case lmi::ConeKind::psd: red.deg += blk.order; break;
      default: break;
    }
  }
  std::vector<int> cpos(red.n, -1);
  for (const Block& blk : red.blocks) {
    if (blk.kind == lmi::ConeKind::free_var) continue;
    for (int i = 0; i < blk.size; ++i) cpos[blk.offset + i] = blk.cpos + i;
  }
  for (const lmi::Triplet& t : red.a) {
    if (cpos[t.col] >= 0) red.ac.push_back({t.row, cpos[t.col], t.value});
  }
  for (std::size_t bi = 0; bi < red.blocks.size(); ++bi) {
    if (red.blocks[bi].kind != lmi::ConeKind::free_var) red.cblocks.push_back(static_cast<int>(bi));
  }

  red.c_norm = norm2(red.c);
  red.b_norm = norm2(red.b);
  return red;
}

// ---------------------------------------------------------------------------
// Per-block cone operations. Vectors are addressed by block offset into the
// full reduced coordinate vector.

struct BlockScaling {
  // nonneg: elementwise ratios
  std::vector<double> diag_hinv;  // z/x
  std::vector<double> diag_winv;  // sqrt(z/x)
  // soc: scaled hyperbolic reflector data
  double eta = 0.0;
  std::vector<double> wbar;
  // psd: W is congruence by R = T^{1/2}; eigendecomposition of the scaled
  // point for Jordan division
  Matrix rmat, rinv, lam_q;
  std::vector<double> lam_vals;
  // soc and psd: dense inverse scaling H^{-1} = W^{-2}; all kinds: lambda
  Matrix hinv;
  std::vector<double> lam;
};

// v' = M(wbar) v, the hyperbolic reflector with M(wbar)^{-1} = M(J wbar)
void reflect(const std::vector<double>& wb, const double* v, double* out) {
  const int d = static_cast<int>(wb.size());
  double t = 0.0;
  for (int i = 1; i < d; ++i) t += wb[i] * v[i];
  out[0] = wb[0] * v[0] + t;
  const double s = v[0] + t / (1.0 + wb[0]);
  for (int i = 1; i < d; ++i) out[i] = v[i] + s * wb[i];
}

Matrix smat_of(const double* v, int order) { return lmi::smat(v, order); }

void svec_into(const Matrix& m, double* out) {
  const std::vector<double> v = lmi::svec(m);
  std::copy(v.begin(), v.end(), out);
}

// columns of the congruence map svec(M) -> svec(G M G) for symmetric G
Matrix congruence_columns(const Matrix& g) {
  const int s = static_cast<int>(g.rows());
  const int d = s * (s + 1) / 2;
  const double rt2 = 1.4142135623730951;
  Matrix out(d, d);
  Matrix col(s, s);
  int k = 0;
  for (int q = 0; q < s; ++q) {
    for (int p = q; p < s; ++p, ++k) {
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          col(i, j) = p == q ? g(i, p) * g(j, p)
                             : (g(i, p) * g(j, q) + g(i, q) * g(j, p)) / rt2;
        }
      }
      const std::vector<double> sc = lmi::svec(col);
      for (int r = 0; r < d; ++r) out(r, k) = sc[r];
    }
  }
  return out;
}

bool compute_scaling(const Block& blk, const double* x, const double* z, BlockScaling& bs) {
  const int d = blk.size;
  bs.lam.assign(d, 0.0);
  switch (blk.kind) {
    case lmi::ConeKind::nonneg: {
      bs.diag_hinv.assign(d, 0.0);
      bs.diag_winv.assign(d, 0.0);
      for (int i = 0; i < d; ++i) {
        if (!(x[i] > 0.0) || !(z[i] > 0.0)) return false;
        bs.diag_hinv[i] = z[i] / x[i];
        bs.diag_winv[i] = std::sqrt(z[i] / x[i]);
        bs.lam[i] = std::sqrt(x[i] * z[i]);
      }
      return true;
    }
    case lmi::ConeKind::soc: {
      double xd = x[0] * x[0], zd = z[0] * z[0], xz = x[0] * z[0];
      for (int i = 1; i < d; ++i) {
        xd -= x[i] * x[i];
        zd -= z[i] * z[i];
        xz += x[i] * z[i];
      }
      if (!(xd > 0.0) || !(zd > 0.0) || !(x[0] > 0.0) || !(z[0] > 0.0)) return false;
      const double a = std::sqrt(xd), b = std::sqrt(zd);
      const double gamma = std::sqrt((1.0 + xz / (a * b)) / 2.0);
      if (!(gamma > 0.0) || !std::isfinite(gamma)) return false;
      bs.wbar.assign(d, 0.0);
      bs.wbar[0] = (x[0] / a + z[0] / b) / (2.0 * gamma);
      for (int i = 1; i < d; ++i) bs.wbar[i] = (x[i] / a - z[i] / b) / (2.0 * gamma);
      bs.eta = std::sqrt(a / b);
      // H^{-1} = eta^{-2} (2 (J wbar)(J wbar)^T - J)
      bs.hinv = Matrix(d, d);
      const double ie2 = 1.0 / (bs.eta * bs.eta);
      std::vector<double> jw(bs.wbar);
      for (int i = 1; i < d; ++i) jw[i] = -jw[i];
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) bs.hinv(i, j) = 2.0 * ie2 * jw[i] * jw[j];
        bs.hinv(i, i) -= (i == 0 ? ie2 : -ie2);
      }
      std::vector<double> tmp(d);
      reflect(bs.wbar, z, tmp.data());
      for (int i = 0; i < d; ++i) bs.lam[i] = bs.eta * tmp[i];
      return true;
    }
    case lmi::ConeKind::psd: {
      const int s = blk.order;
      const Matrix xm = smat_of(x, s);
      const Matrix zm = smat_of(z, s);
      const la::SymEig ez = la::symmetric_eig(zm);
      for (double v : ez.values) {
        if (!(v > 0.0)) return false;
      }
      Matrix zh(s, s), zih(s, s);
      for (int i = 0; i < s; ++i) {
        const double sq = std::sqrt(ez.values[i]);
        for (int r = 0; r < s; ++r) {
          zh(r, i) = ez.v(r, i) * sq;
          zih(r, i) = ez.v(r, i) / sq;
        }
      }
      zh = zh * ez.v.transpose();
      zih = zih * ez.v.transpose();
      const Matrix mid = la::symmetrize(zh * xm * zh);
      const la::SymEig es = la::symmetric_eig(mid);
      for (double v : es.values) {
        if (!(v > 0.0)) return false;
      }
      Matrix sh(s, s);
      for (int i = 0; i < s; ++i) {
        const double sq = std::sqrt(es.values[i]);
        for (int r = 0; r < s; ++r) sh(r, i) = es.v(r, i) * sq;
      }
      sh = sh * es.v.transpose();
      const Matrix tmat = la::symmetrize(zih * sh * zih);
      const la::SymEig et = la::symmetric_eig(tmat);
      for (double v : et.values) {
        if (!(v > 0.0)) return false;
      }
      bs.rmat = Matrix(s, s);
      bs.rinv = Matrix(s, s);
      Matrix tinv(s, s);
      for (int i = 0; i < s; ++i) {
        const double sq = std::sqrt(et.values[i]);
        for (int r = 0; r < s; ++r) {
          bs.rmat(r, i) = et.v(r, i) * sq;
          bs.rinv(r, i) = et.v(r, i) / sq;
          tinv(r, i) = et.v(r, i) / et.values[i];
        }
      }
      bs.rmat = la::symmetrize(bs.rmat * et.v.transpose());
      bs.rinv = la::symmetrize(bs.rinv * et.v.transpose());
      tinv = la::symmetrize(tinv * et.v.transpose());
      const Matrix lam_mat = la::symmetrize(bs.rmat * zm * bs.rmat);
      const la::SymEig el = la::symmetric_eig(lam_mat);
      for (double v : el.values) {
        if (!(v > 0.0)) return false;
      }
      bs.lam_q = el.v;
      bs.lam_vals = el.values;
      svec_into(lam_mat, bs.lam.data());
      bs.hinv = congruence_columns(tinv);
      return true;
    }
    default: return false;
  }
}

void apply_w(const Block& blk, const BlockScaling& bs, const double* in, double* out) {
  const int d = blk.size;
  switch (blk.kind) {
    case lmi::ConeKind::nonneg:
      for (int i = 0; i < d; ++i) out[i] = in[i] / bs.diag_winv[i];
      return;
    case lmi::ConeKind::soc: {
      reflect(bs.wbar, in, out);
      for (int i = 0; i < d; ++i) out[i] *= bs.eta;
      return;
    }
    case lmi::ConeKind::psd: {
      const Matrix m = smat_of(in, blk.order);
      svec_into(la::symmetrize(bs.rmat * m * bs.rmat), out);
      return;
    }
    default: return;
  }
}

void apply_winv(const Block& blk, const BlockScaling& bs, const double* in, double* out) {
  const int d = blk.size;
  switch (blk.kind) {
    case lmi::ConeKind::nonneg:
      for (int i = 0; i < d; ++i) out[i] = bs.diag_winv[i] * in[i];
      return;
    case lmi::ConeKind::soc: {
      std::vector<double> wneg(bs.wbar);
      for (int i = 1; i < d; ++i) wneg[i] = -wneg[i];
      reflect(wneg, in, out);
      for (int i = 0; i < d; ++i) out[i] /= bs.eta;
      return;
    }
    case lmi::ConeKind::psd: {
      const Matrix m = smat_of(in, blk.order);
      svec_into(la::symmetrize(bs.rinv * m * bs.rinv), out);
      return;
    }
    default: return;
  }
}

// u with lambda o u = rhs in the block's Jordan algebra
void jordan_div_lam(const Block& blk, const BlockScaling& bs, const double* rhs, double* out) {
  const int d = blk.size;
  switch (blk.kind) {
    case lmi::ConeKind::nonneg:
      for (int i = 0; i < d; ++i) out[i] = rhs[i] / bs.lam[i];
      return;
    case lmi::ConeKind::soc: {
      double det = bs.lam[0] * bs.lam[0];
      double cross = bs.lam[0] * rhs[0];
      for (int i = 1; i < d; ++i) {
        det -= bs.lam[i] * bs.lam[i];
        cross -= bs.lam[i] * rhs[i];
      }
      out[0] = cross / det;
      for (int i = 1; i < d; ++i) out[i] = (rhs[i] - out[0] * bs.lam[i]) / bs.lam[0];
      return;
    }
    case lmi::ConeKind::psd: {
      const int s = blk.order;
      const Matrix dm = smat_of(rhs, s);
      const Matrix dp = bs.lam_q.transpose() * dm * bs.lam_q;
      Matrix up(s, s);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) up(i, j) = 2.0 * dp(i, j) / (bs.lam_vals[i] + bs.lam_vals[j]);
      }
      svec_into(la::symmetrize(bs.lam_q * up * bs.lam_q.transpose()), out);
      return;
    }
    default: return;
  }
}

void jordan_mul(const Block& blk, const double* u, const double* v, double* out) {
  const int d = blk.size;
  switch (blk.kind) {
    case lmi::ConeKind::nonneg:
      for (int i = 0; i < d; ++i) out[i] = u[i] * v[i];
      return;
    case lmi::ConeKind::soc: {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += u[i] * v[i];
      for (int i = 1; i < d; ++i) out[i] = u[0] * v[i] + v[0] * u[i];
      out[0] = s;
      return;
    }
    case lmi::ConeKind::psd: {
      const int s = blk.order;
      const Matrix um = smat_of(u, s);
      const Matrix vm = smat_of(v, s);
      svec_into(la::symmetrize(um * vm), out);
      return;
    }
    default: return;
  }
}

void unit_e(const Block& blk, double* out) {
  const int d = blk.size;
  std::fill(out, out + d, 0.0);
  switch (blk.kind) {
    case lmi::ConeKind::nonneg:
      std::fill(out, out + d, 1.0);
      return;
    case lmi::ConeKind::soc:
      out[0] = 1.0;
      return;
    case lmi::ConeKind::psd: {
      int k = 0;
      for (int q = 0; q < blk.order; ++q) {
        out[k] = 1.0;
        k += blk.order - q;
      }
      return;
    }
    default: return;
  }
}

// sup { alpha >= 0 : p + alpha dir stays in the cone }
double step_to_boundary(const Block& blk, const double* p, const double* dir) {
  const int d = blk.size;
  switch (blk.kind) {
    case lmi::ConeKind::nonneg: {
      double amax = kInf;
      for (int i = 0; i < d; ++i) {
        if (dir[i] < 0.0) amax = std::min(amax, -p[i] / dir[i]);
      }
      return amax;
    }
    case lmi::ConeKind::soc: {
      double f0 = p[0] * p[0], f1 = p[0] * dir[0], f2 = dir[0] * dir[0];
      for (int i = 1; i < d; ++i) {
        f0 -= p[i] * p[i];
        f1 -= p[i] * dir[i];
        f2 -= dir[i] * dir[i];
      }
      double amax = kInf;
      if (dir[0] < 0.0) amax = -p[0] / dir[0];
      // first positive root of f0 + 2 a f1 + a^2 f2, in the cancellation-free
      // form q/f2 and f0/q so a vanishing f2 cannot blow up the small root
      const double disc = f1 * f1 - f0 * f2;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = f1 <= 0.0 ? -f1 + sq : -f1 - sq;
        if (q != 0.0) {
          const double r = f0 / q;
          if (r > 0.0) amax = std::min(amax, r);
        }
        if (f2 != 0.0) {
          const double r = q / f2;
          if (r > 0.0) amax = std::min(amax, r);
        }
      }
      return amax;
    }
    case lmi::ConeKind::psd: {
      const int s = blk.order;
      const Matrix pm = smat_of(p, s);
      const Matrix dm = smat_of(dir, s);
      const la::CholFactors f = la::cholesky(pm);
      if (!f.ok) return 0.0;
      // y = L^{-1} dm, g = L^{-1} y^T; boundary at 1/max(0, -lambda_min(g))
      Matrix y(s, s);
      for (int col = 0; col < s; ++col) {
        for (int i = 0; i < s; ++i) {
          double v = dm(i, col);
          for (int t = 0; t < i; ++t) v -= f.l(i, t) * y(t, col);
          y(i, col) = v / f.l(i, i);
        }
      }
      Matrix g(s, s);
      for (int col = 0; col < s; ++col) {
        for (int i = 0; i < s; ++i) {
          double v = y(col, i);
          for (int t = 0; t < i; ++t) v -= f.l(i, t) * g(t, col);
          g(i, col) = v / f.l(i, i);
        }
      }
      const double lo = la::min_eig_sym(la::symmetrize(g));
      if (lo >= 0.0) return kInf;
      return 1.0 / (-lo);
    }
    default: return kInf;
  }
}

// ---------------------------------------------------------------------------
// Quasi-definite KKT factorization over all reduced coordinates plus rows:
//   [[E + delta I, A^T], [A, -delta I]]
// where E is block diagonal: 0 on free coordinates, H^{-1} on cone blocks.
// Keeping the cone blocks inside the factorization keeps the primal and dual
// rows backward stable; eliminating them through H would amplify roundoff by
// ||H|| ~ 1/mu. LDL^T without pivoting; refinement targets delta = 0.

struct Kkt {
  int n = 0;  // reduced coordinates
  int m = 0;
  Matrix k;  // equilibrated matrix, lower triangle, before the shift
  Matrix l;  // unit lower triangle of the factor, diagonal in d
  std::vector<double> d;
  std::vector<double> dvec;  // symmetric equilibration, K = D^{-1} (DKD) D^{-1}
  double delta = 0.0;
  double min_pivot_seen = kInf;

  bool factor(const Reduced& r, const std::vector<BlockScaling>& sc, double dlt) {
    use_ld = false;
    delta = dlt;
    n = r.n;
    m = r.m;
    const int dim = n + m;
    k = Matrix(dim, dim);
    for (std::size_t kb = 0; kb < r.cblocks.size(); ++kb) {
      const Block& blk = r.blocks[r.cblocks[kb]];
      const BlockScaling& bs = sc[kb];
      if (blk.kind == lmi::ConeKind::nonneg) {
        for (int i = 0; i < blk.size; ++i) k(blk.offset + i, blk.offset + i) += bs.diag_hinv[i];
      } else {
        for (int i = 0; i < blk.size; ++i) {
          for (int j = 0; j <= i; ++j) k(blk.offset + i, blk.offset + j) += bs.hinv(i, j);
        }
      }
    }
    for (const lmi::Triplet& t : r.a) k(n + t.row, t.col) += t.value;

    // ruiz equilibration: near a degenerate face the cone rows carry
    // ||H^{-1}|| ~ 1/mu^2 while the constraint rows stay O(1); the balanced
    // matrix has O(1) rows, so refining against it in double precision is
    // well posed where the raw system would drown the constraint rows
    dvec.assign(dim, 1.0);
    std::vector<double> rnorm(dim), f(dim);
    for (int pass = 0; pass < 3; ++pass) {
      std::fill(rnorm.begin(), rnorm.end(), 0.0);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
          const double v = std::fabs(k(i, j));
          rnorm[i] = std::max(rnorm[i], v);
          rnorm[j] = std::max(rnorm[j], v);
        }
      }
      for (int i = 0; i < dim; ++i) f[i] = 1.0 / std::sqrt(std::max(rnorm[i], 1e-16));
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) k(i, j) *= f[i] * f[j];
      }
      for (int i = 0; i < dim; ++i) dvec[i] *= f[i];
    }

    min_pivot_seen = kInf;
    l = k;
    for (int i = 0; i < n; ++i) l(i, i) += dlt;
    for (int i = n; i < dim; ++i) l(i, i) -= dlt;
    d.assign(dim, 0.0);
    for (int j = 0; j < dim; ++j) {
      double dj = l(j, j);
      for (int t = 0; t < j; ++t) dj -= l(j, t) * l(j, t) * d[t];
      min_pivot_seen = std::min(min_pivot_seen, std::fabs(dj));
      if (std::fabs(dj) < dlt * 1e-4 || !std::isfinite(dj)) return false;
      d[j] = dj;
      for (int i = j + 1; i < dim; ++i) {
        double v = l(i, j);
        for (int t = 0; t < j; ++t) v -= l(i, t) * l(j, t) * d[t];
        l(i, j) = v / dj;
      }
    }
    return true;
  }

  void solve_factored(std::vector<double>& rhs) const {
    const int dim = n + m;
    for (int i = 0; i < dim; ++i) {
      double v = rhs[i];
      for (int t = 0; t < i; ++t) v -= l(i, t) * rhs[t];
      rhs[i] = v;
    }
    for (int i = 0; i < dim; ++i) rhs[i] /= d[i];
    for (int i = dim - 1; i >= 0; --i) {
      double v = rhs[i];
      for (int t = i + 1; t < dim; ++t) v -= l(t, i) * rhs[t];
      rhs[i] = v;
    }
  }

  // residual of the unshifted equilibrated system into out, accumulated in
  // extended precision: near a degenerate face the factorization is close
  // to singular and refinement only converges if the residual it feeds on
  // is measured more accurately than the working precision
  void scaled_residual(const std::vector<double>& b, const std::vector<double>& u,
                       std::vector<double>& out) const {
    const int dim = n + m;
    out.assign(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
      long double s = 0.0L;
      for (int j = 0; j <= i; ++j) s += static_cast<long double>(k(i, j)) * u[j];
      for (int j = i + 1; j < dim; ++j) s += static_cast<long double>(k(j, i)) * u[j];
      out[i] = static_cast<double>(b[i] - s);
    }
  }

  // extended precision factorization of the same equilibrated matrix, built
  // on demand when the double factorization cannot deliver usable
  // directions; partial pivoting keeps the element growth bounded, which the
  // shifted no-pivot factorization cannot guarantee once genuine pivots
  // approach the shift
  std::vector<long double> lf;
  std::vector<int> perm;
  bool use_ld = false;

  bool prepare_ld() {
    const int dim = n + m;
    const std::size_t stride = static_cast<std::size_t>(dim);
    lf.assign(stride * dim, 0.0L);
    perm.assign(dim, 0);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j <= i; ++j) {
        lf[i * stride + j] = k(i, j);
        lf[j * stride + i] = k(i, j);
      }
    }
    for (int j = 0; j < dim; ++j) {
      int p = j;
      long double pmax = std::fabs(lf[static_cast<std::size_t>(j) * stride + j]);
      for (int i = j + 1; i < dim; ++i) {
        const long double v = std::fabs(lf[i * stride + j]);
        if (v > pmax) {
          pmax = v;
          p = i;
        }
      }
      if (!(pmax > 1e-250L)) return false;
      perm[j] = p;
      if (p != j) {
        for (int t = 0; t < dim; ++t) {
          std::swap(lf[static_cast<std::size_t>(j) * stride + t], lf[p * stride + t]);
        }
      }
      const long double* rowj = &lf[static_cast<std::size_t>(j) * stride];
      const long double pivot = rowj[j];
      for (int i = j + 1; i < dim; ++i) {
        long double* rowi = &lf[i * stride];
        const long double lij = rowi[j] / pivot;
        rowi[j] = lij;
        if (lij == 0.0L) continue;
        for (int t = j + 1; t < dim; ++t) rowi[t] -= lij * rowj[t];
      }
    }
    use_ld = true;
    return true;
  }

  void solve_factored_ld(std::vector<long double>& r) const {
    const int dim = n + m;
    const std::size_t stride = static_cast<std::size_t>(dim);
    for (int j = 0; j < dim; ++j) {
      if (perm[j] != j) std::swap(r[j], r[perm[j]]);
    }
    for (int i = 0; i < dim; ++i) {
      long double v = r[i];
      for (int t = 0; t < i; ++t) v -= lf[i * stride + t] * r[t];
      r[i] = v;
    }
    for (int i = dim - 1; i >= 0; --i) {
      long double v = r[i];
      for (int t = i + 1; t < dim; ++t) v -= lf[i * stride + t] * r[t];
      r[i] = v / lf[i * stride + i];
    }
  }

  void solve_ld(std::vector<double>& rhs) const {
    const int dim = n + m;
    std::vector<long double> b(dim), u(dim), resid(dim), corr(dim);
    for (int i = 0; i < dim; ++i) b[i] = static_cast<long double>(rhs[i]) * dvec[i];
    u = b;
    solve_factored_ld(u);
    std::vector<long double> best_sol = u;
    long double best = std::numeric_limits<long double>::max();
    for (int pass = 0; pass < 3; ++pass) {
      long double rn = 0.0L;
      for (int i = 0; i < dim; ++i) {
        long double s = 0.0L;
        for (int j = 0; j <= i; ++j) s += static_cast<long double>(k(i, j)) * u[j];
        for (int j = i + 1; j < dim; ++j) s += static_cast<long double>(k(j, i)) * u[j];
        resid[i] = b[i] - s;
        rn += resid[i] * resid[i];
      }
      rn = sqrtl(rn);
      if (rn < best) {
        best = rn;
        best_sol = u;
      } else {
        break;
      }
      corr = resid;
      solve_factored_ld(corr);
      for (int i = 0; i < dim; ++i) u[i] += corr[i];
    }
    for (int i = 0; i < dim; ++i) rhs[i] = static_cast<double>(best_sol[i] * dvec[i]);
  }

  // solve the original system; refinement runs in the equilibrated space
  void solve(std::vector<double>& rhs) const {
    if (use_ld) {
      solve_ld(rhs);
      return;
    }
    const int dim = n + m;
    std::vector<double> b(dim);
    for (int i = 0; i < dim; ++i) b[i] = rhs[i] * dvec[i];
    std::vector<double> u = b;
    solve_factored(u);
    std::vector<double> resid, corr, best_sol;
    double best = kInf;
    const double stop = 1e-14 * (1.0 + norm2(b));
    for (int pass = 0; pass < 6; ++pass) {
      scaled_residual(b, u, resid);
      const double rn = norm2(resid);
      if (rn < best) {
        best = rn;
        best_sol = u;
      } else {
        break;
      }
      if (rn <= stop) break;
      corr = resid;
      solve_factored(corr);
      for (int i = 0; i < dim; ++i) u[i] += corr[i];
    }
    for (int i = 0; i < dim; ++i) rhs[i] = best_sol[i] * dvec[i];
  }
};

// ---------------------------------------------------------------------------

struct Direction {
  std::vector<double> x, y, z;
  double tau = 0.0, kappa = 0.0;
};

class Ipm {
 public:
  Ipm(Reduced red, const SolverOptions& opts) : red_(std::move(red)), opts_(opts) {}

  ConicSolution run();

 private:
  Reduced red_;
  SolverOptions opts_;

  std::vector<double> x_, y_, z_;
  double tau_ = 1.0, kappa_ = 1.0;
  std::vector<BlockScaling> scal_;
  Kkt kkt_;
  // per-iteration tau-elimination data
  std::vector<double> dxq_, dyq_;
  double den_ = 0.0;

  void initialize();
  void residuals(std::vector<double>& rp, std::vector<double>& rd, double& rg) const;
  bool scalings_ok();
  bool factor_kkt(std::string& why);
  void newton(const std::vector<double>& r1, const std::vector<double>& r2, double r3,
              const std::vector<double>& ds, double dk, Direction& out) const;
  double newton_refined(const std::vector<double>& r1, const std::vector<double>& r2, double r3,
                        const std::vector<double>& ds, double dk, Direction& out) const;
  double direction_residual(const std::vector<double>& r1, const std::vector<double>& r2,
                            double r3, const std::vector<double>& ds, double dk,
                            const Direction& d, std::vector<double>& rr1,
                            std::vector<double>& rr2, double& rr3, std::vector<double>& rds,
                            double& rdk) const;
  std::string build_direction(const std::vector<double>& rp, const std::vector<double>& rd,
                              double rg, double mu, int iter, Direction& dir);
  double boundary_step(const Direction& d) const;

  ConicSolution finish(SolveStatus st, int iters, const Residuals& res, std::string diag,
                       std::vector<IterateRecord> trace) const;
  std::vector<double> expand_primal(const std::vector<double>& xr) const;
  std::vector<double> expand_dual(const std::vector<double>& yr) const;
};

void Ipm::initialize() {
  x_.assign(red_.n, 0.0);
  z_.assign(red_.n, 0.0);
  y_.assign(red_.m, 0.0);
  tau_ = 1.0;
  kappa_ = 1.0;
  for (const Block& blk : red_.blocks) {
    if (blk.kind == lmi::ConeKind::free_var) continue;
    unit_e(blk, x_.data() + blk.offset);
    unit_e(blk, z_.data() + blk.offset);
  }
}

void Ipm::residuals(std::vector<double>& rp, std::vector<double>& rd, double& rg) const {
  rp.assign(red_.m, 0.0);
  rd.assign(red_.n, 0.0);
  for (const lmi::Triplet& t : red_.a) {
    rp[t.row] += t.value * x_[t.col];
    rd[t.col] -= t.value * y_[t.row];
  }
  for (int r = 0; r < red_.m; ++r) rp[r] -= red_.b[r] * tau_;
  for (int i = 0; i < red_.n; ++i) rd[i] += red_.c[i] * tau_ - z_[i];
  rg = dot(red_.b, y_) - dot(red_.c, x_) - kappa_;
}

bool Ipm::scalings_ok() {
  scal_.resize(red_.cblocks.size());
  for (std::size_t k = 0; k < red_.cblocks.size(); ++k) {
    const Block& blk = red_.blocks[red_.cblocks[k]];
    if (!compute_scaling(blk, x_.data() + blk.offset, z_.data() + blk.offset, scal_[k])) {
      return false;
    }
  }
  return true;
}

bool Ipm::factor_kkt(std::string& why) {
  // the equilibrated matrix has unit row norms, so the shift is an absolute
  // quantity there; refinement against the unshifted system removes its bias
  double delta = 1e-11;
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (kkt_.factor(red_, scal_, delta)) return true;
    delta *= 1e4;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "kkt ldl factorization failed (dim %d, min pivot %.3e, shift %.3e)",
                red_.n + red_.m, kkt_.min_pivot_seen, delta / 1e4);
  why = buf;
  return false;
}

// r1 (m), r2 (n, reduced coordinates), r3 scalar, ds (cone coordinates),
// dk scalar -> direction solving
//   A dx - b dtau = r1
//   -A^T dy - dz + c dtau = r2          (dz = 0 on free coordinates)
//   b^T dy - c^T dx - dkappa = r3
//   lam o (W^{-1} dx + W dz) = ds       (cone blocks)
//   kappa dtau + tau dkappa = dk
void Ipm::newton(const std::vector<double>& r1, const std::vector<double>& r2, double r3,
                 const std::vector<double>& ds, double dk, Direction& out) const {
  // stacked rhs: dual equations on coordinates, primal equations on rows;
  // unknowns [dx; ytilde] with ytilde = -dy
  std::vector<double> rhs(red_.n + red_.m, 0.0);
  for (int i = 0; i < red_.n; ++i) rhs[i] = r2[i];
  for (std::size_t k = 0; k < red_.cblocks.size(); ++k) {
    const Block& blk = red_.blocks[red_.cblocks[k]];
    std::vector<double> g(blk.size), wig(blk.size);
    jordan_div_lam(blk, scal_[k], ds.data() + blk.cpos, g.data());
    apply_winv(blk, scal_[k], g.data(), wig.data());
    for (int i = 0; i < blk.size; ++i) rhs[blk.offset + i] += wig[i];
  }
  for (int r = 0; r < red_.m; ++r) rhs[red_.n + r] = r1[r];
  kkt_.solve(rhs);

  std::vector<double> xu(red_.n), ytu(red_.m);
  for (int i = 0; i < red_.n; ++i) xu[i] = rhs[i];
  for (int r = 0; r < red_.m; ++r) ytu[r] = rhs[red_.n + r];

  const double num = r3 + dk / tau_ + dot(red_.b, ytu) + dot(red_.c, xu);
  const double dtau = num / den_;

  out.x.assign(red_.n, 0.0);
  out.y.assign(red_.m, 0.0);
  out.z.assign(red_.n, 0.0);
  for (int i = 0; i < red_.n; ++i) out.x[i] = xu[i] + dtau * dxq_[i];
  for (int r = 0; r < red_.m; ++r) out.y[r] = -(ytu[r] + dtau * dyq_[r]);
  out.tau = dtau;
  out.kappa = (dk - kappa_ * dtau) / tau_;
  // dz on cone coordinates from the dual equation; zero on free coordinates
  std::vector<double> acy(red_.nc, 0.0);
  for (const lmi::Triplet& t : red_.ac) acy[t.col] -= t.value * out.y[t.row];
  for (std::size_t k = 0; k < red_.cblocks.size(); ++k) {
    const Block& blk = red_.blocks[red_.cblocks[k]];
    for (int i = 0; i < blk.size; ++i) {
      const int rc = blk.offset + i;
      out.z[rc] = acy[blk.cpos + i] + red_.c[rc] * dtau - r2[rc];
    }
  }
}

// residual of a candidate direction against the five Newton equation groups;
// returns the stacked Euclidean norm
double Ipm::direction_residual(const std::vector<double>& r1, const std::vector<double>& r2,
                               double r3, const std::vector<double>& ds, double dk,
                               const Direction& d, std::vector<double>& rr1,
                               std::vector<double>& rr2, double& rr3, std::vector<double>& rds,
                               double& rdk) const {
  rr1.assign(red_.m, 0.0);
  rr2.assign(red_.n, 0.0);
  for (const lmi::Triplet& t : red_.a) {
    rr1[t.row] += t.value * d.x[t.col];
    rr2[t.col] -= t.value * d.y[t.row];
  }
  for (int r = 0; r < red_.m; ++r) rr1[r] = r1[r] - (rr1[r] - red_.b[r] * d.tau);
  for (int i = 0; i < red_.n; ++i) {
    rr2[i] = r2[i] - (rr2[i] - d.z[i] + red_.c[i] * d.tau);
  }
  rr3 = r3 - (dot(red_.b, d.y) - dot(red_.c, d.x) - d.kappa);
  rds.assign(red_.nc, 0.0);
  for (std::size_t k = 0; k < red_.cblocks.size(); ++k) {
    const Block& blk = red_.blocks[red_.cblocks[k]];
    std::vector<double> wx(blk.size), wz(blk.size), prod(blk.size);
    apply_winv(blk, scal_[k], d.x.data() + blk.offset, wx.data());
    apply_w(blk, scal_[k], d.z.data() + blk.offset, wz.data());
    for (int i = 0; i < blk.size; ++i) wx[i] += wz[i];
    jordan_mul(blk, scal_[k].lam.data(), wx.data(), prod.data());
    for (int i = 0; i < blk.size; ++i) rds[blk.cpos + i] = ds[blk.cpos + i] - prod[i];
  }
  rdk = dk - (kappa_ * d.tau + tau_ * d.kappa);
  const double acc = dot(rr1, rr1) + dot(rr2, rr2) + rr3 * rr3 + dot(rds, rds) + rdk * rdk;
  return std::sqrt(acc);
}

// correction passes against the five newton equation groups, guarded against
// divergence; returns the kept direction's residual relative to the
// right-hand side so the caller can judge whether the direction is usable
double Ipm::newton_refined(const std::vector<double>& r1, const std::vector<double>& r2,
                           double r3, const std::vector<double>& ds, double dk,
                           Direction& out) const {
  newton(r1, r2, r3, ds, dk, out);
  const double rhs_scale = std::sqrt(dot(r1, r1) + dot(r2, r2) + r3 * r3 + dot(ds, ds) + dk * dk);
  std::vector<double> rr1, rr2, rds;
  double rr3 = 0.0, rdk = 0.0;
  Direction best = out;
  double best_res = kInf;
  for (int pass = 0; pass < 3; ++pass) {
    const double res = direction_residual(r1, r2, r3, ds, dk, out, rr1, rr2, rr3, rds, rdk);
    if (res < best_res) {
      best_res = res;
      best = out;
    } else {
      out = best;
      break;
    }
    if (res <= 1e-13 * (1.0 + rhs_scale) || pass == 2) break;
    Direction corr;
    newton(rr1, rr2, rr3, rds, rdk, corr);
    for (int i = 0; i < red_.n; ++i) out.x[i] += corr.x[i];
    for (int r = 0; r < red_.m; ++r) out.y[r] += corr.y[r];
    for (int i = 0; i < red_.n; ++i) out.z[i] += corr.z[i];
    out.tau += corr.tau;
    out.kappa += corr.kappa;
  }
  return best_res / (1e-300 + rhs_scale);
}

// one predictor-corrector round on the current factorization; fills the
// combined direction or describes why no usable direction exists
std::string Ipm::build_direction(const std::vector<double>& rp, const std::vector<double>& rd,
                                 double rg, double mu, int iter, Direction& dir) {
  // tau-elimination direction: K [xq; ytq] = [-c; b]
  {
    std::vector<double> rhs(red_.n + red_.m, 0.0);
    for (int i = 0; i < red_.n; ++i) rhs[i] = -red_.c[i];
    for (int r = 0; r < red_.m; ++r) rhs[red_.n + r] = red_.b[r];
    kkt_.solve(rhs);
    dxq_.assign(red_.n, 0.0);
    dyq_.assign(red_.m, 0.0);
    for (int i = 0; i < red_.n; ++i) dxq_[i] = rhs[i];
    for (int r = 0; r < red_.m; ++r) dyq_[r] = rhs[red_.n + r];
    // dy^q = -ytq; den = b^T dy^q - c^T dx^q + kappa / tau
    den_ = -dot(red_.b, dyq_) - dot(red_.c, dxq_) + kappa_ / tau_;
    if (!(std::fabs(den_) > 0.0) || !std::isfinite(den_)) {
      return "tau elimination produced a singular pivot at iteration " + std::to_string(iter);
    }
  }

  // a direction whose equation residual stays a sizable fraction of its
  // right-hand side would step essentially at random; refuse to use it.
  // a few percent of inexactness is fine: the step still captures nearly
  // all of the newton decrease, and the step-length collapse check catches
  // anything the gate lets through
  constexpr double kDirGate = 0.1;
  const auto quality_message = [iter](double q) {
    char buf[112];
    std::snprintf(buf, sizeof(buf),
                  "search direction residual stuck at %.1e of its right-hand side "
                  "at iteration %d",
                  q, iter);
    return std::string(buf);
  };

  // predictor
  std::vector<double> nr1(red_.m), nr2(red_.n), ds(red_.nc);
  for (int r = 0; r < red_.m; ++r) nr1[r] = -rp[r];
  for (int i = 0; i < red_.n; ++i) nr2[i] = -rd[i];
  for (std::size_t k = 0; k < red_.cblocks.size(); ++k) {
    const Block& blk = red_.blocks[red_.cblocks[k]];
    std::vector<double> ll(blk.size);
    jordan_mul(blk, scal_[k].lam.data(), scal_[k].lam.data(), ll.data());
    for (int i = 0; i < blk.size; ++i) ds[blk.cpos + i] = -ll[i];
  }
  Direction aff;
  const double aff_quality = newton_refined(nr1, nr2, -rg, ds, -tau_ * kappa_, aff);
  if (!(aff_quality <= kDirGate)) return quality_message(aff_quality);
  const double alpha_aff = std::min(1.0, boundary_step(aff));
  const double sigma = std::min(1.0, std::max(0.0, std::pow(1.0 - alpha_aff, 3)));

  // corrector
  for (int r = 0; r < red_.m; ++r) nr1[r] *= (1.0 - sigma);
  for (int i = 0; i < red_.n; ++i) nr2[i] *= (1.0 - sigma);
  const double r3 = -(1.0 - sigma) * rg;
  for (std::size_t k = 0; k < red_.cblocks.size(); ++k) {
    const Block& blk = red_.blocks[red_.cblocks[k]];
    std::vector<double> u(blk.size), v(blk.size), uv(blk.size), e(blk.size);
    apply_winv(blk, scal_[k], aff.x.data() + blk.offset, u.data());
    apply_w(blk, scal_[k], aff.z.data() + blk.offset, v.data());
    jordan_mul(blk, u.data(), v.data(), uv.data());
    unit_e(blk, e.data());
    for (int i = 0; i < blk.size; ++i) ds[blk.cpos + i] += -uv[i] + sigma * mu * e[i];
  }
  double dk = -tau_ * kappa_ - aff.tau * aff.kappa + sigma * mu;
  double dir_quality = newton_refined(nr1, nr2, r3, ds, dk, dir);
  if (!(dir_quality <= kDirGate)) {
    // the mehrotra cross terms can poison the system near a degenerate
    // face; fall back to plain centering before giving up
    for (std::size_t k = 0; k < red_.cblocks.size(); ++k) {
      const Block& blk = red_.blocks[red_.cblocks[k]];
      std::vector<double> ll(blk.size), e(blk.size);
      jordan_mul(blk, scal_[k].lam.data(), scal_[k].lam.data(), ll.data());
      unit_e(blk, e.data());
      for (int i = 0; i < blk.size; ++i) ds[blk.cpos + i] = -ll[i] + sigma * mu * e[i];
    }
    dk = -tau_ * kappa_ + sigma * mu;
    dir_quality = newton_refined(nr1, nr2, r3, ds, dk, dir);
    if (!(dir_quality <= kDirGate)) return quality_message(dir_quality);
  }
  return "";
}

double Ipm::boundary_step(const Direction& d) const {
  double amax = kInf;
  for (std::size_t k = 0; k < red_.cblocks.size(); ++k) {
    const Block& blk = red_.blocks[red_.cblocks[k]];
    amax = std::min(amax, step_to_boundary(blk, x_.data() + blk.offset, d.x.data() + blk.offset));
    amax = std::min(amax, step_to_boundary(blk, z_.data() + blk.offset, d.z.data() + blk.offset));
  }
  if (d.tau < 0.0) amax = std::min(amax, -tau_ / d.tau);
  if (d.kappa < 0.0) amax = std::min(amax, -kappa_ / d.kappa);
  return amax;
}

std::vector<double> Ipm::expand_primal(const std::vector<double>& xr) const {
  std::vector<double> out(red_.orig_n, 0.0);
  for (int i = 0; i < red_.n; ++i) out[red_.col_origin[i]] = xr[i];
  return out;
}

std::vector<double> Ipm::expand_dual(const std::vector<double>& yr) const {
  std::vector<double> out(red_.orig_m, 0.0);
  for (int r = 0; r < red_.m; ++r) out[red_.row_origin[r]] = yr[r];
  return out;
}

ConicSolution Ipm::finish(SolveStatus st, int iters, const Residuals& res, std::string diag,
                          std::vector<IterateRecord> trace) const {
  ConicSolution sol;
  sol.status = st;
  sol.iterations = iters;
  sol.residuals = res;
  sol.diagnostic = std::move(diag);
  sol.trace = std::move(trace);
  const double t = tau_ > 0.0 ? tau_ : 1.0;
  std::vector<double> xs(red_.n), ys(red_.m);
  for (int i = 0; i < red_.n; ++i) xs[i] = x_[i] / t;
  for (int r = 0; r < red_.m; ++r) ys[r] = y_[r] / t;
  if (st == SolveStatus::infeasible_certificate) {
    // dual carries the Farkas witness scaled to b^T y = 1; primal is moot
    const double bty = dot(red_.b, y_);
    for (int r = 0; r < red_.m; ++r) ys[r] = y_[r] / bty;
    std::fill(xs.begin(), xs.end(), 0.0);
  } else if (st == SolveStatus::unbounded_certificate) {
    // primal carries the ray scaled to c^T x = -1; dual is moot
    const double ctx = -dot(red_.c, x_);
    for (int i = 0; i < red_.n; ++i) xs[i] = x_[i] / ctx;
    std::fill(ys.begin(), ys.end(), 0.0);
  }
  sol.primal = expand_primal(xs);
  sol.dual = expand_dual(ys);
  sol.primal_objective = dot(red_.c, xs);
  sol.dual_objective = dot(red_.b, ys);
  return sol;
}

ConicSolution Ipm::run() {
  initialize();
  std::vector<IterateRecord> trace;
  Residuals last_res;
  std::vector<double> rp, rd;
  double rg = 0.0;

  for (int iter = 0; iter < opts_.max_iters; ++iter) {
    residuals(rp, rd, rg);
    const double mu = (dot(x_, z_) + tau_ * kappa_) / (red_.deg + 1);

    // convergence bookkeeping on the de-homogenized point
    double pres = kInf, dres = kInf, gap = kInf, pobj = 0.0, dobj = 0.0;
    if (tau_ > 1e-150) {
      std::vector<double> ax(red_.m, 0.0), aty(red_.n, 0.0);
      for (const lmi::Triplet& t : red_.a) {
        ax[t.row] += t.value * x_[t.col] / tau_;
        aty[t.col] += t.value * y_[t.row] / tau_;
      }
      double pr = 0.0, dr = 0.0;
      for (int r = 0; r < red_.m; ++r) {
        const double v = ax[r] - red_.b[r];
        pr += v * v;
      }
      for (int i = 0; i < red_.n; ++i) {
        const double v = aty[i] + z_[i] / tau_ - red_.c[i];
        dr += v * v;
      }
      pobj = dot(red_.c, x_) / tau_;
      dobj = dot(red_.b, y_) / tau_;
      pres = std::sqrt(pr) / (1.0 + red_.b_norm);
      dres = std::sqrt(dr) / (1.0 + red_.c_norm);
      gap = std::fabs(pobj - dobj) / (1.0 + std::max(std::fabs(pobj), std::fabs(dobj)));
    }
    last_res = {pres, dres, gap};
    if (opts_.verbose) {
      std::printf("conic %3d  mu %9.2e  pres %9.2e  dres %9.2e  gap %9.2e  tau %8.2e\n", iter, mu,
                  pres, dres, gap, tau_);
    }
    if (pres <= opts_.tol && dres <= opts_.tol && gap <= opts_.tol) {
      return finish(SolveStatus::optimal, iter, last_res, "", std::move(trace));
    }
    // Farkas certificates
    const double bty = dot(red_.b, y_);
    const double ctx = dot(red_.c, x_);
    {
      std::vector<double> atyz(red_.n, 0.0), ax(red_.m, 0.0);
      for (const lmi::Triplet& t : red_.a) {
        atyz[t.col] += t.value * y_[t.row];
        ax[t.row] += t.value * x_[t.col];
      }
      for (int i = 0; i < red_.n; ++i) atyz[i] += z_[i];
      if (bty > 0.0) {
        const double q = norm2(atyz) * std::max(1.0, red_.b_norm) / bty;
        if (q <= opts_.tol) {
          return finish(SolveStatus::infeasible_certificate, iter, {q, 0.0, 0.0}, "",
                        std::move(trace));
        }
      }
      if (ctx < 0.0) {
        const double q = norm2(ax) * std::max(1.0, red_.c_norm) / (-ctx);
        if (q <= opts_.tol) {
          return finish(SolveStatus::unbounded_certificate, iter, {0.0, q, 0.0}, "",
                        std::move(trace));
        }
      }
    }

    if (!scalings_ok()) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "cone scaling left the interior at iteration %d", iter);
      return finish(SolveStatus::numerical_failure, iter, last_res, buf, std::move(trace));
    }
    std::string why;
    if (!factor_kkt(why)) {
      return finish(SolveStatus::numerical_failure, iter, last_res,
                    why + " at iteration " + std::to_string(iter), std::move(trace));
    }

    Direction dir;
    std::string dir_why = build_direction(rp, rd, rg, mu, iter, dir);
    if (!dir_why.empty() && kkt_.prepare_ld()) {
      // retry once with the extended precision factorization before
      // concluding that the system is beyond reach
      dir_why = build_direction(rp, rd, rg, mu, iter, dir);
    }
    if (!dir_why.empty()) {
      return finish(SolveStatus::numerical_failure, iter, last_res, dir_why, std::move(trace));
    }
    const double alpha = std::min(1.0, 0.99 * boundary_step(dir));
    if (!(alpha > 1e-11) || !std::isfinite(alpha)) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "step length collapsed to %.2e at iteration %d", alpha,
                    iter);
      return finish(SolveStatus::numerical_failure, iter, last_res, buf, std::move(trace));
    }

    for (int i = 0; i < red_.n; ++i) x_[i] += alpha * dir.x[i];
    for (int r = 0; r < red_.m; ++r) y_[r] += alpha * dir.y[r];
    for (int i = 0; i < red_.n; ++i) z_[i] += alpha * dir.z[i];
    tau_ += alpha * dir.tau;
    kappa_ += alpha * dir.kappa;
    // the embedding is positively homogeneous; re-anchoring tau + kappa at
    // its initial value keeps the iterate scale O(1), otherwise rounding
    // noise divided by a drifting tau caps the reachable accuracy
    const double rescale = 2.0 / (tau_ + kappa_);
    if (std::isfinite(rescale) && rescale > 0.0) {
      for (double& v : x_) v *= rescale;
      for (double& v : y_) v *= rescale;
      for (double& v : z_) v *= rescale;
      tau_ *= rescale;
      kappa_ *= rescale;
    }
    trace.push_back({mu, pres, dres, gap, alpha, tau_, kappa_});
  }
  return finish(SolveStatus::iteration_limit, opts_.max_iters, last_res, "", std::move(trace));
}

}  // namespace

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible_certificate: return "infeasible_certificate";
    case SolveStatus::unbounded_certificate: return "unbounded_certificate";
    case SolveStatus::iteration_limit: return "iteration_limit";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

ConicSolution solve(const lmi::ConicProgram& prog, const SolverOptions& opts) {
  prog.validate();
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");

  Reduced red = reduce(prog);
  if (red.trivially_infeasible) {
    ConicSolution sol;
    sol.status = SolveStatus::infeasible_certificate;
    sol.primal.assign(prog.num_vars(), 0.0);
    sol.dual.assign(prog.num_rows(), 0.0);
    sol.dual[red.infeasible_row] = 1.0 / red.infeasible_rhs;
    sol.iterations = 0;
    sol.diagnostic = "equality row " + std::to_string(red.infeasible_row) +
                     " has no variables but a nonzero right-hand side";
    return sol;
  }
  if (red.n == 0) {
    // every coordinate was pinned to zero and all rows were consistent
    ConicSolution sol;
    sol.status = SolveStatus::optimal;
    sol.primal.assign(prog.num_vars(), 0.0);
    sol.dual.assign(prog.num_rows(), 0.0);
    return sol;
  }

  Ipm ipm(std::move(red), opts);
  return ipm.run();
}

}  // namespace dhstab::conic
