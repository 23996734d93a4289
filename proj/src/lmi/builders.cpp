#include "lmi/builders.hpp"

#include <cmath>

#include "la/eig.hpp"
#include "la/svd.hpp"
#include "lmi/builder.hpp"

namespace dhstab::lmi {
namespace {

using la::Matrix;

Matrix left_kernel_rows(const Matrix& b) {
  const la::RangeSplit rs = la::range_splitter(b);
  const std::size_t n = b.rows();
  return rs.u.block(0, rs.k, n, n - rs.k).transpose();
}

void check_square(const Matrix& m, std::size_t n, const char* who) {
  if (m.rows() != n || m.cols() != n) throw std::invalid_argument(std::string(who) + ": dimension");
}

void check_step_params(double eps, double tol_pd) {
  if (!std::isfinite(eps) || eps < 0.0) throw std::invalid_argument("step: bad trust radius factor");
  if (!(tol_pd > 0.0)) throw std::invalid_argument("step: tol_pd must be positive");
}

AffineMatrix identity_term(VarBlockRef x, std::size_t n) {
  AffineMatrix e(static_cast<int>(n), static_cast<int>(n));
  e.add_product(1.0, Matrix::identity(n), x, Matrix::identity(n));
  return e;
}

AffineMatrix shifted_term(VarBlockRef x, const Matrix& shift) {
  AffineMatrix e(shift);
  e.add_product(1.0, Matrix::identity(shift.rows()), x, Matrix::identity(shift.rows()));
  return e;
}

}  // namespace

ConicProgram build_ssf_feasibility(const dh::SystemPair& p, NormKind norm) {
  const std::size_t n = p.n();
  const Matrix u2t = left_kernel_rows(p.b);
  const Matrix id = Matrix::identity(n);

  ProgramBuilder bld;
  const VarBlockRef j = bld.add_skew_var("J", static_cast<int>(n));
  const VarBlockRef r = bld.add_sym_var("R", static_cast<int>(n));
  const VarBlockRef pm = bld.add_sym_var("P", static_cast<int>(n));
  bld.require_psd(identity_term(r, n));
  bld.require_psd(shifted_term(pm, -id));

  AffineMatrix resid(static_cast<int>(u2t.rows()), static_cast<int>(n));
  resid.add_product(1.0, u2t * p.a, pm, id);
  resid.add_product(-1.0, u2t, j, id);
  resid.add_product(1.0, u2t, r, id);
  bld.minimize({bld.add_norm_epigraph("t", resid, norm)});
  return bld.finalize();
}

ConicProgram build_ssf_feasibility_reduced(const dh::SystemPair& p, const Matrix& u,
                                           std::size_t k, NormKind norm) {
  const std::size_t n = p.n();
  check_square(u, n, "build_ssf_feasibility_reduced");
  if (k > n) throw std::invalid_argument("build_ssf_feasibility_reduced: k exceeds n");
  const std::size_t q = n - k;
  const Matrix ahat = u.transpose() * p.a * u;
  const Matrix abot = ahat.block(k, 0, q, n);
  const Matrix id = Matrix::identity(n);

  ProgramBuilder bld;
  const VarBlockRef pm = bld.add_sym_var("P", static_cast<int>(n));
  bld.require_psd(shifted_term(pm, -id));

  AffineMatrix resid(static_cast<int>(q), static_cast<int>(n));
  resid.add_product(1.0, abot, pm, id);
  if (q > 0) {
    // selectors placing the lower blocks of J - R inside the q x n residual
    Matrix s1(k, n), s2(q, n);
    for (std::size_t i = 0; i < k; ++i) s1(i, i) = 1.0;
    for (std::size_t i = 0; i < q; ++i) s2(i, k + i) = 1.0;
    const Matrix idq = Matrix::identity(q);
    const VarBlockRef j22 = bld.add_skew_var("J22", static_cast<int>(q));
    const VarBlockRef r22 = bld.add_sym_var("R22", static_cast<int>(q));
    bld.require_psd(identity_term(r22, q));
    resid.add_product(-1.0, idq, j22, s2);
    resid.add_product(1.0, idq, r22, s2);
    if (k > 0) {
      const VarBlockRef j21 = bld.add_general_var("J21", static_cast<int>(q), static_cast<int>(k));
      const VarBlockRef r21 = bld.add_general_var("R21", static_cast<int>(q), static_cast<int>(k));
      resid.add_product(-1.0, idq, j21, s1);
      resid.add_product(1.0, idq, r21, s1);
    }
  }
  bld.minimize({bld.add_norm_epigraph("t", resid, norm)});
  return bld.finalize();
}

ConicProgram build_ssdp_step(const dh::SystemPair& p, const Matrix& j, const Matrix& r,
                             const Matrix& pmat, double eps, NormKind norm, double tol_pd) {
  const std::size_t n = p.n();
  check_square(j, n, "build_ssdp_step");
  check_square(r, n, "build_ssdp_step");
  check_square(pmat, n, "build_ssdp_step");
  check_step_params(eps, tol_pd);
  const Matrix id = Matrix::identity(n);
  const Matrix pinv_p = la::spd_inverse_floored(pmat, tol_pd);
  const Matrix t = j - r;
  const Matrix g = la::pinv(p.b);
  const Matrix u2t = left_kernel_rows(p.b);

  ProgramBuilder bld;
  const VarBlockRef dj = bld.add_skew_var("dJ", static_cast<int>(n));
  const VarBlockRef dr = bld.add_sym_var("dR", static_cast<int>(n));
  const VarBlockRef dp = bld.add_sym_var("dP", static_cast<int>(n));
  bld.require_psd(shifted_term(dr, r));
  bld.require_psd(shifted_term(dp, pmat - id * tol_pd));

  AffineMatrix manifold(static_cast<int>(u2t.rows()), static_cast<int>(n));
  manifold.add_product(1.0, u2t * p.a, dp, id);
  manifold.add_product(-1.0, u2t, dj, id);
  manifold.add_product(1.0, u2t, dr, id);
  bld.require_zero(manifold);

  bld.require_fro_bound(identity_term(dj, n), eps * j.norm_fro());
  bld.require_fro_bound(identity_term(dr, n), eps * r.norm_fro());
  bld.require_fro_bound(identity_term(dp, n), eps * pmat.norm_fro());

  AffineMatrix obj(g * (p.a - t * pinv_p));
  obj.add_product(-1.0, g, dj, pinv_p);
  obj.add_product(1.0, g, dr, pinv_p);
  obj.add_product(1.0, g * t * pinv_p, dp, pinv_p);
  bld.minimize({bld.add_norm_epigraph("t", obj, norm)});
  return bld.finalize();
}

ConicProgram build_ssf_bcd_jr(const dh::SystemPair& p, const Matrix& q, NormKind norm) {
  const std::size_t n = p.n();
  check_square(q, n, "build_ssf_bcd_jr");
  const Matrix g = la::pinv(p.b);
  const Matrix u2t = left_kernel_rows(p.b);

  ProgramBuilder bld;
  const VarBlockRef j = bld.add_skew_var("J", static_cast<int>(n));
  const VarBlockRef r = bld.add_sym_var("R", static_cast<int>(n));
  bld.require_psd(identity_term(r, n));

  AffineMatrix manifold(u2t * p.a);
  manifold.add_product(-1.0, u2t, j, q);
  manifold.add_product(1.0, u2t, r, q);
  bld.require_zero(manifold);

  AffineMatrix obj(g * p.a);
  obj.add_product(-1.0, g, j, q);
  obj.add_product(1.0, g, r, q);
  bld.minimize({bld.add_norm_epigraph("t", obj, norm)});
  return bld.finalize();
}

ConicProgram build_ssf_bcd_q(const dh::SystemPair& p, const Matrix& j, const Matrix& r,
                             NormKind norm, double tol_pd) {
  const std::size_t n = p.n();
  check_square(j, n, "build_ssf_bcd_q");
  check_square(r, n, "build_ssf_bcd_q");
  if (!(tol_pd > 0.0)) throw std::invalid_argument("build_ssf_bcd_q: tol_pd must be positive");
  const Matrix id = Matrix::identity(n);
  const Matrix t = j - r;
  const Matrix g = la::pinv(p.b);
  const Matrix u2t = left_kernel_rows(p.b);

  ProgramBuilder bld;
  const VarBlockRef q = bld.add_sym_var("Q", static_cast<int>(n));
  bld.require_psd(shifted_term(q, -id * tol_pd));

  AffineMatrix manifold(u2t * p.a);
  manifold.add_product(-1.0, u2t * t, q, id);
  bld.require_zero(manifold);

  AffineMatrix obj(g * p.a);
  obj.add_product(-1.0, g * t, q, id);
  bld.minimize({bld.add_norm_epigraph("t", obj, norm)});
  return bld.finalize();
}

ConicProgram build_sof_feasibility_step(const dh::SystemTriplet& s, const Matrix& j,
                                        const Matrix& r, const Matrix& pmat, double eps,
                                        NormKind norm, double tol_pd) {
  const std::size_t n = s.n();
  check_square(j, n, "build_sof_feasibility_step");
  check_square(r, n, "build_sof_feasibility_step");
  check_square(pmat, n, "build_sof_feasibility_step");
  check_step_params(eps, tol_pd);
  const Matrix id = Matrix::identity(n);
  const Matrix pinv_p = la::spd_inverse_floored(pmat, tol_pd);
  const Matrix t = j - r;
  const Matrix u2t = left_kernel_rows(s.b);
  const Matrix v2 = la::null_basis(s.c);
  const Matrix w0 = s.a - t * pinv_p;

  ProgramBuilder bld;
  const VarBlockRef dj = bld.add_skew_var("dJ", static_cast<int>(n));
  const VarBlockRef dr = bld.add_sym_var("dR", static_cast<int>(n));
  const VarBlockRef dp = bld.add_sym_var("dP", static_cast<int>(n));
  bld.require_psd(shifted_term(dr, r));
  bld.require_psd(shifted_term(dp, pmat - id * tol_pd));
  bld.require_fro_bound(identity_term(dj, n), eps * j.norm_fro());
  bld.require_fro_bound(identity_term(dr, n), eps * r.norm_fro());
  bld.require_fro_bound(identity_term(dp, n), eps * pmat.norm_fro());

  AffineMatrix left(u2t * w0);
  left.add_product(-1.0, u2t, dj, pinv_p);
  left.add_product(1.0, u2t, dr, pinv_p);
  left.add_product(1.0, u2t * t * pinv_p, dp, pinv_p);

  AffineMatrix right(w0 * v2);
  right.add_product(-1.0, id, dj, pinv_p * v2);
  right.add_product(1.0, id, dr, pinv_p * v2);
  right.add_product(1.0, t * pinv_p, dp, pinv_p * v2);

  const VarBlockRef t1 = bld.add_norm_epigraph("t1", left, norm);
  const VarBlockRef t2 = bld.add_norm_epigraph("t2", right, norm);
  bld.minimize({t1, t2});
  return bld.finalize();
}

ConicProgram build_sof_bcd_jr(const dh::SystemTriplet& s, const Matrix& q, NormKind norm) {
  const std::size_t n = s.n();
  check_square(q, n, "build_sof_bcd_jr");
  const la::RangeSplit rs = la::range_splitter(s.b);
  const Matrix u1t = rs.u.block(0, 0, n, rs.k).transpose();
  const Matrix u2t = rs.u.block(0, rs.k, n, n - rs.k).transpose();
  const Matrix v2 = la::null_basis(s.c);
  const Matrix g = la::pinv(s.b);
  const Matrix cd = la::pinv(s.c);

  ProgramBuilder bld;
  const VarBlockRef j = bld.add_skew_var("J", static_cast<int>(n));
  const VarBlockRef r = bld.add_sym_var("R", static_cast<int>(n));
  bld.require_psd(identity_term(r, n));

  AffineMatrix left(u2t * s.a);
  left.add_product(-1.0, u2t, j, q);
  left.add_product(1.0, u2t, r, q);
  bld.require_zero(left);

  AffineMatrix right(u1t * s.a * v2);
  right.add_product(-1.0, u1t, j, q * v2);
  right.add_product(1.0, u1t, r, q * v2);
  bld.require_zero(right);

  AffineMatrix obj(g * s.a * cd);
  obj.add_product(-1.0, g, j, q * cd);
  obj.add_product(1.0, g, r, q * cd);
  bld.minimize({bld.add_norm_epigraph("t", obj, norm)});
  return bld.finalize();
}

ConicProgram build_sof_bcd_q(const dh::SystemTriplet& s, const Matrix& j, const Matrix& r,
                             NormKind norm, double tol_pd) {
  const std::size_t n = s.n();
  check_square(j, n, "build_sof_bcd_q");
  check_square(r, n, "build_sof_bcd_q");
  if (!(tol_pd > 0.0)) throw std::invalid_argument("build_sof_bcd_q: tol_pd must be positive");
  const Matrix id = Matrix::identity(n);
  const Matrix t = j - r;
  const la::RangeSplit rs = la::range_splitter(s.b);
  const Matrix u1t = rs.u.block(0, 0, n, rs.k).transpose();
  const Matrix u2t = rs.u.block(0, rs.k, n, n - rs.k).transpose();
  const Matrix v2 = la::null_basis(s.c);
  const Matrix g = la::pinv(s.b);
  const Matrix cd = la::pinv(s.c);

  ProgramBuilder bld;
  const VarBlockRef q = bld.add_sym_var("Q", static_cast<int>(n));
  bld.require_psd(shifted_term(q, -id * tol_pd));

  AffineMatrix left(u2t * s.a);
  left.add_product(-1.0, u2t * t, q, id);
  bld.require_zero(left);

  AffineMatrix right(u1t * s.a * v2);
  right.add_product(-1.0, u1t * t, q, v2);
  bld.require_zero(right);

  AffineMatrix obj(g * s.a * cd);
  obj.add_product(-1.0, g * t, q, cd);
  bld.minimize({bld.add_norm_epigraph("t", obj, norm)});
  return bld.finalize();
}

ConicProgram build_sof_init_jr(const dh::SystemTriplet& s, const Matrix& q, NormKind norm) {
  const std::size_t n = s.n();
  check_square(q, n, "build_sof_init_jr");
  const Matrix id = Matrix::identity(n);
  const Matrix u2t = left_kernel_rows(s.b);
  const Matrix v2 = la::null_basis(s.c);

  ProgramBuilder bld;
  const VarBlockRef j = bld.add_skew_var("J", static_cast<int>(n));
  const VarBlockRef r = bld.add_sym_var("R", static_cast<int>(n));
  bld.require_psd(identity_term(r, n));

  AffineMatrix left(u2t * s.a);
  left.add_product(-1.0, u2t, j, q);
  left.add_product(1.0, u2t, r, q);

  AffineMatrix right(s.a * v2);
  right.add_product(-1.0, id, j, q * v2);
  right.add_product(1.0, id, r, q * v2);

  const VarBlockRef t1 = bld.add_norm_epigraph("t1", left, norm);
  const VarBlockRef t2 = bld.add_norm_epigraph("t2", right, norm);
  bld.minimize({t1, t2});
  return bld.finalize();
}

ConicProgram build_aic_feasibility(const dh::SystemTriplet& s, NormKind norm) {
  const std::size_t n = s.n();
  const Matrix id = Matrix::identity(n);
  const Matrix v2 = la::null_basis(s.c);

  ProgramBuilder bld;
  const VarBlockRef j = bld.add_skew_var("J", static_cast<int>(n));
  const VarBlockRef r = bld.add_sym_var("R", static_cast<int>(n));
  const VarBlockRef pm = bld.add_sym_var("P", static_cast<int>(n));
  bld.require_psd(identity_term(r, n));
  bld.require_psd(shifted_term(pm, -id));

  AffineMatrix resid(static_cast<int>(n), static_cast<int>(v2.cols()));
  resid.add_product(1.0, s.a, pm, v2);
  resid.add_product(-1.0, id, j, v2);
  resid.add_product(1.0, id, r, v2);
  bld.minimize({bld.add_norm_epigraph("t", resid, norm)});
  return bld.finalize();
}

}  // namespace dhstab::lmi
