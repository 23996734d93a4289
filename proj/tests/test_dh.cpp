#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dh/dh.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "la/eig.hpp"
#include "la/factor.hpp"
#include "la/svd.hpp"
#include "reference_pair.hpp"
#include "triple_gen.hpp"

using namespace dhstab;
using namespace dhstab::dh;
using la::Matrix;
using la::Rng;
using testutil::diff;
using testutil::random_dh_triple;
using testutil::random_hurwitz;

TEST_CASE("triple construction enforces the cone memberships") {
  const Matrix rot = Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}});
  const Matrix id = Matrix::identity(2);

  DHTriple t(rot, id, id);
  CHECK(diff(t.j(), rot) == 0.0);
  CHECK(diff(t.j(), -t.j().transpose()) == 0.0);

  // J keeps only its skew part.
  DHTriple s(rot + id * 3.0, id, id);
  CHECK(diff(s.j(), rot) == 0.0);

  // R may be singular PSD and may carry roundoff-scale negativity.
  Rng rng(501);
  Matrix g = rng.gaussian(4, 2);
  CHECK_NOTHROW(DHTriple(Matrix(4, 4), g * g.transpose(), Matrix::identity(4)));
  Matrix tiny = Matrix::identity(2) * -1e-13;
  CHECK_NOTHROW(DHTriple(rot, tiny, id));

  CHECK_THROWS_AS(DHTriple(rot, Matrix::from_rows({{1.0, 2.0}, {2.0, 1.0}}), id),
                  std::invalid_argument);
  CHECK_THROWS_AS(DHTriple(rot, id, Matrix(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(DHTriple(rot, id, id * -1.0), std::invalid_argument);
  CHECK_THROWS_AS(DHTriple(Matrix(2, 3), id, id), std::invalid_argument);

  CHECK_NOTHROW(DHTripleInv(rot, id, id));
  CHECK_THROWS_AS(DHTripleInv(rot, id, id * 0.5), std::invalid_argument);
}

TEST_CASE("compose of valid triples is stable") {
  const Matrix id = Matrix::identity(2);
  CHECK(diff(compose(DHTriple(Matrix(2, 2), id, id)), id * -1.0) == 0.0);

  const Matrix rot = Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}});
  CHECK(std::abs(la::spectral_abscissa(compose(DHTriple(rot, Matrix(2, 2), id)))) <=
        1e-12);

  Rng rng(502);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    CAPTURE(trial);
    REQUIRE(la::spectral_abscissa(compose(random_dh_triple(rng, n))) <= 1e-8);
  }
}

TEST_CASE("dh_from_stable factors strictly Hurwitz matrices") {
  Matrix a3 = Matrix::identity(3) * -1.0;
  DHTriple t3 = dh_from_stable(a3);
  CHECK((compose(t3) - a3).norm_fro() <= 1e-10);

  Matrix a2 = Matrix::from_rows({{-1.0, 10.0}, {0.0, -1.0}});
  CHECK((compose(dh_from_stable(a2)) - a2).norm_fro() <= 1e-8 * a2.norm_fro());

  CHECK_THROWS_AS(dh_from_stable(Matrix::from_rows({{0.1}})), NotStable);
  CHECK_THROWS_AS(dh_from_stable(Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}})),
                  NotStable);

  Rng rng(503);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    Matrix a = random_hurwitz(rng, n);
    CAPTURE(trial);
    DHTriple t = dh_from_stable(a);
    REQUIRE((compose(t) - a).norm_fro() <= 1e-8 * a.norm_fro());
  }
}

TEST_CASE("transform_dh commutes with congruence") {
  Rng rng(504);
  DHTriple t = random_dh_triple(rng, 5);

  DHTriple tid = transform_dh(t, Matrix::identity(5));
  CHECK(diff(compose(tid), compose(t)) <= 1e-12);

  // Permutation: spectra of R and Q survive.
  Matrix perm(5, 5);
  const std::size_t order[5] = {2, 0, 4, 1, 3};
  for (std::size_t i = 0; i < 5; ++i) perm(order[i], i) = 1.0;
  DHTriple tp = transform_dh(t, perm);
  la::SymEig er0 = la::symmetric_eig(t.r()), er1 = la::symmetric_eig(tp.r());
  la::SymEig eq0 = la::symmetric_eig(t.q()), eq1 = la::symmetric_eig(tp.q());
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(er0.values[i] == doctest::Approx(er1.values[i]).epsilon(1e-10));
    CHECK(eq0.values[i] == doctest::Approx(eq1.values[i]).epsilon(1e-10));
  }

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 6);
    DHTriple tr = random_dh_triple(rng, n);
    Matrix u = rng.orthogonal(n);
    CAPTURE(trial);
    REQUIRE(diff(compose(transform_dh(tr, u)), u.transpose() * compose(tr) * u) <=
            1e-10 * (1.0 + compose(tr).norm_fro()));
  }

  CHECK_THROWS_AS(transform_dh(t, Matrix::identity(5) * 2.0), NotOrthogonal);
}

TEST_CASE("sun solvability and the solution family") {
  Rng rng(505);
  Matrix c0 = rng.gaussian(3, 3);
  CHECK(sun_solvable(Matrix::identity(3), Matrix::identity(3), c0));
  CHECK(diff(sun_solution(Matrix::identity(3), Matrix::identity(3), c0, Matrix(3, 3)),
             c0) <= 1e-12);

  CHECK(sun_solvable(Matrix::from_rows({{1.0, 0.0}}), Matrix::from_rows({{1.0}}),
                     Matrix::from_rows({{1.0}})));
  CHECK(!sun_solvable(Matrix(2, 2), Matrix::identity(2), Matrix::identity(2)));
  CHECK_THROWS_AS(
      sun_solution(Matrix(2, 2), Matrix::identity(2), Matrix::identity(2), Matrix(2, 2)),
      NotSolvable);

  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 2 + static_cast<std::size_t>(rng.uniform() * 3);
    const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 3);
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 3);
    const std::size_t q = 2 + static_cast<std::size_t>(rng.uniform() * 3);
    Matrix a = rng.gaussian(p, m);
    Matrix b = rng.gaussian(n, q);
    Matrix c = a * rng.gaussian(m, n) * b;
    CAPTURE(trial);
    REQUIRE(sun_solvable(a, b, c));
    const double ctol = 1e-8 * (1.0 + c.norm_fro());

    Matrix e0 = sun_solution(a, b, c, Matrix(m, n));
    REQUIRE((a * e0 * b - c).norm_fro() <= ctol);

    // Minimum norm against sampled members and the vectorized oracle.
    double best = 1e300;
    for (int zs = 0; zs < 20; ++zs) {
      Matrix e = sun_solution(a, b, c, rng.gaussian(m, n));
      REQUIRE((a * e * b - c).norm_fro() <= ctol);
      best = std::min(best, e.norm_fro());
    }
    REQUIRE(e0.norm_fro() <= best * (1.0 + 1e-12));
    Matrix evec = la::pinv(testutil::kron(b.transpose(), a)) * testutil::vec_cm(c);
    REQUIRE(diff(e0, testutil::unvec_cm(evec, m, n)) <= 1e-8);
  }
}

TEST_CASE("psd block conditions match the eigenvalue test") {
  CHECK(psd_block_check(Matrix::identity(4), 2));
  CHECK(!psd_block_check(Matrix::from_rows({{1.0, 1.0}, {1.0, 0.0}}), 1));
  CHECK_THROWS_AS(psd_block_check(Matrix::from_rows({{1.0, 1.0}, {0.0, 1.0}}), 1),
                  NotSymmetric);
  CHECK_THROWS_AS(psd_block_check(Matrix::identity(4), 0), std::invalid_argument);
  CHECK_THROWS_AS(psd_block_check(Matrix::identity(4), 4), std::invalid_argument);

  Rng rng(506);
  int positives = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 6;
    Matrix r;
    switch (trial % 4) {
      case 0:
        r = la::symmetrize(rng.gaussian(n, n));
        break;
      case 1: {  // PSD, possibly singular
        const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * n);
        Matrix g = rng.gaussian(n, k);
        r = g * g.transpose();
        break;
      }
      case 2: {  // indefinite with small negative part
        Matrix g = rng.gaussian(n, n);
        r = la::symmetrize(g * g.transpose()) -
            Matrix::identity(n) * (0.01 + rng.uniform());
        break;
      }
      default: {  // negative semidefinite
        Matrix g = rng.gaussian(n, 3);
        r = g * g.transpose() * -1.0;
        break;
      }
    }
    const bool oracle = la::min_eig_sym(r) >= -1e-9 * (1.0 + r.norm_fro());
    positives += oracle ? 1 : 0;
    CAPTURE(trial);
    REQUIRE(psd_block_check(r, 3) == oracle);
  }
  CHECK(positives > 50);  // both branches exercised
}

TEST_CASE("state feedback recovery from a zero-residual triple") {
  Rng rng(507);
  Matrix a = random_hurwitz(rng, 4);
  DHTriple t = dh_from_stable(a);
  SystemPair pr(a, rng.gaussian(4, 2));
  CHECK(g_feedback(pr, t).norm_fro() <= 1e-9 * (1.0 + a.norm_fro()));
  CHECK(ssf_residual(pr, t) <= 1e-9 * (1.0 + a.norm_fro()));

  SystemPair pid(a * 2.0, Matrix::identity(4));
  CHECK(diff(g_feedback(pid, t), a * 2.0 - compose(t)) <= 1e-12);
  CHECK(ssf_residual(pid, t) <= 1e-10 * (1.0 + a.norm_fro()));

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 6);
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 3);
    Matrix acl = random_hurwitz(rng, n);
    Matrix b = rng.gaussian(n, m);
    Matrix k0 = rng.gaussian(m, n);
    SystemPair p(acl + b * k0, b);
    DHTriple tt = dh_from_stable(acl);
    CAPTURE(trial);
    REQUIRE(ssf_residual(p, tt) <= 1e-9 * (1.0 + p.a.norm_fro()));
    REQUIRE(la::spectral_abscissa(p.a - p.b * g_feedback(p, tt)) <= 1e-6);
    REQUIRE(ssf_residual(p, tt, lmi::NormKind::spectral) <=
            ssf_residual(p, tt) * (1.0 + 1e-12));
  }
}

TEST_CASE("reference pair feedback is recovered through the factors") {
  const Matrix a = testutil::ref_a();
  const Matrix b = testutil::ref_b();
  const Matrix k = testutil::ref_k();
  DHTriple t = dh_from_stable(a - b * k);
  SystemPair p(a, b);
  Matrix g = g_feedback(p, t);
  CHECK(diff(g, k) <= 1e-5);
  CHECK(std::abs(la::spectral_abscissa(a - b * g) - (-2.4493)) <= 2e-3);
  CHECK(ssf_residual(p, t) <= 1e-6);
}

TEST_CASE("output feedback recovery from a zero-residual triple") {
  Rng rng(508);
  Matrix a = random_hurwitz(rng, 4);
  DHTriple t = dh_from_stable(a);
  SystemTriplet sid(a, Matrix::identity(4), Matrix::identity(4));
  CHECK(diff(f_feedback(sid, t), g_feedback(SystemPair(a, Matrix::identity(4)), t)) <=
        1e-12);
  SofResiduals rid = sof_residuals(sid, t);
  CHECK(rid.left <= 1e-10);
  CHECK(rid.right <= 1e-10);

  // Square invertible B, C: the recovery identity is exact algebra.
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 5);
    Matrix bb = testutil::well_conditioned(rng, n, 0.5, 2.0);
    Matrix cc = testutil::well_conditioned(rng, n, 0.5, 2.0);
    DHTriple tr = random_dh_triple(rng, n);
    SystemTriplet s(rng.gaussian(n, n), bb, cc);
    CAPTURE(trial);
    Matrix f = f_feedback(s, tr);
    REQUIRE((s.b * f * s.c - (s.a - compose(tr))).norm_fro() <=
            1e-10 * (1.0 + s.a.norm_fro()));
  }

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 5);
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 2);
    const std::size_t pp = 1 + static_cast<std::size_t>(rng.uniform() * 2);
    Matrix acl = random_hurwitz(rng, n);
    Matrix b = rng.gaussian(n, m);
    Matrix c = rng.gaussian(pp, n);
    Matrix k0 = rng.gaussian(m, pp);
    SystemTriplet s(acl + b * k0 * c, b, c);
    DHTriple tt = dh_from_stable(acl);
    CAPTURE(trial);
    SofResiduals res = sof_residuals(s, tt);
    REQUIRE(res.left <= 1e-9 * (1.0 + s.a.norm_fro()));
    REQUIRE(res.right <= 1e-9 * (1.0 + s.a.norm_fro()));
    REQUIRE(la::spectral_abscissa(s.a - s.b * f_feedback(s, tt) * s.c) <= 1e-6);
  }
}

TEST_CASE("feedback premultiplication conversions") {
  Rng rng(509);
  Matrix b = testutil::well_conditioned(rng, 3, 0.5, 2.0);
  Matrix w = rng.gaussian(3, 3);
  CHECK(diff(w_to_k(w, b, Matrix(3, 3)), la::solve(b, w)) <= 1e-10);

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 6);
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 3);
    Matrix a = rng.gaussian(n, n);
    Matrix bb = rng.gaussian(n, m);
    Matrix k = rng.gaussian(m, n);
    CAPTURE(trial);

    Matrix wc = k_to_w(k, bb, Matrix(n, n));
    REQUIRE(diff(wc, bb * k) <= 1e-14);
    Matrix kc = w_to_k(wc, bb, Matrix(m, n));
    const Matrix pb = la::pinv(bb);
    REQUIRE(diff(kc, pb * bb * k) <= 1e-12 * (1.0 + k.norm_fro()));

    Matrix wn = k_to_w(k, bb, rng.gaussian(n, n));
    Matrix cl1 = a - bb * k;
    Matrix cl2 = a - bb * pb * wn;
    REQUIRE(diff(cl1, cl2) <= 1e-10 * (1.0 + cl1.norm_fro()));
    REQUIRE(testutil::spectrum_gap(la::eig(cl2).values, la::eig(cl1).values) <=
            1e-8 * (1.0 + cl1.norm_fro()));
  }
}

TEST_CASE("abscissa shift") {
  Rng rng(510);
  Matrix a = rng.gaussian(4, 4);
  CHECK(diff(rho_shift(a, 0.0), a) == 0.0);
  CHECK(la::spectral_abscissa(rho_shift(Matrix::identity(3) * -1.0, 0.5)) ==
        doctest::Approx(-0.5));
  CHECK(diff(rho_shift(a, 2.5) - a, Matrix::identity(4) * 2.5) == 0.0);
}

TEST_CASE("compose is invariant under the scaling gauge") {
  Rng rng(511);
  for (double alpha : {0.25, 1.0, 7.5}) {
    DHTriple t = random_dh_triple(rng, 5);
    DHTriple scaled(t.j() * alpha, t.r() * alpha, t.q() * (1.0 / alpha));
    CHECK(diff(compose(scaled), compose(t)) <= 1e-12 * (1.0 + compose(t).norm_fro()));
    SystemPair p(rng.gaussian(5, 5), rng.gaussian(5, 2));
    CHECK(ssf_residual(p, scaled) ==
          doctest::Approx(ssf_residual(p, t)).epsilon(1e-10));
  }
}
