#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "la/eig.hpp"
#include "la/factor.hpp"
#include "la/svd.hpp"
#include "reference_pair.hpp"

using namespace dhstab::la;
using testutil::diff;
using testutil::spectrum_gap;

namespace {

// Companion matrix of the monic polynomial x^d + a[d-1] x^{d-1} + ... + a[0].
Matrix companion(const std::vector<double>& a) {
  const std::size_t d = a.size();
  Matrix c(d, d);
  for (std::size_t i = 1; i < d; ++i) c(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < d; ++i) c(i, d - 1) = -a[i];
  return c;
}

// Monic coefficients (low degree first, without the leading 1) of the
// polynomial with the given real quadratic/linear factors.
std::vector<double> poly_from_factors(const std::vector<std::vector<double>>& factors) {
  std::vector<double> p{1.0};
  for (const auto& f : factors) {
    std::vector<double> q(p.size() + f.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < f.size(); ++j) q[i + j] += p[i] * f[j];
    p = std::move(q);
  }
  p.pop_back();  // drop the leading 1
  return p;
}

}  // namespace

TEST_CASE("eig trivial spectra") {
  CHECK(spectrum_gap(eig(Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}})).values,
                     {{0.0, 1.0}, {0.0, -1.0}}) <= 1e-14);
  CHECK(spectral_abscissa(Matrix::identity(5) * -1.0) == doctest::Approx(-1.0));
  CHECK(spectral_abscissa(Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eig(Matrix(0, 0)).values.empty());
  CHECK(spectrum_gap(eig(Matrix::from_rows({{7.0}})).values, {{7.0, 0.0}}) <= 1e-15);
}

TEST_CASE("eig regression on the reference pair") {
  const Matrix a = testutil::ref_a();
  CHECK(spectrum_gap(eig(a).values, {{1.9604, 1.8099},
                                     {1.9604, -1.8099},
                                     {-1.8378, 0.0},
                                     {-1.1032, 0.0}}) <= 1e-3);
  CHECK(spectral_abscissa(a) == doctest::Approx(1.9604).epsilon(1e-3));

  // Closed loop. The frozen 4-decimal feedback perturbs the spectrum by
  // about 5e-3, so the comparison tolerance reflects that rounding noise.
  const Matrix acl = a - testutil::ref_b() * testutil::ref_k();
  CHECK(spectrum_gap(eig(acl).values, {{-9.9703, 0.0},
                                       {-8.7173, 0.0},
                                       {-2.4493, 0.0},
                                       {-3.1767, 0.0}}) <= 1e-2);
  CHECK(std::abs(spectral_abscissa(acl) - (-2.4493)) <= 2e-3);
}

TEST_CASE("eig of the uncontrolled block is basis independent") {
  const Matrix a = testutil::ref_a();
  RangeSplit rs = range_splitter(testutil::ref_b());
  REQUIRE(rs.k == 2);
  const Matrix u2 = rs.u.block(0, rs.k, 4, 4 - rs.k);
  const Matrix a22 = u2.transpose() * a * u2;
  CHECK(spectrum_gap(eig(a22).values, {{1.4672, 1.1986}, {1.4672, -1.1986}}) <= 1e-3);
}

TEST_CASE("eig recovers polynomial roots from companion matrices") {
  for (std::size_t d = 2; d <= 12; ++d) {
    std::vector<double> a(d, 0.0);
    a[0] = -1.0;  // x^d - 1
    std::vector<std::complex<double>> roots;
    for (std::size_t j = 0; j < d; ++j) {
      const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(d);
      roots.emplace_back(std::cos(th), std::sin(th));
    }
    CAPTURE(d);
    REQUIRE(spectrum_gap(eig(companion(a)).values, roots) <= 1e-8);
  }

  // Twelve well separated real roots.
  std::vector<std::vector<double>> factors;
  std::vector<std::complex<double>> roots;
  for (int i = 1; i <= 6; ++i) {
    const double r = 0.25 * i;
    factors.push_back({-r * r, 0.0, 1.0});  // (x - r)(x + r)
    roots.emplace_back(r, 0.0);
    roots.emplace_back(-r, 0.0);
  }
  CHECK(spectrum_gap(eig(companion(poly_from_factors(factors))).values, roots) <= 1e-8);

  // Mixed real and complex roots: (x^2+x+1)(x^2-2x+2)(x+3).
  const auto p = poly_from_factors({{1.0, 1.0, 1.0}, {2.0, -2.0, 1.0}, {3.0, 1.0}});
  CHECK(spectrum_gap(eig(companion(p)).values,
                     {{-0.5, std::sqrt(3.0) / 2.0},
                      {-0.5, -std::sqrt(3.0) / 2.0},
                      {1.0, 1.0},
                      {1.0, -1.0},
                      {-3.0, 0.0}}) <= 1e-10);
}

TEST_CASE("eig spectra are conjugate closed and trace consistent") {
  Rng rng(301);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 12);
    Matrix a = rng.gaussian(n, n);
    CAPTURE(trial);
    Spectrum sp = eig(a);
    REQUIRE(sp.size() == n);
    std::complex<double> sum = 0.0;
    for (const auto& v : sp.values) sum += v;
    REQUIRE(std::abs(sum - a.trace()) <= 1e-8 * (1.0 + a.norm_fro()) * n);
    for (const auto& v : sp.values) {
      if (std::abs(v.imag()) == 0.0) continue;
      double best = 1e300;
      for (const auto& w : sp.values) best = std::min(best, std::abs(w - std::conj(v)));
      REQUIRE(best <= 1e-8 * (1.0 + std::abs(v)));
    }
  }
}

TEST_CASE("eig handles badly scaled input via balancing") {
  // Integer similarity keeps the exact spectrum {1,2,3}; the diagonal
  // scaling spreads entry magnitudes over twelve orders.
  const Matrix s = Matrix::from_rows({{1, 1, 0}, {0, 1, 1}, {0, 0, 1}});
  const Matrix sinv = Matrix::from_rows({{1, -1, 1}, {0, 1, -1}, {0, 0, 1}});
  Matrix lam(3, 3);
  lam(0, 0) = 1.0;
  lam(1, 1) = 2.0;
  lam(2, 2) = 3.0;
  const Matrix m = s * lam * sinv;
  Matrix a(3, 3);
  const double d[3] = {1e6, 1.0, 1e-6};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = m(i, j) * d[i] / d[j];
  CHECK(spectrum_gap(eig(a).values, {{1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}}) <= 1e-9);
}

TEST_CASE("eig_pairs residuals are small") {
  Rng rng(302);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 9);
    Matrix a = rng.gaussian(n, n);
    CAPTURE(trial);
    EigPairs ep = eig_pairs(a);
    REQUIRE(ep.values.size() == n);
    for (std::size_t e = 0; e < n; ++e) {
      const auto& v = ep.vectors[e];
      double rnorm = 0.0, vnorm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> ri = -ep.values[e] * v[i];
        for (std::size_t j = 0; j < n; ++j) ri += a(i, j) * v[j];
        rnorm += std::norm(ri);
        vnorm += std::norm(v[i]);
      }
      REQUIRE(std::sqrt(vnorm) == doctest::Approx(1.0).epsilon(1e-10));
      REQUIRE(std::sqrt(rnorm) <= 1e-8 * a.norm_fro());
    }
  }
}

TEST_CASE("schur factors are orthogonal and quasi triangular") {
  Rng rng(303);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 12);
    Matrix a = rng.gaussian(n, n);
    CAPTURE(trial);
    SchurResult f = schur(a);
    REQUIRE(testutil::is_identity(f.z.transpose() * f.z, 1e-12));
    REQUIRE((f.z * f.t * f.z.transpose() - a).norm_fro() <= 1e-11 * (1.0 + a.norm_fro()));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j + 2 <= i; ++j) REQUIRE(f.t(i, j) == 0.0);
    for (std::size_t i = 0; i + 2 < n; ++i)
      REQUIRE((f.t(i + 1, i) == 0.0 || f.t(i + 2, i + 1) == 0.0));
    REQUIRE(spectrum_gap(eig(f.t).values, eig(a).values) <= 1e-7 * (1.0 + a.norm_fro()));
  }
}

TEST_CASE("symmetric eigendecomposition") {
  Rng rng(304);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 12);
    Matrix s = symmetrize(rng.gaussian(n, n));
    CAPTURE(trial);
    SymEig se = symmetric_eig(s);
    REQUIRE(se.values.size() == n);
    for (std::size_t i = 1; i < n; ++i) REQUIRE(se.values[i - 1] <= se.values[i]);
    REQUIRE(testutil::is_identity(se.v.transpose() * se.v, 1e-12));
    Matrix lam(n, n);
    for (std::size_t i = 0; i < n; ++i) lam(i, i) = se.values[i];
    REQUIRE(diff(se.v * lam * se.v.transpose(), s) <= 1e-10 * (1.0 + s.norm_fro()));
    REQUIRE(min_eig_sym(s) == doctest::Approx(se.values.front()).epsilon(1e-12));
    REQUIRE(max_eig_sym(s) == doctest::Approx(se.values.back()).epsilon(1e-12));
  }
}

TEST_CASE("symmetric square root") {
  Rng rng(305);
  Matrix s = testutil::spd_with_spectrum(rng, 6, 0.1, 4.0);
  Matrix x = sym_sqrt(s);
  CHECK(diff(x, x.transpose()) <= 1e-13);
  CHECK(diff(x * x, s) <= 1e-10 * (1.0 + s.norm_fro()));

  // Semidefinite case: eigenvalues at zero are kept at zero.
  Matrix g = rng.gaussian(5, 2);
  Matrix psd = g * g.transpose();
  Matrix y = sym_sqrt(psd);
  CHECK(diff(y * y, psd) <= 1e-10 * (1.0 + psd.norm_fro()));
  CHECK(min_eig_sym(y) >= -1e-12);
}
