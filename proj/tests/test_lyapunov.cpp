#include <cmath>
#include <cstddef>

#include "doctest.h"
#include "helpers.hpp"
#include "la/eig.hpp"
#include "la/factor.hpp"
#include "la/lyapunov.hpp"

using namespace dhstab::la;
using testutil::diff;

namespace {

using testutil::kron;

// Independent oracle: solve the n^2 linear system for vec(X) column-major.
Matrix lyap_oracle(const Matrix& a, const Matrix& c) {
  const std::size_t n = a.rows();
  const Matrix id = Matrix::identity(n);
  const Matrix k = kron(id, a) + kron(a, id);
  Matrix rhs(n * n, 1);
  for (std::size_t col = 0; col < n; ++col)
    for (std::size_t row = 0; row < n; ++row) rhs(col * n + row, 0) = c(row, col);
  const Matrix sol = solve(k, rhs);
  Matrix x(n, n);
  for (std::size_t col = 0; col < n; ++col)
    for (std::size_t row = 0; row < n; ++row) x(row, col) = sol(col * n + row, 0);
  return x;
}

void check_against_oracle(const Matrix& a, const Matrix& c, int trial) {
  CAPTURE(trial);
  const Matrix x = lyap_solve(a, c);
  REQUIRE(diff(x, x.transpose()) == 0.0);
  const double scale = 1.0 + a.norm_fro() * x.norm_fro();
  REQUIRE((a * x + x * a.transpose() - c).norm_fro() <= 1e-10 * scale);
  REQUIRE(diff(x, lyap_oracle(a, c)) <= 1e-8 * (1.0 + x.max_abs()));
}

}  // namespace

TEST_CASE("lyapunov solve on closed forms") {
  // a = -I: -2x = c.
  Rng rng(401);
  Matrix c = symmetrize(rng.gaussian(4, 4));
  Matrix x = lyap_solve(Matrix::identity(4) * -1.0, c);
  CHECK(diff(x, c * -0.5) <= 1e-14);

  // Diagonal a: x_ij = c_ij / (a_i + a_j).
  Matrix a(3, 3);
  a(0, 0) = -1.0;
  a(1, 1) = -2.0;
  a(2, 2) = -3.0;
  Matrix cs = symmetrize(rng.gaussian(3, 3));
  Matrix xd = lyap_solve(a, cs);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(xd(i, j) == doctest::Approx(cs(i, j) / (a(i, i) + a(j, j))).epsilon(1e-12));

  // Scalar and empty.
  Matrix x1 = lyap_solve(Matrix::from_rows({{-2.0}}), Matrix::from_rows({{4.0}}));
  CHECK(x1(0, 0) == doctest::Approx(-1.0));
  CHECK(lyap_solve(Matrix(0, 0), Matrix(0, 0)).empty());
}

TEST_CASE("lyapunov solve matches the dense oracle") {
  Rng rng(402);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 9);
    Matrix g = rng.gaussian(n, n);
    // Shift well clear of eigenvalue pairs summing to zero.
    Matrix a = g - Matrix::identity(n) * (spectral_abscissa(g) + 0.5);
    Matrix c = symmetrize(rng.gaussian(n, n));
    check_against_oracle(a, c, trial);
  }
  // Same equation, all eigenvalues in the right half plane.
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    Matrix g = rng.gaussian(n, n);
    Spectrum sp = eig(g);
    double leftmost = 1e300;
    for (const auto& v : sp.values) leftmost = std::min(leftmost, v.real());
    Matrix a = g + Matrix::identity(n) * (0.5 - leftmost);
    check_against_oracle(a, symmetrize(rng.gaussian(n, n)), trial);
  }
}

TEST_CASE("lyapunov solve with complex spectra") {
  Matrix a = Matrix::from_rows({{-1.0, 2.0}, {-2.0, -1.0}});
  Rng rng(403);
  check_against_oracle(a, symmetrize(rng.gaussian(2, 2)), 0);

  Matrix rot4 = Matrix::from_rows({{-1.0, 5.0, 0.3, 0.0},
                                   {-5.0, -1.0, 0.0, 0.1},
                                   {0.0, 0.2, -2.0, 7.0},
                                   {0.0, 0.0, -7.0, -2.0}});
  check_against_oracle(rot4, symmetrize(rng.gaussian(4, 4)), 1);
}

TEST_CASE("lyapunov solve rejects singular spectra") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;  // eigenvalue pair sums to zero
  CHECK_THROWS_AS(lyap_solve(a, Matrix::identity(2) * -1.0), LyapunovSingular);
  CHECK_THROWS(lyap_solve(Matrix(2, 3), Matrix(2, 2)));
  CHECK_THROWS(lyap_solve(Matrix(2, 2), Matrix(3, 3)));
}
