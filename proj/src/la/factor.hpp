#pragma once

#include "la/matrix.hpp"

namespace dhstab::la {

struct LuFactors {
  Matrix lu;              // L (unit diag, below) and U (on/above) packed
  std::vector<int> piv;   // row swaps applied at each step
  bool singular = false;
};

LuFactors lu_factor(Matrix a);
Matrix lu_solve(const LuFactors& f, Matrix b);  // throws on singular
Matrix solve(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);

struct CholFactors {
  Matrix l;        // lower triangular
  bool ok = false; // false: matrix not positive definite to working precision
};

CholFactors cholesky(const Matrix& s);
Matrix chol_solve(const CholFactors& f, Matrix b);
// Inverse of a symmetric positive definite matrix; throws if Cholesky fails.
Matrix spd_inverse(const Matrix& s);

struct QrFactors {
  Matrix q;  // full square orthogonal, rows(a) x rows(a)
  Matrix r;  // rows(a) x cols(a), upper trapezoidal
};

QrFactors qr(const Matrix& a);

}  // namespace dhstab::la
