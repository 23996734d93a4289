#pragma once

#include <stdexcept>

#include "la/matrix.hpp"
#include "lmi/norm_kind.hpp"

namespace dhstab::dh {

using la::Matrix;
using lmi::NormKind;

struct NotStable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LyapunovFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotOrthogonal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotSolvable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotSymmetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (J - R) Q factors of a stable matrix: J skew, R PSD, Q PD. The stored J is
// the skew part of the input; R and Q are symmetrized and then gated on
// their smallest eigenvalue.
class DHTriple {
 public:
  DHTriple(Matrix j, Matrix r, Matrix q, double tol_pd = 1e-10);

  const Matrix& j() const { return j_; }
  const Matrix& r() const { return r_; }
  const Matrix& q() const { return q_; }
  std::size_t n() const { return j_.rows(); }

 private:
  Matrix j_, r_, q_;
};

// Same factors with P standing in for Q^{-1}, gauge-fixed to P >= I.
class DHTripleInv {
 public:
  DHTripleInv(Matrix j, Matrix r, Matrix p);

  const Matrix& j() const { return j_; }
  const Matrix& r() const { return r_; }
  const Matrix& p() const { return p_; }
  std::size_t n() const { return j_.rows(); }

 private:
  Matrix j_, r_, p_;
};

struct SystemPair {
  Matrix a;  // n x n
  Matrix b;  // n x m
  SystemPair(Matrix a_, Matrix b_);
  std::size_t n() const { return a.rows(); }
  std::size_t m() const { return b.cols(); }
};

struct SystemTriplet {
  Matrix a;  // n x n
  Matrix b;  // n x m
  Matrix c;  // p x n
  SystemTriplet(Matrix a_, Matrix b_, Matrix c_);
  std::size_t n() const { return a.rows(); }
  std::size_t m() const { return b.cols(); }
  std::size_t p() const { return c.rows(); }
};

Matrix compose(const DHTriple& t);  // (J - R) Q

// Factors any strictly Hurwitz matrix through the Lyapunov equation
// A X + X A^T = -I: Q = X^{-1}, J - R = A X split into skew and symmetric
// parts. Throws NotStable when the abscissa is nonnegative, LyapunovFailure
// when X fails to be positive definite.
DHTriple dh_from_stable(const Matrix& a, double tol_pd = 1e-10);

// Congruence by an orthogonal U: (U^T J U, U^T R U, U^T Q U).
DHTriple transform_dh(const DHTriple& t, const Matrix& u);

// Solvability of A E B = C in E and its solution family
// E = A'CB' + Z - A'AZBB' (primes are pseudoinverses); Z = 0 gives the
// minimum Frobenius norm solution.
bool sun_solvable(const Matrix& a, const Matrix& b, const Matrix& c);
Matrix sun_solution(const Matrix& a, const Matrix& b, const Matrix& c,
                    const Matrix& z);

// Positive semidefiniteness of the symmetric block matrix
// [[B1, C1^T], [C1, D1]] (B1 is s x s) through the three block conditions:
// D1 PSD, null(D1) inside null(C1^T), and the Schur complement
// B1 - C1^T D1^+ C1 PSD.
bool psd_block_check(const Matrix& r, std::size_t s);

// State feedback recovered from a triple: g = B^+ (A - (J-R)Q).
Matrix g_feedback(const SystemPair& p, const DHTriple& t);

// Size of the uncontrollable residual (I - BB^+)(A - (J-R)Q).
double ssf_residual(const SystemPair& p, const DHTriple& t,
                    NormKind norm = NormKind::frobenius);

// Output feedback recovered from a triple: f = B^+ (A - (J-R)Q) C^+.
Matrix f_feedback(const SystemTriplet& s, const DHTriple& t);

struct SofResiduals {
  double left = 0.0;   // ||(I - BB^+)(A - (J-R)Q)||
  double right = 0.0;  // ||(A - (J-R)Q)(C^+C - I)||
};

SofResiduals sof_residuals(const SystemTriplet& s, const DHTriple& t,
                           NormKind norm = NormKind::frobenius);

// Conversions between feedbacks K and their premultiplied forms W = BK + ...:
// both leave the closed loop A - BK = A - BB^+ W unchanged.
Matrix w_to_k(const Matrix& w, const Matrix& b, const Matrix& y);
Matrix k_to_w(const Matrix& k, const Matrix& b, const Matrix& n);

Matrix rho_shift(const Matrix& a, double rho);  // A + rho I

}  // namespace dhstab::dh
