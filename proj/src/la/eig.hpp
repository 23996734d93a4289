#pragma once

#include "la/matrix.hpp"

namespace dhstab::la {

struct EigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unordered eigenvalue multiset; closed under conjugation for real input.
struct Spectrum {
  std::vector<std::complex<double>> values;
  double abscissa() const;
  std::size_t size() const { return values.size(); }
};

// Real Schur decomposition a = z * t * z^T, t upper quasi-triangular,
// z orthogonal. No balancing (the similarity must stay orthogonal).
struct SchurResult {
  Matrix t;
  Matrix z;
};

SchurResult schur(const Matrix& a);

// Eigenvalues via balancing + Hessenberg + double-shift QR.
Spectrum eig(const Matrix& a);
double spectral_abscissa(const Matrix& a);

// Eigenvalues plus unit right eigenvectors (inverse iteration), for
// residual-based verification.
struct EigPairs {
  std::vector<std::complex<double>> values;
  std::vector<std::vector<std::complex<double>>> vectors;
};

EigPairs eig_pairs(const Matrix& a);

// Symmetric eigendecomposition via cyclic Jacobi; values ascending,
// s = v * diag(values) * v^T.
struct SymEig {
  std::vector<double> values;
  Matrix v;
};

SymEig symmetric_eig(const Matrix& s);
double min_eig_sym(const Matrix& s);
double max_eig_sym(const Matrix& s);
// Symmetric square root with negative eigenvalues floored at zero.
Matrix sym_sqrt(const Matrix& s);
// Inverse of the symmetric part with eigenvalues floored at floor > 0,
// so near-singular iterates cannot blow up downstream programs.
Matrix spd_inverse_floored(const Matrix& s, double floor);

}  // namespace dhstab::la
