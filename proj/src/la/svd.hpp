#pragma once

#include "la/matrix.hpp"

namespace dhstab::la {

struct SvdFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full decomposition M = U * diag_rect(s) * V^T with U rows x rows and
// V cols x cols orthogonal, s descending of length min(rows, cols).
struct SvdResult {
  Matrix u;
  std::vector<double> s;
  Matrix v;
  Matrix reconstruct() const;
};

SvdResult svd(const Matrix& m);

// max(rows, cols) * eps * s_max; the conventional cutoff
double default_rank_tol(const Matrix& m, const std::vector<double>& s);

std::size_t numeric_rank(const std::vector<double>& s, double tol);

Matrix pinv(const Matrix& m);                  // default rank tolerance
Matrix pinv(const Matrix& m, double rank_tol);

double norm_two(const Matrix& m);  // largest singular value

// Orthogonal U with U^T(BB+)U = diag(I_k, 0); columns spanning range(B) first.
struct RangeSplit {
  Matrix u;
  std::size_t k = 0;
};

RangeSplit range_splitter(const Matrix& b, double rank_tol = -1.0);

// Orthonormal basis of the null space of m (columns); empty cols if full rank.
Matrix null_basis(const Matrix& m, double rank_tol = -1.0);

}  // namespace dhstab::la
