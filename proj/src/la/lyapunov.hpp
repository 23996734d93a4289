#pragma once

#include "la/matrix.hpp"

namespace dhstab::la {

struct LyapunovSingular : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solves a*x + x*a^T = c for symmetric c (Bartels-Stewart on the real Schur
// form of a). Throws LyapunovSingular when eigenvalues of a pair to zero.
Matrix lyap_solve(const Matrix& a, const Matrix& c);

}  // namespace dhstab::la
