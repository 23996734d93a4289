#pragma once

#include <string>
#include <vector>

#include "lmi/program.hpp"

namespace dhstab::conic {

enum class SolveStatus {
  optimal,
  infeasible_certificate,
  unbounded_certificate,
  iteration_limit,
  numerical_failure,
};

const char* status_name(SolveStatus s);

struct SolverOptions {
  double tol = 1e-8;
  int max_iters = 200;
  bool verbose = false;
};

struct Residuals {
  double primal_feas = 0.0;
  double dual_feas = 0.0;
  double duality_gap = 0.0;
};

// One row per interior-point iteration; bitwise identical across repeated
// solves of the same program, which is what the determinism tests pin.
struct IterateRecord {
  double mu = 0.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double gap = 0.0;
  double step = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
};

// status = optimal: primal/dual hold x and the equality multipliers y with
//   all residuals at most the requested tolerance.
// status = infeasible_certificate: dual holds y with A^T y in the polar
//   cone and b^T y = 1 (Farkas witness); primal is the last iterate.
// status = unbounded_certificate: primal holds x in the cone with
//   A x ~ 0 and c^T x = -1; dual is the last iterate.
struct ConicSolution {
  std::vector<double> primal;
  std::vector<double> dual;
  SolveStatus status = SolveStatus::numerical_failure;
  Residuals residuals;
  int iterations = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  std::vector<IterateRecord> trace;
  std::string diagnostic;
};

// Homogeneous self-dual interior-point solve with Nesterov-Todd scaling
// and Mehrotra predictor-corrector steps. Deterministic: fixed cone-interior
// initialization, no randomness.
ConicSolution solve(const lmi::ConicProgram& prog, const SolverOptions& opts = {});

}  // namespace dhstab::conic
