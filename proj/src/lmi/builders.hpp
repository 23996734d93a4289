#pragma once

#include "dh/dh.hpp"
#include "lmi/norm_kind.hpp"
#include "lmi/program.hpp"

namespace dhstab::lmi {

// Every program below reduces annihilator factors through orthonormal bases:
// ||(I - BB^+)X|| == ||U2^T X|| and ||X(C^+C - I)|| == ||X V2|| with U2
// spanning ker(B^T) and V2 spanning ker(C), which keeps equality rows full
// row rank and shrinks the norm blocks. Optimal values are unchanged.

// Feasibility of state feedback: minimize ||U2^T (A P - J + R)|| over
// J skew, R >= 0, P >= I. Optimal value 0 iff a stabilizing K exists.
// Slices: J, R, P, t.
ConicProgram build_ssf_feasibility(const dh::SystemPair& p, NormKind norm);

// Same value through fewer variables, written in the coordinates of the
// range splitting U (rank(B) = k): minimize
// ||[Ahat21 Ahat22] P - [J21 - R21, J22 - R22]|| over P >= I, J22 skew,
// R22 >= 0 and free J21, R21. Slices: P, t and (when nonempty) J21, J22,
// R21, R22.
ConicProgram build_ssf_feasibility_reduced(const dh::SystemPair& p, const la::Matrix& u,
                                           std::size_t k, NormKind norm);

// Trust-region step for min ||B^+(A - (J-R)P^{-1})||: linearizes the
// inverse around the iterate (j, r, pmat) and bounds each increment by
// eps times the Frobenius norm of its block. The equality
// U2^T (A dP - dJ + dR) = 0 keeps iterates on the feasible manifold.
// Slices: dJ, dR, dP, t.
ConicProgram build_ssdp_step(const dh::SystemPair& p, const la::Matrix& j,
                             const la::Matrix& r, const la::Matrix& pmat, double eps,
                             NormKind norm, double tol_pd = 1e-8);

// Alternation blocks for min ||B^+(A - (J-R)Q)|| s.t. U2^T(A - (J-R)Q) = 0:
// (J, R) with Q fixed, then Q with (J, R) fixed. Slices: J, R, t resp. Q, t.
ConicProgram build_ssf_bcd_jr(const dh::SystemPair& p, const la::Matrix& q, NormKind norm);
ConicProgram build_ssf_bcd_q(const dh::SystemPair& p, const la::Matrix& j,
                             const la::Matrix& r, NormKind norm, double tol_pd = 1e-8);

// Trust-region step on the output-feedback residual sum
// ||U2^T W|| + ||W V2||, W the linearized A - (J-R)P^{-1}. Same cones and
// trust regions as the state-feedback step but no equality rows: the
// residuals are the objective. Slices: dJ, dR, dP, t1, t2.
ConicProgram build_sof_feasibility_step(const dh::SystemTriplet& s, const la::Matrix& j,
                                        const la::Matrix& r, const la::Matrix& pmat,
                                        double eps, NormKind norm, double tol_pd = 1e-8);

// Alternation blocks for min ||B^+(A - (J-R)Q)C^+|| under both residual
// equalities U2^T(A - (J-R)Q) = 0 and U1^T(A - (J-R)Q)V2 = 0.
// Slices: J, R, t resp. Q, t.
ConicProgram build_sof_bcd_jr(const dh::SystemTriplet& s, const la::Matrix& q, NormKind norm);
ConicProgram build_sof_bcd_q(const dh::SystemTriplet& s, const la::Matrix& j,
                             const la::Matrix& r, NormKind norm, double tol_pd = 1e-8);

// (J, R) minimizer of the residual sum ||U2^T(A - (J-R)Q)|| + ||(A - (J-R)Q)V2||
// for a fixed Q; pins the initial (J, R) to an initialization's choice of P.
// Slices: J, R, t1, t2.
ConicProgram build_sof_init_jr(const dh::SystemTriplet& s, const la::Matrix& q, NormKind norm);

// Right-sided feasibility used by the AIC initialization: minimize
// ||(A P - J + R) V2|| over J skew, R >= 0, P >= I. Slices: J, R, P, t.
ConicProgram build_aic_feasibility(const dh::SystemTriplet& s, NormKind norm);

}  // namespace dhstab::lmi
