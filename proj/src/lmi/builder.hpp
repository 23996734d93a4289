#pragma once

#include <map>
#include <string>
#include <vector>

#include "lmi/affine.hpp"
#include "lmi/norm_kind.hpp"
#include "lmi/program.hpp"

namespace dhstab::lmi {

// Assembles a ConicProgram from declared variables and affine constraints.
// Named variables live in free blocks with raw coordinates; cone membership
// of affine expressions is enforced through anonymous slack blocks tied to
// the expression by equality rows.
class ProgramBuilder {
 public:
  VarBlockRef add_skew_var(const std::string& name, int order);
  VarBlockRef add_sym_var(const std::string& name, int order);
  VarBlockRef add_general_var(const std::string& name, int rows, int cols);
  VarBlockRef add_scalar_var(const std::string& name);

  // expr == 0 entrywise
  void require_zero(const AffineMatrix& expr);
  // expr (symmetric by construction) is positive semidefinite
  void require_psd(const AffineMatrix& expr);
  // ||expr||_F <= radius; radius 0 collapses to expr == 0
  void require_fro_bound(const AffineMatrix& expr, double radius);
  // t >= ||expr|| in the given norm; returns the slice holding t
  VarBlockRef add_norm_epigraph(const std::string& name, const AffineMatrix& expr,
                                NormKind kind);

  // objective: minimize the sum of the given scalar variables
  void minimize(const std::vector<VarBlockRef>& scalars);

  // Equality rows are scaled to unit coefficient norm unless disabled;
  // vacuous 0 = 0 rows are dropped either way.
  ConicProgram finalize(bool scale_equalities = true) const;

 private:
  using Row = std::map<int, double>;

  VarBlockRef declare(VarSlice slice, ConeKind kind);
  // accumulates the linear coefficients of expr entry (i, j), times mult
  void scatter_entry(const AffineMatrix& expr, int i, int j, double mult, Row& row) const;
  void emit(Row row, double rhs);

  std::vector<VarSlice> slices_;        // named variables only
  std::vector<ConeBlock> cones_;        // every block, named and anonymous
  int num_vars_ = 0;
  std::vector<Row> rows_;
  std::vector<double> rhs_;
  std::vector<VarBlockRef> objective_;
};

}  // namespace dhstab::lmi
