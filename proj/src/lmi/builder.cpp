#include "lmi/builder.hpp"

#include <cmath>

namespace dhstab::lmi {
namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

VarBlockRef ProgramBuilder::declare(VarSlice slice, ConeKind kind) {
  for (const VarSlice& s : slices_) {
    if (s.name == slice.name) throw std::invalid_argument("duplicate variable '" + slice.name + "'");
  }
  slice.offset = num_vars_;
  if (slice.size > 0) {
    cones_.push_back({kind, slice.size});
    num_vars_ += slice.size;
  }
  slices_.push_back(slice);
  return {static_cast<int>(slices_.size()) - 1};
}

VarBlockRef ProgramBuilder::add_skew_var(const std::string& name, int order) {
  if (order < 0) throw std::invalid_argument("add_skew_var: negative order");
  return declare({name, VarSlice::Shape::skew, 0, skew_coord_count(order), order, order},
                 ConeKind::free_var);
}

VarBlockRef ProgramBuilder::add_sym_var(const std::string& name, int order) {
  if (order < 0) throw std::invalid_argument("add_sym_var: negative order");
  return declare({name, VarSlice::Shape::symmetric, 0, sym_coord_count(order), order, order},
                 ConeKind::free_var);
}

VarBlockRef ProgramBuilder::add_general_var(const std::string& name, int rows, int cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("add_general_var: negative dimension");
  return declare({name, VarSlice::Shape::general, 0, rows * cols, rows, cols},
                 ConeKind::free_var);
}

VarBlockRef ProgramBuilder::add_scalar_var(const std::string& name) {
  return declare({name, VarSlice::Shape::scalar, 0, 1, 1, 1}, ConeKind::free_var);
}

void ProgramBuilder::scatter_entry(const AffineMatrix& expr, int i, int j, double mult,
                                   Row& row) const {
  for (const AffineMatrix::ProductTerm& term : expr.products()) {
    if (term.var.index < 0 || term.var.index >= static_cast<int>(slices_.size())) {
      throw std::invalid_argument("expression references a variable from another builder");
    }
    const VarSlice& s = slices_[term.var.index];
    const la::Matrix& l = term.left;
    const la::Matrix& r = term.right;
    if (static_cast<int>(l.cols()) != s.rows || static_cast<int>(r.rows()) != s.cols) {
      throw std::invalid_argument("product term dimensions do not match variable '" + s.name + "'");
    }
    const double a = mult * term.alpha;
    int k = s.offset;
    switch (s.shape) {
      case VarSlice::Shape::symmetric:
        for (int q = 0; q < s.cols; ++q) {
          row[k++] += a * l(i, q) * r(q, j);
          for (int p = q + 1; p < s.rows; ++p) row[k++] += a * (l(i, p) * r(q, j) + l(i, q) * r(p, j));
        }
        break;
      case VarSlice::Shape::skew:
        for (int q = 0; q < s.cols; ++q) {
          for (int p = q + 1; p < s.rows; ++p) row[k++] += a * (l(i, p) * r(q, j) - l(i, q) * r(p, j));
        }
        break;
      case VarSlice::Shape::general:
      case VarSlice::Shape::scalar:
        for (int q = 0; q < s.cols; ++q) {
          for (int p = 0; p < s.rows; ++p) row[k++] += a * l(i, p) * r(q, j);
        }
        break;
    }
  }
  for (const AffineMatrix::ScalarTerm& term : expr.scalars()) {
    if (term.var.index < 0 || term.var.index >= static_cast<int>(slices_.size())) {
      throw std::invalid_argument("expression references a variable from another builder");
    }
    const VarSlice& s = slices_[term.var.index];
    if (s.size != 1) throw std::invalid_argument("scalar term bound to non-scalar '" + s.name + "'");
    row[s.offset] += mult * term.alpha * term.pattern(i, j);
  }
}

void ProgramBuilder::emit(Row row, double rhs) {
  rows_.push_back(std::move(row));
  rhs_.push_back(rhs);
}

void ProgramBuilder::require_zero(const AffineMatrix& expr) {
  for (int j = 0; j < expr.cols(); ++j) {
    for (int i = 0; i < expr.rows(); ++i) {
      Row row;
      scatter_entry(expr, i, j, 1.0, row);
      emit(std::move(row), -expr.constant()(i, j));
    }
  }
}

void ProgramBuilder::require_psd(const AffineMatrix& expr) {
  if (expr.rows() != expr.cols()) throw std::invalid_argument("require_psd: expression not square");
  const int d = expr.rows();
  if (d == 0) return;
  const int offset = num_vars_;
  cones_.push_back({ConeKind::psd, sym_coord_count(d)});
  num_vars_ += sym_coord_count(d);
  int k = offset;
  for (int q = 0; q < d; ++q) {
    for (int p = q; p < d; ++p) {
      const double w = p == q ? 1.0 : kSqrt2;
      Row row;
      row[k++] += 1.0;
      scatter_entry(expr, p, q, -w, row);
      emit(std::move(row), w * expr.constant()(p, q));
    }
  }
}

void ProgramBuilder::require_fro_bound(const AffineMatrix& expr, double radius) {
  if (!std::isfinite(radius) || radius < 0.0) {
    throw std::invalid_argument("require_fro_bound: bad radius");
  }
  if (radius == 0.0) {
    require_zero(expr);
    return;
  }
  const int len = expr.rows() * expr.cols();
  const int offset = num_vars_;
  cones_.push_back({ConeKind::soc, 1 + len});
  num_vars_ += 1 + len;
  Row head;
  head[offset] = 1.0;
  emit(std::move(head), radius);
  int k = offset + 1;
  for (int j = 0; j < expr.cols(); ++j) {
    for (int i = 0; i < expr.rows(); ++i) {
      Row row;
      row[k++] += 1.0;
      scatter_entry(expr, i, j, -1.0, row);
      emit(std::move(row), expr.constant()(i, j));
    }
  }
}

VarBlockRef ProgramBuilder::add_norm_epigraph(const std::string& name, const AffineMatrix& expr,
                                              NormKind kind) {
  if (kind == NormKind::frobenius) {
    const int len = expr.rows() * expr.cols();
    const int offset = num_vars_;
    cones_.push_back({ConeKind::soc, 1 + len});
    num_vars_ += 1 + len;
    for (const VarSlice& s : slices_) {
      if (s.name == name) throw std::invalid_argument("duplicate variable '" + name + "'");
    }
    slices_.push_back({name, VarSlice::Shape::scalar, offset, 1, 1, 1});
    const VarBlockRef t{static_cast<int>(slices_.size()) - 1};
    int k = offset + 1;
    for (int j = 0; j < expr.cols(); ++j) {
      for (int i = 0; i < expr.rows(); ++i) {
        Row row;
        row[k++] += 1.0;
        scatter_entry(expr, i, j, -1.0, row);
        emit(std::move(row), expr.constant()(i, j));
      }
    }
    return t;
  }

  // spectral: t I and the expression packed into one psd block
  //   [[t I_r, E], [E^T, t I_c]] >= 0  iff  ||E||_2 <= t
  const VarBlockRef t = add_scalar_var(name);
  const int r = expr.rows();
  const int d = r + expr.cols();
  if (d == 0) {
    // empty expression: pin t >= 0 through a one-element second-order cone
    const int offset = num_vars_;
    cones_.push_back({ConeKind::soc, 1});
    num_vars_ += 1;
    Row row;
    row[offset] = 1.0;
    row[slices_[t.index].offset] += -1.0;
    emit(std::move(row), 0.0);
    return t;
  }
  const int offset = num_vars_;
  cones_.push_back({ConeKind::psd, sym_coord_count(d)});
  num_vars_ += sym_coord_count(d);
  int k = offset;
  for (int q = 0; q < d; ++q) {
    for (int p = q; p < d; ++p) {
      const double w = p == q ? 1.0 : kSqrt2;
      Row row;
      row[k++] += 1.0;
      double rhs = 0.0;
      if (p == q) {
        row[slices_[t.index].offset] += -1.0;
      } else if (p >= r && q < r) {
        scatter_entry(expr, q, p - r, -w, row);
        rhs = w * expr.constant()(q, p - r);
      }
      emit(std::move(row), rhs);
    }
  }
  return t;
}

void ProgramBuilder::minimize(const std::vector<VarBlockRef>& scalars) {
  for (VarBlockRef ref : scalars) {
    if (ref.index < 0 || ref.index >= static_cast<int>(slices_.size()) ||
        slices_[ref.index].size != 1) {
      throw std::invalid_argument("minimize: objective terms must be scalar variables");
    }
  }
  objective_ = scalars;
}

ConicProgram ProgramBuilder::finalize(bool scale_equalities) const {
  ConicProgram prog;
  prog.objective.assign(num_vars_, 0.0);
  for (VarBlockRef ref : objective_) prog.objective[slices_[ref.index].offset] += 1.0;
  prog.cones = cones_;
  prog.variables = slices_;
  int out_row = 0;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    double norm2 = 0.0;
    for (const auto& [col, v] : rows_[r]) norm2 += v * v;
    if (norm2 == 0.0) {
      if (rhs_[r] == 0.0) continue;  // vacuous 0 = 0
      prog.eq_rhs.push_back(rhs_[r]);  // witness of an inconsistent row
      ++out_row;
      continue;
    }
    const double scale = scale_equalities ? 1.0 / std::sqrt(norm2) : 1.0;
    for (const auto& [col, v] : rows_[r]) {
      if (v != 0.0) prog.eq_coeffs.push_back({out_row, col, v * scale});
    }
    prog.eq_rhs.push_back(rhs_[r] * scale);
    ++out_row;
  }
  prog.validate();
  return prog;
}

}  // namespace dhstab::lmi
