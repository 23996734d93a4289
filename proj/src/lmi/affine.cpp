#include "lmi/affine.hpp"

#include <stdexcept>

namespace dhstab::lmi {

void AffineMatrix::add_product(double alpha, la::Matrix left, VarBlockRef x,
                               la::Matrix right) {
  if (x.index < 0) throw std::invalid_argument("add_product: unbound variable");
  if (static_cast<int>(left.rows()) != rows() || static_cast<int>(right.cols()) != cols()) {
    throw std::invalid_argument("add_product: outer dimensions do not match the expression");
  }
  products_.push_back({alpha, std::move(left), x, std::move(right)});
}

void AffineMatrix::add_scalar_term(double alpha, VarBlockRef t, la::Matrix pattern) {
  if (t.index < 0) throw std::invalid_argument("add_scalar_term: unbound variable");
  if (static_cast<int>(pattern.rows()) != rows() || static_cast<int>(pattern.cols()) != cols()) {
    throw std::invalid_argument("add_scalar_term: pattern dimensions do not match");
  }
  scalars_.push_back({alpha, t, std::move(pattern)});
}

la::Matrix AffineMatrix::eval(const std::function<la::Matrix(VarBlockRef)>& value_of) const {
  la::Matrix out = constant_;
  for (const ProductTerm& term : products_) {
    out = out + term.left * value_of(term.var) * term.right * term.alpha;
  }
  for (const ScalarTerm& term : scalars_) {
    const la::Matrix t = value_of(term.var);
    if (t.rows() != 1 || t.cols() != 1) {
      throw std::invalid_argument("eval: scalar term bound to a non-scalar variable");
    }
    out = out + term.pattern * (term.alpha * t(0, 0));
  }
  return out;
}

}  // namespace dhstab::lmi
