#pragma once

#include <functional>
#include <vector>

#include "la/matrix.hpp"

namespace dhstab::lmi {

// Handle to a variable declared on a ProgramBuilder.
struct VarBlockRef {
  int index = -1;
};

// Matrix-valued affine expression over declared variables:
//   E(v) = C + sum_k alpha_k L_k X_k R_k + sum_j alpha_j t_j P_j
// with X_k a matrix variable and t_j a scalar variable. Dimension checks
// against the variables happen where the builder knows their shapes.
class AffineMatrix {
 public:
  struct ProductTerm {
    double alpha;
    la::Matrix left;
    VarBlockRef var;
    la::Matrix right;
  };
  struct ScalarTerm {
    double alpha;
    VarBlockRef var;
    la::Matrix pattern;
  };

  AffineMatrix(int rows, int cols) : constant_(rows, cols) {}
  explicit AffineMatrix(la::Matrix constant) : constant_(std::move(constant)) {}

  int rows() const { return static_cast<int>(constant_.rows()); }
  int cols() const { return static_cast<int>(constant_.cols()); }
  const la::Matrix& constant() const { return constant_; }

  void add_constant(const la::Matrix& c) { constant_ = constant_ + c; }

  // adds alpha * left * X * right
  void add_product(double alpha, la::Matrix left, VarBlockRef x, la::Matrix right);

  // adds alpha * t * pattern
  void add_scalar_term(double alpha, VarBlockRef t, la::Matrix pattern);

  const std::vector<ProductTerm>& products() const { return products_; }
  const std::vector<ScalarTerm>& scalars() const { return scalars_; }

  // value_of maps a variable to its current value (1x1 for scalars)
  la::Matrix eval(const std::function<la::Matrix(VarBlockRef)>& value_of) const;

 private:
  la::Matrix constant_;
  std::vector<ProductTerm> products_;
  std::vector<ScalarTerm> scalars_;
};

}  // namespace dhstab::lmi
