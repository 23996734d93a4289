#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "la/matrix.hpp"

namespace dhstab::lmi {

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conic program in primal standard form
//   minimize    c^T x
//   subject to  A x = b,  x in K,
// where K is the ordered product of the cone blocks below. A psd block of
// size d = s(s+1)/2 holds the scaled lower triangle of an s x s symmetric
// matrix (svec: off-diagonals times sqrt(2)), so Euclidean norms of psd
// coordinates equal Frobenius norms of the matrices they encode.
enum class ConeKind { zero, free_var, nonneg, soc, psd };

struct ConeBlock {
  ConeKind kind;
  int size;
};

// Named view into the variable vector. Matrix-shaped slices store raw
// entries (strict lower triangle for skew, lower triangle for symmetric,
// every entry for general, all column-major) so decode(encode(M)) == M
// bit for bit; the sqrt(2) scaling lives only inside psd cone blocks.
struct VarSlice {
  enum class Shape { scalar, symmetric, skew, general };
  std::string name;
  Shape shape = Shape::scalar;
  int offset = 0;
  int size = 0;
  int rows = 0;
  int cols = 0;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct ConicProgram {
  std::vector<double> objective;
  std::vector<Triplet> eq_coeffs;
  std::vector<double> eq_rhs;
  std::vector<ConeBlock> cones;
  std::vector<VarSlice> variables;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(eq_rhs.size()); }

  bool has(const std::string& name) const;
  const VarSlice& slice(const std::string& name) const;

  void validate() const;  // throws std::invalid_argument on a malformed program

  // Text form: header "conicprogram v1", then section-tagged blocks with
  // 17-significant-digit numbers so a parse reproduces the program exactly.
  std::string dump() const;
};

int sym_coord_count(int order);
int skew_coord_count(int order);
int psd_order_from_size(int size);  // throws if size is not triangular

// Raw coordinate maps used by named slices (column-major, bit-exact).
// The encoders read only the lower triangle of their argument.
std::vector<double> encode_symmetric(const la::Matrix& m);
la::Matrix decode_symmetric(const double* v, int order);
std::vector<double> encode_skew(const la::Matrix& m);
la::Matrix decode_skew(const double* v, int order);
std::vector<double> encode_general(const la::Matrix& m);
la::Matrix decode_general(const double* v, int rows, int cols);

// Isometric symmetric vectorization used by psd cone blocks.
std::vector<double> svec(const la::Matrix& m);
la::Matrix smat(const double* v, int order);

la::Matrix decode(const ConicProgram& prog, const std::vector<double>& x,
                  const std::string& name);
double decode_scalar(const ConicProgram& prog, const std::vector<double>& x,
                     const std::string& name);

}  // namespace dhstab::lmi
