#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dhstab::la {

// Dense real matrix, row-major storage. Values are immutable at API
// boundaries; every operation returns a fresh matrix. Entries must stay
// finite; require_finite() is the gate used wherever data enters the library.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> v)
      : rows_(rows), cols_(cols), a_(v) {
    if (a_.size() != rows * cols)
      throw std::invalid_argument("Matrix: initializer size mismatch");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return a_.size(); }
  bool empty() const { return a_.empty(); }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  bool is_finite() const;
  void require_finite(const char* who) const;

  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t h, std::size_t w) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& m);

  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator-() const;
  Matrix operator*(const Matrix& o) const;
  Matrix operator*(double s) const;
  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  double norm_fro() const;
  double max_abs() const;
  double trace() const;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

inline Matrix operator*(double s, const Matrix& m) { return m * s; }

Matrix hcat(const Matrix& a, const Matrix& b);
Matrix vcat(const Matrix& a, const Matrix& b);
// trace inner product <a,b> = sum a_ij b_ij
double dot(const Matrix& a, const Matrix& b);
Matrix symmetrize(const Matrix& m);    // (M + M^T)/2
Matrix skew_part(const Matrix& m);     // (M - M^T)/2

// Deterministic random source. Box-Muller over mt19937_64 so that streams are
// identical across standard libraries (std::normal_distribution is not).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Matrix gaussian(std::size_t rows, std::size_t cols);
  Matrix orthogonal(std::size_t n);  // Q factor of a gaussian sample
  std::uint64_t raw() { return gen_(); }

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dhstab::la
