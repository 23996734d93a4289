#include "la/matrix.hpp"

#include <cmath>

namespace dhstab::la {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool Matrix::is_finite() const {
  for (double v : a_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Matrix::require_finite(const char* who) const {
  if (!is_finite())
    throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t h, std::size_t w) const {
  if (r0 + h > rows_ || c0 + w > cols_)
    throw std::invalid_argument("block: out of range");
  Matrix m(h, w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
  return m;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
  if (r0 + m.rows() > rows_ || c0 + m.cols() > cols_)
    throw std::invalid_argument("set_block: out of range");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) (*this)(r0 + i, c0 + j) = m(i, j);
}

static void require_same_shape(const Matrix& a, const Matrix& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

Matrix Matrix::operator+(const Matrix& o) const {
  require_same_shape(*this, o, "operator+");
  Matrix m = *this;
  for (std::size_t i = 0; i < m.a_.size(); ++i) m.a_[i] += o.a_[i];
  return m;
}

Matrix Matrix::operator-(const Matrix& o) const {
  require_same_shape(*this, o, "operator-");
  Matrix m = *this;
  for (std::size_t i = 0; i < m.a_.size(); ++i) m.a_[i] -= o.a_[i];
  return m;
}

Matrix Matrix::operator-() const {
  Matrix m = *this;
  for (double& v : m.a_) v = -v;
  return m;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_)
    throw std::invalid_argument("operator*: inner dimension mismatch");
  Matrix m(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) m(i, j) += aik * o(k, j);
    }
  return m;
}

Matrix Matrix::operator*(double s) const {
  Matrix m = *this;
  for (double& v : m.a_) v *= s;
  return m;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same_shape(*this, o, "operator+=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same_shape(*this, o, "operator-=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

double Matrix::norm_fro() const {
  // scaled accumulation so very large/small entries do not overflow
  double scale = 0.0, ssq = 1.0;
  for (double v : a_) {
    if (v == 0.0) continue;
    const double av = std::fabs(v);
    if (scale < av) {
      ssq = 1.0 + ssq * (scale / av) * (scale / av);
      scale = av;
    } else {
      ssq += (av / scale) * (av / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

double Matrix::trace() const {
  double t = 0.0;
  const std::size_t n = std::min(rows_, cols_);
  for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hcat: row mismatch");
  Matrix m(a.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

Matrix vcat(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("vcat: col mismatch");
  Matrix m(a.rows() + b.rows(), a.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

double dot(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

Matrix symmetrize(const Matrix& m) {
  if (!m.square()) throw std::invalid_argument("symmetrize: not square");
  Matrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

Matrix skew_part(const Matrix& m) {
  if (!m.square()) throw std::invalid_argument("skew_part: not square");
  Matrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      s(i, j) = 0.5 * (m(i, j) - m(j, i));
  return s;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Matrix Rng::gaussian(std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = normal();
  return m;
}

Matrix Rng::orthogonal(std::size_t n) {
  // Gram-Schmidt on a gaussian sample; restart columns that collapse.
  Matrix g = gaussian(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (;;) {
      for (std::size_t k = 0; k < j; ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += g(i, k) * g(i, j);
        for (std::size_t i = 0; i < n; ++i) g(i, j) -= d * g(i, k);
      }
      double nrm = 0.0;
      for (std::size_t i = 0; i < n; ++i) nrm += g(i, j) * g(i, j);
      nrm = std::sqrt(nrm);
      if (nrm > 1e-8) {
        for (std::size_t i = 0; i < n; ++i) g(i, j) /= nrm;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) g(i, j) = normal();
    }
  }
  return g;
}

}  // namespace dhstab::la
