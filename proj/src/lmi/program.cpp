#include "lmi/program.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace dhstab::lmi {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;

const char* cone_name(ConeKind k) {
  switch (k) {
    case ConeKind::zero: return "zero";
    case ConeKind::free_var: return "free";
    case ConeKind::nonneg: return "nonneg";
    case ConeKind::soc: return "soc";
    case ConeKind::psd: return "psd";
  }
  return "?";
}

const char* shape_name(VarSlice::Shape s) {
  switch (s) {
    case VarSlice::Shape::scalar: return "scalar";
    case VarSlice::Shape::symmetric: return "symmetric";
    case VarSlice::Shape::skew: return "skew";
    case VarSlice::Shape::general: return "general";
  }
  return "?";
}

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

int expected_slice_size(const VarSlice& s) {
  switch (s.shape) {
    case VarSlice::Shape::scalar: return 1;
    case VarSlice::Shape::symmetric: return sym_coord_count(s.rows);
    case VarSlice::Shape::skew: return skew_coord_count(s.rows);
    case VarSlice::Shape::general: return s.rows * s.cols;
  }
  return -1;
}

}  // namespace

int sym_coord_count(int order) { return order * (order + 1) / 2; }

int skew_coord_count(int order) { return order * (order - 1) / 2; }

int psd_order_from_size(int size) {
  const int order = static_cast<int>((std::sqrt(8.0 * size + 1.0) - 1.0) / 2.0 + 0.5);
  if (order < 0 || sym_coord_count(order) != size) {
    throw std::invalid_argument("psd block size is not a triangular number");
  }
  return order;
}

std::vector<double> encode_symmetric(const la::Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("encode_symmetric: not square");
  const int n = static_cast<int>(m.rows());
  std::vector<double> v;
  v.reserve(sym_coord_count(n));
  for (int q = 0; q < n; ++q) {
    for (int p = q; p < n; ++p) v.push_back(m(p, q));
  }
  return v;
}

la::Matrix decode_symmetric(const double* v, int order) {
  la::Matrix m(order, order);
  int k = 0;
  for (int q = 0; q < order; ++q) {
    for (int p = q; p < order; ++p) {
      m(p, q) = v[k];
      m(q, p) = v[k];
      ++k;
    }
  }
  return m;
}

std::vector<double> encode_skew(const la::Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("encode_skew: not square");
  const int n = static_cast<int>(m.rows());
  std::vector<double> v;
  v.reserve(skew_coord_count(n));
  for (int q = 0; q < n; ++q) {
    for (int p = q + 1; p < n; ++p) v.push_back(m(p, q));
  }
  return v;
}

la::Matrix decode_skew(const double* v, int order) {
  la::Matrix m(order, order);
  int k = 0;
  for (int q = 0; q < order; ++q) {
    for (int p = q + 1; p < order; ++p) {
      m(p, q) = v[k];
      m(q, p) = -v[k];
      ++k;
    }
  }
  return m;
}

std::vector<double> encode_general(const la::Matrix& m) {
  std::vector<double> v;
  v.reserve(m.rows() * m.cols());
  for (std::size_t q = 0; q < m.cols(); ++q) {
    for (std::size_t p = 0; p < m.rows(); ++p) v.push_back(m(p, q));
  }
  return v;
}

la::Matrix decode_general(const double* v, int rows, int cols) {
  la::Matrix m(rows, cols);
  int k = 0;
  for (int q = 0; q < cols; ++q) {
    for (int p = 0; p < rows; ++p) m(p, q) = v[k++];
  }
  return m;
}

std::vector<double> svec(const la::Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("svec: not square");
  const int n = static_cast<int>(m.rows());
  std::vector<double> v;
  v.reserve(sym_coord_count(n));
  for (int q = 0; q < n; ++q) {
    v.push_back(m(q, q));
    for (int p = q + 1; p < n; ++p) v.push_back(kSqrt2 * m(p, q));
  }
  return v;
}

la::Matrix smat(const double* v, int order) {
  la::Matrix m(order, order);
  int k = 0;
  for (int q = 0; q < order; ++q) {
    m(q, q) = v[k++];
    for (int p = q + 1; p < order; ++p) {
      const double x = v[k++] / kSqrt2;
      m(p, q) = x;
      m(q, p) = x;
    }
  }
  return m;
}

bool ConicProgram::has(const std::string& name) const {
  for (const VarSlice& s : variables) {
    if (s.name == name) return true;
  }
  return false;
}

const VarSlice& ConicProgram::slice(const std::string& name) const {
  for (const VarSlice& s : variables) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("no variable slice named '" + name + "'");
}

void ConicProgram::validate() const {
  const int n = num_vars();
  const int rows = num_rows();
  long cone_total = 0;
  for (const ConeBlock& c : cones) {
    if (c.size < 1) throw std::invalid_argument("cone block with size < 1");
    if (c.kind == ConeKind::psd) psd_order_from_size(c.size);
    cone_total += c.size;
  }
  if (cone_total != n) throw std::invalid_argument("cone sizes do not sum to the variable count");
  for (const Triplet& t : eq_coeffs) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= n) {
      throw std::invalid_argument("equality coefficient out of range");
    }
    if (!std::isfinite(t.value)) throw std::invalid_argument("non-finite equality coefficient");
  }
  for (double b : eq_rhs) {
    if (!std::isfinite(b)) throw std::invalid_argument("non-finite right-hand side");
  }
  for (double c : objective) {
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite objective coefficient");
  }
  std::set<std::string> seen;
  for (const VarSlice& s : variables) {
    if (s.name.empty()) throw std::invalid_argument("empty slice name");
    if (!seen.insert(s.name).second) throw std::invalid_argument("duplicate slice name '" + s.name + "'");
    if (s.offset < 0 || s.size < 0 || s.offset + s.size > n) {
      throw std::invalid_argument("slice '" + s.name + "' out of range");
    }
    const bool square = s.shape == VarSlice::Shape::symmetric || s.shape == VarSlice::Shape::skew;
    if (square && s.rows != s.cols) throw std::invalid_argument("slice '" + s.name + "' must be square");
    if (expected_slice_size(s) != s.size) {
      throw std::invalid_argument("slice '" + s.name + "' size does not match its shape");
    }
  }
}

std::string ConicProgram::dump() const {
  std::string out = "conicprogram v1\n";
  out += "vars " + std::to_string(num_vars()) + "\n";
  std::vector<std::pair<int, double>> obj;
  for (int i = 0; i < num_vars(); ++i) {
    if (objective[i] != 0.0) obj.emplace_back(i, objective[i]);
  }
  out += "objective " + std::to_string(obj.size()) + "\n";
  for (const auto& [i, v] : obj) {
    out += std::to_string(i) + " ";
    append_number(out, v);
    out += "\n";
  }
  out += "cones " + std::to_string(cones.size()) + "\n";
  for (const ConeBlock& c : cones) {
    out += std::string(cone_name(c.kind)) + " " + std::to_string(c.size) + "\n";
  }
  out += "equalities " + std::to_string(num_rows()) + " " + std::to_string(eq_coeffs.size()) + "\n";
  for (const Triplet& t : eq_coeffs) {
    out += std::to_string(t.row) + " " + std::to_string(t.col) + " ";
    append_number(out, t.value);
    out += "\n";
  }
  out += "rhs\n";
  for (double b : eq_rhs) {
    append_number(out, b);
    out += "\n";
  }
  out += "slices " + std::to_string(variables.size()) + "\n";
  for (const VarSlice& s : variables) {
    out += s.name + " " + shape_name(s.shape) + " " + std::to_string(s.offset) + " " +
           std::to_string(s.rows) + " " + std::to_string(s.cols) + "\n";
  }
  out += "end\n";
  return out;
}

la::Matrix decode(const ConicProgram& prog, const std::vector<double>& x,
                  const std::string& name) {
  if (static_cast<int>(x.size()) != prog.num_vars()) {
    throw std::invalid_argument("decode: vector length does not match the program");
  }
  const VarSlice& s = prog.slice(name);
  const double* v = x.data() + s.offset;
  switch (s.shape) {
    case VarSlice::Shape::scalar: {
      la::Matrix m(1, 1);
      m(0, 0) = *v;
      return m;
    }
    case VarSlice::Shape::symmetric: return decode_symmetric(v, s.rows);
    case VarSlice::Shape::skew: return decode_skew(v, s.rows);
    case VarSlice::Shape::general: return decode_general(v, s.rows, s.cols);
  }
  throw std::logic_error("decode: bad shape");
}

double decode_scalar(const ConicProgram& prog, const std::vector<double>& x,
                     const std::string& name) {
  const VarSlice& s = prog.slice(name);
  if (s.shape != VarSlice::Shape::scalar) {
    throw std::invalid_argument("decode_scalar: '" + name + "' is not a scalar");
  }
  if (static_cast<int>(x.size()) != prog.num_vars()) {
    throw std::invalid_argument("decode_scalar: vector length does not match the program");
  }
  return x[s.offset];
}

}  // namespace dhstab::lmi
