#include "conic/reader.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

namespace dhstab::conic {
namespace {

struct LineReader {
  std::istream& in;
  int lineno = 0;
  std::vector<std::string> tokens;

  explicit LineReader(std::istream& s) : in(s) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("conicprogram parse error at line " + std::to_string(lineno) + ": " +
                             what);
  }

  // reads the next non-empty line and splits it on whitespace
  void next(std::size_t want_tokens, const char* context) {
    std::string line;
    tokens.clear();
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (!tokens.empty()) break;
    }
    if (tokens.empty()) fail(std::string("unexpected end of input, expected ") + context);
    if (tokens.size() != want_tokens) {
      fail(std::string("expected ") + context + " (" + std::to_string(want_tokens) +
           " fields, got " + std::to_string(tokens.size()) + ")");
    }
  }

  void expect_keyword(std::size_t idx, const std::string& kw) const {
    if (tokens[idx] != kw) fail("expected keyword '" + kw + "', got '" + tokens[idx] + "'");
  }

  int to_int(std::size_t idx) const {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(tokens[idx], &pos);
      if (pos != tokens[idx].size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail("expected an integer, got '" + tokens[idx] + "'");
    }
  }

  double to_double(std::size_t idx) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tokens[idx], &pos);
      if (pos != tokens[idx].size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail("expected a number, got '" + tokens[idx] + "'");
    }
  }
};

lmi::ConeKind kind_from_name(const LineReader& lr, const std::string& name) {
  if (name == "zero") return lmi::ConeKind::zero;
  if (name == "free") return lmi::ConeKind::free_var;
  if (name == "nonneg") return lmi::ConeKind::nonneg;
  if (name == "soc") return lmi::ConeKind::soc;
  if (name == "psd") return lmi::ConeKind::psd;
  lr.fail("unknown cone kind '" + name + "'");
}

lmi::VarSlice::Shape shape_from_name(const LineReader& lr, const std::string& name) {
  if (name == "scalar") return lmi::VarSlice::Shape::scalar;
  if (name == "symmetric") return lmi::VarSlice::Shape::symmetric;
  if (name == "skew") return lmi::VarSlice::Shape::skew;
  if (name == "general") return lmi::VarSlice::Shape::general;
  lr.fail("unknown slice shape '" + name + "'");
}

int slice_size(lmi::VarSlice::Shape shape, int rows, int cols) {
  switch (shape) {
    case lmi::VarSlice::Shape::scalar: return 1;
    case lmi::VarSlice::Shape::symmetric: return lmi::sym_coord_count(rows);
    case lmi::VarSlice::Shape::skew: return lmi::skew_coord_count(rows);
    case lmi::VarSlice::Shape::general: return rows * cols;
  }
  return -1;
}

}  // namespace

lmi::ConicProgram parse_program(std::istream& in) {
  LineReader lr(in);
  lmi::ConicProgram prog;

  lr.next(2, "header 'conicprogram v1'");
  lr.expect_keyword(0, "conicprogram");
  if (lr.tokens[1] != "v1") lr.fail("unsupported format version '" + lr.tokens[1] + "'");

  lr.next(2, "'vars <count>'");
  lr.expect_keyword(0, "vars");
  const int nvars = lr.to_int(1);
  if (nvars < 0) lr.fail("negative variable count");
  prog.objective.assign(nvars, 0.0);

  lr.next(2, "'objective <nnz>'");
  lr.expect_keyword(0, "objective");
  const int obj_nnz = lr.to_int(1);
  for (int i = 0; i < obj_nnz; ++i) {
    lr.next(2, "objective entry '<index> <value>'");
    const int idx = lr.to_int(0);
    if (idx < 0 || idx >= nvars) lr.fail("objective index out of range");
    prog.objective[idx] = lr.to_double(1);
  }

  lr.next(2, "'cones <count>'");
  lr.expect_keyword(0, "cones");
  const int ncones = lr.to_int(1);
  for (int i = 0; i < ncones; ++i) {
    lr.next(2, "cone '<kind> <size>'");
    lmi::ConeBlock cb;
    cb.kind = kind_from_name(lr, lr.tokens[0]);
    cb.size = lr.to_int(1);
    if (cb.size < 1) lr.fail("cone size must be positive");
    prog.cones.push_back(cb);
  }

  lr.next(3, "'equalities <rows> <nnz>'");
  lr.expect_keyword(0, "equalities");
  const int nrows = lr.to_int(1);
  const int eq_nnz = lr.to_int(2);
  if (nrows < 0) lr.fail("negative row count");
  for (int i = 0; i < eq_nnz; ++i) {
    lr.next(3, "equality entry '<row> <col> <value>'");
    lmi::Triplet t;
    t.row = lr.to_int(0);
    t.col = lr.to_int(1);
    t.value = lr.to_double(2);
    if (t.row < 0 || t.row >= nrows) lr.fail("equality row index out of range");
    if (t.col < 0 || t.col >= nvars) lr.fail("equality column index out of range");
    prog.eq_coeffs.push_back(t);
  }

  lr.next(1, "'rhs'");
  lr.expect_keyword(0, "rhs");
  prog.eq_rhs.reserve(nrows);
  for (int i = 0; i < nrows; ++i) {
    lr.next(1, "rhs value");
    prog.eq_rhs.push_back(lr.to_double(0));
  }

  lr.next(2, "'slices <count>'");
  lr.expect_keyword(0, "slices");
  const int nslices = lr.to_int(1);
  for (int i = 0; i < nslices; ++i) {
    lr.next(5, "slice '<name> <shape> <offset> <rows> <cols>'");
    lmi::VarSlice s;
    s.name = lr.tokens[0];
    s.shape = shape_from_name(lr, lr.tokens[1]);
    s.offset = lr.to_int(2);
    s.rows = lr.to_int(3);
    s.cols = lr.to_int(4);
    s.size = slice_size(s.shape, s.rows, s.cols);
    if (s.offset < 0 || s.size < 0 || s.offset + s.size > nvars) {
      lr.fail("slice '" + s.name + "' does not fit the variable vector");
    }
    prog.variables.push_back(s);
  }

  lr.next(1, "'end'");
  lr.expect_keyword(0, "end");

  try {
    prog.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("conicprogram validation failed after parse: ") +
                             e.what());
  }
  return prog;
}

lmi::ConicProgram parse_program_text(const std::string& text) {
  std::istringstream in(text);
  return parse_program(in);
}

}  // namespace dhstab::conic
