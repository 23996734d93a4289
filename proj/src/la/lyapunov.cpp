#include "la/lyapunov.hpp"

#include <vector>

#include "la/eig.hpp"
#include "la/factor.hpp"

namespace dhstab::la {
namespace {

struct Block {
  std::size_t start = 0;
  std::size_t size = 0;
};

std::vector<Block> diagonal_blocks(const Matrix& t) {
  std::vector<Block> blocks;
  const std::size_t n = t.rows();
  std::size_t i = 0;
  while (i < n) {
    const std::size_t size = (i + 1 < n && t(i + 1, i) != 0.0) ? 2 : 1;
    blocks.push_back({i, size});
    i += size;
  }
  return blocks;
}

// Solves t_ii*y + y*t_jj^T = rhs through the associated Kronecker system.
Matrix solve_small(const Matrix& tii, const Matrix& tjj, const Matrix& rhs) {
  const std::size_t ni = tii.rows();
  const std::size_t nj = tjj.rows();
  Matrix m(ni * nj, ni * nj);
  for (std::size_t c = 0; c < nj; ++c)
    for (std::size_t r = 0; r < ni; ++r)
      for (std::size_t c2 = 0; c2 < nj; ++c2)
        for (std::size_t r2 = 0; r2 < ni; ++r2) {
          double v = 0.0;
          if (c == c2) v += tii(r, r2);
          if (r == r2) v += tjj(c, c2);
          m(c * ni + r, c2 * ni + r2) = v;
        }
  Matrix vec(ni * nj, 1);
  for (std::size_t c = 0; c < nj; ++c)
    for (std::size_t r = 0; r < ni; ++r) vec(c * ni + r, 0) = rhs(r, c);
  const LuFactors lu = lu_factor(m);
  if (lu.singular)
    throw LyapunovSingular("lyap_solve: eigenvalue pair sums to zero");
  const Matrix sol = lu_solve(lu, vec);
  Matrix y(ni, nj);
  for (std::size_t c = 0; c < nj; ++c)
    for (std::size_t r = 0; r < ni; ++r) y(r, c) = sol(c * ni + r, 0);
  return y;
}

}  // namespace

Matrix lyap_solve(const Matrix& a, const Matrix& c) {
  if (a.rows() != a.cols()) throw std::invalid_argument("lyap_solve: a not square");
  if (c.rows() != c.cols() || c.rows() != a.rows())
    throw std::invalid_argument("lyap_solve: c dimension mismatch");
  const std::size_t n = a.rows();
  if (n == 0) return Matrix(0, 0);

  const SchurResult sf = schur(a);
  const Matrix chat = sf.z.transpose() * c * sf.z;
  const std::vector<Block> blocks = diagonal_blocks(sf.t);
  const std::size_t q = blocks.size();

  Matrix y(n, n);
  for (std::size_t jj = q; jj-- > 0;) {
    const Block& bj = blocks[jj];
    for (std::size_t ii = q; ii-- > 0;) {
      const Block& bi = blocks[ii];
      Matrix rhs = chat.block(bi.start, bj.start, bi.size, bj.size);
      for (std::size_t kk = ii + 1; kk < q; ++kk) {
        const Block& bk = blocks[kk];
        rhs -= sf.t.block(bi.start, bk.start, bi.size, bk.size) *
               y.block(bk.start, bj.start, bk.size, bj.size);
      }
      for (std::size_t ll = jj + 1; ll < q; ++ll) {
        const Block& bl = blocks[ll];
        rhs -= y.block(bi.start, bl.start, bi.size, bl.size) *
               sf.t.block(bj.start, bl.start, bj.size, bl.size).transpose();
      }
      const Matrix tii = sf.t.block(bi.start, bi.start, bi.size, bi.size);
      const Matrix tjj = sf.t.block(bj.start, bj.start, bj.size, bj.size);
      y.set_block(bi.start, bj.start, solve_small(tii, tjj, rhs));
    }
  }
  return symmetrize(sf.z * y * sf.z.transpose());
}

}  // namespace dhstab::la
