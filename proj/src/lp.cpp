#include "zecmac/lp.hpp"

#include "zecmac/errors.hpp"

namespace zecmac::lp {

namespace {

// Tableau over rows 0..m-1 (constraints) and an objective row; basis[r] is
// the column basic in row r. Columns are 0..ncols-1, rhs stored separately.
struct Tableau {
  Matrix a;
  std::vector<Rational> rhs;
  std::vector<Rational> obj;  // reduced costs, maximize: enter on positive
  Rational obj_value;
  std::vector<std::size_t> basis;

  void pivot(std::size_t row, std::size_t col) {
    const Rational p = a[row][col];
    for (auto& v : a[row]) v /= p;
    rhs[row] /= p;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == row || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t c = 0; c < a[r].size(); ++c)
        if (a[row][c] != 0) a[r][c] -= f * a[row][c];
      rhs[r] -= f * rhs[row];
    }
    if (obj[col] != 0) {
      const Rational f = obj[col];
      for (std::size_t c = 0; c < obj.size(); ++c)
        if (a[row][c] != 0) obj[c] -= f * a[row][c];
      obj_value += f * rhs[row];
    }
    basis[row] = col;
  }

  // Runs to optimality over the allowed columns. Returns false if unbounded.
  bool run(std::size_t allowed_cols) {
    for (;;) {
      std::size_t enter = allowed_cols;
      for (std::size_t c = 0; c < allowed_cols; ++c)
        if (obj[c] > 0) {
          enter = c;
          break;
        }
      if (enter == allowed_cols) return true;
      std::size_t leave = a.size();
      Rational best;
      for (std::size_t r = 0; r < a.size(); ++r) {
        if (a[r][enter] <= 0) continue;
        Rational ratio = rhs[r] / a[r][enter];
        if (leave == a.size() || ratio < best || (ratio == best && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == a.size()) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

Solution maximize(const Matrix& A, const std::vector<Rational>& b, const std::vector<Rational>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw InvariantError("lp: rhs size mismatch");
  for (const auto& row : A)
    if (row.size() != n) throw InvariantError("lp: ragged constraint matrix");

  // Phase 1: artificial variable per row, columns n..n+m-1.
  Tableau t;
  t.a.assign(m, std::vector<Rational>(n + m));
  t.rhs = b;
  t.basis.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    const bool flip = b[r] < 0;
    for (std::size_t j = 0; j < n; ++j) t.a[r][j] = flip ? Rational(-A[r][j]) : A[r][j];
    if (flip) t.rhs[r] = -t.rhs[r];
    t.a[r][n + r] = 1;
    t.basis[r] = n + r;
  }
  // maximize -sum(artificials): reduced costs are the column sums.
  t.obj.assign(n + m, Rational(0));
  t.obj_value = 0;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) t.obj[j] += t.a[r][j];
    t.obj_value -= t.rhs[r];
  }
  t.run(n + m);
  Solution sol;
  if (t.obj_value != 0) return sol;

  // Drive artificials out of the basis where possible; drop redundant rows.
  for (std::size_t r = 0; r < t.a.size();) {
    if (t.basis[r] >= n) {
      std::size_t col = n;
      for (std::size_t j = 0; j < n; ++j)
        if (t.a[r][j] != 0) {
          col = j;
          break;
        }
      if (col == n) {
        t.a.erase(t.a.begin() + static_cast<long>(r));
        t.rhs.erase(t.rhs.begin() + static_cast<long>(r));
        t.basis.erase(t.basis.begin() + static_cast<long>(r));
        continue;
      }
      t.pivot(r, col);
    }
    ++r;
  }

  // Phase 2.
  t.obj.assign(n + m, Rational(0));
  for (std::size_t j = 0; j < n; ++j) t.obj[j] = c[j];
  t.obj_value = 0;
  for (std::size_t r = 0; r < t.a.size(); ++r) {
    const std::size_t col = t.basis[r];
    if (t.obj[col] == 0) continue;
    const Rational f = t.obj[col];
    for (std::size_t j = 0; j < n + m; ++j) t.obj[j] -= f * t.a[r][j];
    t.obj_value += f * t.rhs[r];
  }
  if (!t.run(n)) {
    sol.status = Status::unbounded;
    return sol;
  }
  sol.status = Status::optimal;
  sol.value = t.obj_value;
  sol.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < t.a.size(); ++r)
    if (t.basis[r] < n) sol.x[t.basis[r]] = t.rhs[r];
  return sol;
}

bool feasible(const Matrix& A, const std::vector<Rational>& b) {
  const std::size_t n = A.empty() ? 0 : A.front().size();
  return maximize(A, b, std::vector<Rational>(n, Rational(0))).status == Status::optimal;
}

}  // namespace zecmac::lp
