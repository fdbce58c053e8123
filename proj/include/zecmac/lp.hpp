#pragma once

// Small dense linear programs over exact rationals. Two-phase simplex with
// Bland's rule, so it terminates on degenerate problems; meant for the tens of
// variables that rate-region geometry produces, not for speed.

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace zecmac::lp {

using Rational = boost::multiprecision::cpp_rational;
using Matrix = std::vector<std::vector<Rational>>;

enum class Status { optimal, infeasible, unbounded };

struct Solution {
  Status status = Status::infeasible;
  Rational value;
  std::vector<Rational> x;
};

// maximize c.x subject to A x = b, x >= 0.
Solution maximize(const Matrix& A, const std::vector<Rational>& b, const std::vector<Rational>& c);

// Is there x >= 0 with A x = b?
bool feasible(const Matrix& A, const std::vector<Rational>& b);

}  // namespace zecmac::lp
