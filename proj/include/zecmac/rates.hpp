#pragma once

// Rate tuples kept exact: a point is (n, W) with R^i = log2(W^i) / n, so
// comparisons and time-sharing never go through floating point. Geometry
// (hull vertices, feasibility of an entropy vector) runs an exact rational LP
// on coordinates where log2 of each prime is replaced by a fixed rational
// within 1e-90; Q-linear relations between coordinates are preserved.

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "zecmac/lp.hpp"

namespace zecmac::rates {

using BigInt = boost::multiprecision::cpp_int;
using lp::Rational;

struct RatePoint {
  std::uint64_t n = 1;
  std::vector<BigInt> w;  // message cardinalities, all >= 1
  std::string source;     // "thm1", "bruteforce", "timeshare", ...

  std::size_t dim() const noexcept { return w.size(); }
  double rate(std::size_t i) const;
  std::vector<double> rates() const;
  // "0", "1/2", "log2(3)", "log2(3)/2"
  std::string rate_string(std::size_t i) const;
};

RatePoint make_point(std::uint64_t n, const std::vector<std::uint64_t>& w, std::string source = {});

// Same rate vector (possibly different n).
bool same_rates(const RatePoint& a, const RatePoint& b);
// a >= b componentwise.
bool dominates(const RatePoint& a, const RatePoint& b);
// Exact comparison of coordinate i.
int compare_rate(const RatePoint& a, const RatePoint& b, std::size_t i);

// (jn*a + km*b)/(jn+km) componentwise; j + k > 0.
RatePoint time_share(const RatePoint& a, const RatePoint& b, std::uint64_t j, std::uint64_t k);

// Points not dominated by any other; duplicates of equal rate collapse to the
// first occurrence. Sorted lexicographically by rate.
std::vector<RatePoint> maximal_points(const std::vector<RatePoint>& pts);

// Lexicographic rate order.
bool rate_less(const RatePoint& a, const RatePoint& b);

// log2(w) / n as a rational, exact when w is a power of two.
Rational coordinate(const BigInt& w, std::uint64_t n);
bool exact_coordinate(const BigInt& w);

// Hull vertices (points not in the convex hull of the others), lexicographic.
std::vector<RatePoint> convex_hull(const std::vector<RatePoint>& pts);

enum class Verdict { outside, boundary, interior };
std::string to_string(Verdict v);

struct Feasibility {
  Verdict verdict = Verdict::outside;
  // max t such that h + t*1 is dominated by a hull combination.
  double margin = 0;
  // False only when |t| fell below the approximation threshold with some
  // irrational coordinate involved.
  bool certified = true;
};

// Classifies h against the downward closure of conv(pts) in the nonnegative
// orthant. Interior means strictly inside that region as a subset of R^d.
Feasibility feasibility_check(const std::vector<Rational>& h, const std::vector<RatePoint>& pts);
std::vector<Rational> to_rational(const std::vector<double>& h);

}  // namespace zecmac::rates
