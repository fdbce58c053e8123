#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "zecmac/errors.hpp"
#include "zecmac/lp.hpp"
#include "zecmac/rates.hpp"

namespace zecmac {
namespace {

using lp::Rational;
using rates::make_point;
using rates::RatePoint;
using rates::Verdict;

// Solve the square system B x = b exactly; false if singular.
bool solve(std::vector<std::vector<Rational>> B, std::vector<Rational> b, std::vector<Rational>& x) {
  const std::size_t m = B.size();
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    while (p < m && B[p][c] == 0) ++p;
    if (p == m) return false;
    std::swap(B[p], B[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c || B[r][c] == 0) continue;
      const Rational f = B[r][c] / B[c][c];
      for (std::size_t k = 0; k < m; ++k) B[r][k] -= f * B[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(m);
  for (std::size_t r = 0; r < m; ++r) x[r] = b[r] / B[r][r];
  return true;
}

// Best objective over all basic feasible solutions (full row rank A).
std::optional<Rational> basis_oracle(const lp::Matrix& A, const std::vector<Rational>& b,
                                     const std::vector<Rational>& c) {
  const std::size_t m = A.size(), n = c.size();
  std::optional<Rational> best;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(m), true);
  std::sort(pick.begin(), pick.end());
  do {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j)
      if (pick[j]) cols.push_back(j);
    std::vector<std::vector<Rational>> B(m, std::vector<Rational>(m));
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t k = 0; k < m; ++k) B[r][k] = A[r][cols[k]];
    std::vector<Rational> x;
    if (!solve(B, b, x)) continue;
    if (std::any_of(x.begin(), x.end(), [](const Rational& v) { return v < 0; })) continue;
    Rational v = 0;
    for (std::size_t k = 0; k < m; ++k) v += c[cols[k]] * x[k];
    if (!best || v > *best) best = v;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

TEST(Lp, MatchesBasisEnumeration) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-3, 4);
  int solved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng() % 3, n = m + 1 + rng() % 3;
    lp::Matrix A(m, std::vector<Rational>(n));
    std::vector<Rational> b(m), c(n);
    for (auto& row : A)
      for (auto& v : row) v = coef(rng);
    for (auto& v : b) v = coef(rng);
    // bounded: add the row sum x <= 10 via a slack column
    for (auto& row : A) row.push_back(0);
    A.push_back(std::vector<Rational>(n + 1, Rational(1)));
    b.push_back(10);
    for (auto& v : c) v = coef(rng);
    c.push_back(0);
    const auto sol = lp::maximize(A, b, c);
    const auto oracle = basis_oracle(A, b, c);
    if (!oracle) {
      // no basic feasible solution with full-rank bases; then infeasible
      // unless A is rank deficient, which the oracle cannot see
      if (sol.status == lp::Status::optimal) {
        for (std::size_t r = 0; r < A.size(); ++r) {
          Rational s = 0;
          for (std::size_t j = 0; j < c.size(); ++j) s += A[r][j] * sol.x[j];
          EXPECT_EQ(s, b[r]);
        }
      }
      continue;
    }
    ASSERT_EQ(sol.status, lp::Status::optimal);
    EXPECT_EQ(sol.value, *oracle);
    ++solved;
  }
  EXPECT_GT(solved, 50);
}

TEST(Lp, InfeasibleAndUnbounded) {
  lp::Matrix A{{1, 1}};
  EXPECT_FALSE(lp::feasible(A, {Rational(-1)}));
  EXPECT_TRUE(lp::feasible(A, {Rational(1)}));
  lp::Matrix B{{1, -1}};
  EXPECT_EQ(lp::maximize(B, {Rational(0)}, {Rational(1), Rational(0)}).status, lp::Status::unbounded);
}

TEST(RatePoint, ExactArithmetic) {
  const auto a = make_point(1, {2, 1, 1});
  const auto b = make_point(2, {4, 1, 1});
  EXPECT_TRUE(rates::same_rates(a, b));
  EXPECT_EQ(make_point(2, {3}).rate_string(0), "log2(3)/2");
  EXPECT_EQ(make_point(4, {4}).rate_string(0), "1/2");
  EXPECT_EQ(make_point(4, {1}).rate_string(0), "0");
  EXPECT_DOUBLE_EQ(make_point(2, {3}).rate(0), std::log2(3.0) / 2);
  // 3^2 = 9 > 8 = 2^3: log2(3)/3 vs 1/2 ... 3^2=9 vs 2^3=8
  EXPECT_EQ(rates::compare_rate(make_point(3, {3}), make_point(2, {2}), 0), 1);
  EXPECT_THROW(make_point(1, {0}), ConfigError);
}

TEST(TimeShare, RateIsConvexCombination) {
  const auto a = make_point(1, {1, 2, 1});
  const auto b = make_point(1, {2, 1, 1});
  const auto c = rates::time_share(a, b, 1, 1);
  EXPECT_EQ(c.n, 2u);
  EXPECT_EQ(c.rates(), (std::vector<double>{0.5, 0.5, 0.0}));
  EXPECT_TRUE(rates::same_rates(rates::time_share(a, b, 1, 0), a));
  EXPECT_TRUE(rates::same_rates(rates::time_share(a, a, 1, 1), a));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = make_point(1 + rng() % 3, {1 + rng() % 5, 1 + rng() % 5});
    const auto q = make_point(1 + rng() % 3, {1 + rng() % 5, 1 + rng() % 5});
    const std::uint64_t j = rng() % 3, k = 1 + rng() % 3;
    const auto s = rates::time_share(p, q, j, k);
    for (std::size_t i = 0; i < 2; ++i) {
      const Rational lhs = rates::coordinate(s.w[i], s.n) * Rational(s.n);
      const Rational rhs = rates::coordinate(p.w[i], p.n) * Rational(j * p.n) +
                           rates::coordinate(q.w[i], q.n) * Rational(k * q.n);
      EXPECT_EQ(lhs, rhs);
    }
  }
}

TEST(MaximalPoints, DropsDominatedAndDuplicates) {
  std::vector<RatePoint> pts{make_point(1, {2, 1}), make_point(1, {1, 1}), make_point(2, {4, 1}),
                             make_point(1, {1, 2}), make_point(2, {2, 2})};
  const auto m = rates::maximal_points(pts);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_TRUE(rates::same_rates(m[0], make_point(1, {1, 2})));
  EXPECT_TRUE(rates::same_rates(m[1], make_point(2, {2, 2})));
  EXPECT_TRUE(rates::same_rates(m[2], make_point(1, {2, 1})));
}

TEST(ConvexHull, Examples) {
  auto h = rates::convex_hull({make_point(1, {1, 1, 1})});
  EXPECT_EQ(h.size(), 1u);
  h = rates::convex_hull({make_point(1, {2, 1, 1}), make_point(1, {1, 2, 1}), make_point(1, {1, 1, 2}),
                          make_point(2, {2, 2, 1})});
  ASSERT_EQ(h.size(), 3u);
  for (const auto& v : h) EXPECT_EQ(v.n, 1u);
  h = rates::convex_hull({make_point(1, {1, 1}), make_point(2, {2, 2}), make_point(1, {2, 2}),
                          make_point(4, {2, 2})});
  ASSERT_EQ(h.size(), 2u);
  EXPECT_TRUE(rates::same_rates(h[0], make_point(1, {1, 1})));
  EXPECT_TRUE(rates::same_rates(h[1], make_point(1, {2, 2})));
  // log2(3)/2 + log2(3)/2 relation: midpoint of two irrational points
  h = rates::convex_hull({make_point(1, {3, 1}), make_point(1, {1, 3}), make_point(2, {3, 3})});
  EXPECT_EQ(h.size(), 2u);
}

// Strict vertices of a planar point set by monotone chain.
std::vector<std::pair<Rational, Rational>> chain_hull(std::vector<std::pair<Rational, Rational>> p) {
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  auto cross = [](auto& o, auto& a, auto& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<Rational, Rational>> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  std::sort(h.begin(), h.end());
  return h;
}

TEST(ConvexHull, MatchesPlanarOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<RatePoint> pts;
    std::vector<std::pair<Rational, Rational>> raw;
    const std::size_t k = 1 + rng() % 8;
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t n = 1 + rng() % 3;
      const std::uint64_t a = rng() % 5, b = rng() % 5;
      pts.push_back(make_point(n, {std::uint64_t{1} << a, std::uint64_t{1} << b}));
      raw.emplace_back(Rational(a) / n, Rational(b) / n);
    }
    std::vector<std::pair<Rational, Rational>> got;
    for (const auto& v : rates::convex_hull(pts))
      got.emplace_back(rates::coordinate(v.w[0], v.n), rates::coordinate(v.w[1], v.n));
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, chain_hull(raw));
  }
}

TEST(Feasibility, Examples) {
  const std::vector<RatePoint> simplex{make_point(1, {2, 1, 1}), make_point(1, {1, 2, 1}),
                                       make_point(1, {1, 1, 2})};
  auto q = [](double a, double b, double c) { return rates::to_rational({a, b, c}); };
  EXPECT_EQ(rates::feasibility_check(q(0, 0, 0), simplex).verdict, Verdict::boundary);
  EXPECT_EQ(rates::feasibility_check(q(0.25, 0.25, 0.25), simplex).verdict, Verdict::interior);
  EXPECT_EQ(rates::feasibility_check(q(1, 1, 1), simplex).verdict, Verdict::outside);
  const Rational third(1, 3);
  EXPECT_EQ(rates::feasibility_check({third, third, third}, simplex).verdict, Verdict::boundary);
  // the nearest double to 1/3 lies below it
  EXPECT_EQ(rates::feasibility_check(q(1.0 / 3, 1.0 / 3, 1.0 / 3), simplex).verdict,
            Verdict::interior);
  const auto face = rates::to_rational({0.5, 0.25, 0.25});
  auto f = rates::feasibility_check(face, simplex);
  EXPECT_EQ(f.verdict, Verdict::boundary);
  EXPECT_TRUE(f.certified);
  EXPECT_THROW(rates::feasibility_check(rates::to_rational({0.1, 0.1}), simplex), ConfigError);
  EXPECT_EQ(rates::feasibility_check(q(-0.1, 0, 0), simplex).verdict, Verdict::outside);
}

TEST(Feasibility, IrrationalVertices) {
  const std::vector<RatePoint> pts{make_point(1, {3, 1, 1}), make_point(1, {1, 2, 1}),
                                   make_point(1, {1, 1, 2})};
  auto f = rates::feasibility_check(rates::to_rational({0.25, 0.25, 0.25}), pts);
  EXPECT_EQ(f.verdict, Verdict::interior);
  EXPECT_TRUE(f.certified);
  f = rates::feasibility_check(rates::to_rational({1, 1, 1}), pts);
  EXPECT_EQ(f.verdict, Verdict::outside);
}

}  // namespace
}  // namespace zecmac
