#include "zecmac/rates.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "zecmac/errors.hpp"

namespace zecmac::rates {

namespace mp = boost::multiprecision;

namespace {

constexpr unsigned kScaleBits = 320;

// log2(p) rounded to a multiple of 2^-320.
Rational log2_prime(const BigInt& p) {
  static std::mutex mu;
  static std::map<BigInt, Rational> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(p); it != cache.end()) return it->second;
  using F = mp::cpp_bin_float_100;
  F v = mp::log(F(p)) / mp::log(F(2));
  v = mp::ldexp(v, static_cast<int>(kScaleBits));
  BigInt num = static_cast<BigInt>(mp::round(v));
  Rational r(num, BigInt(1) << kScaleBits);
  cache.emplace(p, r);
  return r;
}

std::vector<std::pair<BigInt, unsigned>> factor(BigInt w) {
  std::vector<std::pair<BigInt, unsigned>> out;
  for (std::uint64_t d = 2; d < 1'000'000 && BigInt(d) * d <= w; ++d) {
    unsigned e = 0;
    while (w % d == 0) {
      w /= d;
      ++e;
    }
    if (e) out.emplace_back(BigInt(d), e);
  }
  if (w > 1) out.emplace_back(w, 1);
  return out;
}

bool is_pow2(const BigInt& w) { return w > 0 && (w & (w - 1)) == 0; }

unsigned log2_exact(const BigInt& w) { return static_cast<unsigned>(mp::msb(w)); }

BigInt ipow(const BigInt& b, std::uint64_t e) { return mp::pow(b, static_cast<unsigned>(e)); }

void check_compatible(const RatePoint& a, const RatePoint& b) {
  if (a.dim() != b.dim()) throw ConfigError("rate points of different dimension");
}

}  // namespace

double RatePoint::rate(std::size_t i) const {
  const BigInt& v = w.at(i);
  if (is_pow2(v)) return static_cast<double>(log2_exact(v)) / static_cast<double>(n);
  // log2 of a big integer through its top bits
  const unsigned top = static_cast<unsigned>(mp::msb(v));
  const unsigned shift = top > 60 ? top - 60 : 0;
  const double mant = static_cast<double>(static_cast<std::uint64_t>(v >> shift));
  return (std::log2(mant) + shift) / static_cast<double>(n);
}

std::vector<double> RatePoint::rates() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back(rate(i));
  return out;
}

std::string RatePoint::rate_string(std::size_t i) const {
  const BigInt& v = w.at(i);
  if (is_pow2(v)) {
    const std::uint64_t e = log2_exact(v);
    if (e == 0) return "0";
    const std::uint64_t g = std::gcd(e, n);
    if (n / g == 1) return std::to_string(e / g);
    return std::to_string(e / g) + "/" + std::to_string(n / g);
  }
  std::string s = "log2(" + v.str() + ")";
  if (n != 1) s += "/" + std::to_string(n);
  return s;
}

RatePoint make_point(std::uint64_t n, const std::vector<std::uint64_t>& w, std::string source) {
  if (n == 0) throw ConfigError("rate point with zero blocklength");
  RatePoint p;
  p.n = n;
  p.source = std::move(source);
  for (auto v : w) {
    if (v == 0) throw ConfigError("message cardinality must be positive");
    p.w.emplace_back(v);
  }
  return p;
}

int compare_rate(const RatePoint& a, const RatePoint& b, std::size_t i) {
  const BigInt lhs = ipow(a.w.at(i), b.n);
  const BigInt rhs = ipow(b.w.at(i), a.n);
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

bool same_rates(const RatePoint& a, const RatePoint& b) {
  check_compatible(a, b);
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (compare_rate(a, b, i) != 0) return false;
  return true;
}

bool dominates(const RatePoint& a, const RatePoint& b) {
  check_compatible(a, b);
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (compare_rate(a, b, i) < 0) return false;
  return true;
}

bool rate_less(const RatePoint& a, const RatePoint& b) {
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const int c = compare_rate(a, b, i);
    if (c != 0) return c < 0;
  }
  return false;
}

RatePoint time_share(const RatePoint& a, const RatePoint& b, std::uint64_t j, std::uint64_t k) {
  check_compatible(a, b);
  if (j + k == 0) throw ConfigError("time sharing needs at least one block");
  RatePoint out;
  out.n = j * a.n + k * b.n;
  out.source = "timeshare";
  for (std::size_t i = 0; i < a.dim(); ++i) out.w.push_back(ipow(a.w[i], j) * ipow(b.w[i], k));
  return out;
}

std::vector<RatePoint> maximal_points(const std::vector<RatePoint>& pts) {
  std::vector<RatePoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < pts.size() && keep; ++j) {
      if (i == j || !dominates(pts[j], pts[i])) continue;
      // strictly dominated, or an equal point seen earlier
      if (!same_rates(pts[i], pts[j]) || j < i) keep = false;
    }
    if (keep) out.push_back(pts[i]);
  }
  std::sort(out.begin(), out.end(), rate_less);
  return out;
}

Rational coordinate(const BigInt& w, std::uint64_t n) {
  if (w <= 0) throw ConfigError("message cardinality must be positive");
  if (is_pow2(w)) return Rational(BigInt(log2_exact(w)), BigInt(n));
  Rational sum = 0;
  for (const auto& [p, e] : factor(w)) sum += Rational(e) * log2_prime(p);
  return sum / Rational(BigInt(n));
}

bool exact_coordinate(const BigInt& w) { return is_pow2(w); }

namespace {

std::vector<Rational> coords(const RatePoint& p) {
  std::vector<Rational> c;
  for (const auto& v : p.w) c.push_back(coordinate(v, p.n));
  return c;
}

std::vector<RatePoint> distinct(const std::vector<RatePoint>& pts) {
  std::vector<RatePoint> out;
  for (const auto& p : pts) {
    if (!out.empty() && p.dim() != out.front().dim())
      throw ConfigError("rate points of different dimension");
    bool seen = false;
    for (const auto& q : out) seen = seen || same_rates(p, q);
    if (!seen) out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<RatePoint> convex_hull(const std::vector<RatePoint>& pts) {
  if (pts.empty()) throw ConfigError("convex hull of no points");
  auto uniq = distinct(pts);
  std::sort(uniq.begin(), uniq.end(), rate_less);
  if (uniq.size() == 1) return uniq;
  std::vector<std::vector<Rational>> c;
  for (const auto& p : uniq) c.push_back(coords(p));
  const std::size_t d = uniq.front().dim();

  std::vector<RatePoint> out;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    // is c[i] a convex combination of the others?
    lp::Matrix A(d + 1);
    std::vector<Rational> b(d + 1);
    for (std::size_t j = 0; j < uniq.size(); ++j) {
      if (j == i) continue;
      for (std::size_t r = 0; r < d; ++r) A[r].push_back(c[j][r]);
      A[d].push_back(1);
    }
    for (std::size_t r = 0; r < d; ++r) b[r] = c[i][r];
    b[d] = 1;
    if (!lp::feasible(A, b)) out.push_back(uniq[i]);
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::outside: return "outside";
    case Verdict::boundary: return "boundary";
    case Verdict::interior: return "interior";
  }
  return "?";
}

std::vector<Rational> to_rational(const std::vector<double>& h) {
  std::vector<Rational> out;
  for (double x : h) {
    if (!std::isfinite(x)) throw ConfigError("entropy vector entry is not finite");
    int e = 0;
    const double m = std::frexp(x, &e);
    // m * 2^53 is an exact integer
    const auto mi = static_cast<std::int64_t>(std::ldexp(m, 53));
    e -= 53;
    Rational r(mi);
    if (e >= 0) r *= Rational(BigInt(1) << e);
    else r /= Rational(BigInt(1) << (-e));
    out.push_back(r);
  }
  return out;
}

Feasibility feasibility_check(const std::vector<Rational>& h, const std::vector<RatePoint>& pts) {
  if (pts.empty()) throw ConfigError("feasibility check against an empty region");
  const std::size_t d = pts.front().dim();
  if (h.size() != d)
    throw ConfigError("entropy vector has " + std::to_string(h.size()) + " entries, region has " +
                      std::to_string(d) + " coordinates");
  const auto uniq = distinct(pts);
  bool exact = true;
  for (const auto& p : uniq)
    for (const auto& w : p.w) exact = exact && exact_coordinate(w);

  // variables: lambda_1..k, t+, t-, slack_1..d
  //   sum_j lambda_j p_j[r] - t+ + t- - s_r = h_r,  sum lambda = 1
  const std::size_t k = uniq.size();
  const std::size_t nv = k + 2 + d;
  lp::Matrix A(d + 1, std::vector<Rational>(nv, Rational(0)));
  std::vector<Rational> b(d + 1);
  for (std::size_t j = 0; j < k; ++j) {
    const auto c = coords(uniq[j]);
    for (std::size_t r = 0; r < d; ++r) A[r][j] = c[r];
    A[d][j] = 1;
  }
  for (std::size_t r = 0; r < d; ++r) {
    A[r][k] = -1;
    A[r][k + 1] = 1;
    A[r][k + 2 + r] = -1;
    b[r] = h[r];
  }
  b[d] = 1;
  std::vector<Rational> obj(nv, Rational(0));
  obj[k] = 1;
  obj[k + 1] = -1;
  const auto sol = lp::maximize(A, b, obj);
  if (sol.status != lp::Status::optimal) throw InvariantError("feasibility LP did not solve");

  Feasibility f;
  const Rational& t = sol.value;
  f.margin = static_cast<double>(t);
  const bool negative_h = std::any_of(h.begin(), h.end(), [](const Rational& x) { return x < 0; });
  const bool positive_h = std::all_of(h.begin(), h.end(), [](const Rational& x) { return x > 0; });
  int sign = t > 0 ? 1 : (t < 0 ? -1 : 0);
  if (!exact) {
    static const Rational threshold(BigInt(1), mp::pow(BigInt(10), 40));
    if (mp::abs(t) <= threshold) {
      sign = 0;
      f.certified = false;
    }
  }
  if (negative_h || sign < 0) f.verdict = Verdict::outside;
  else if (sign > 0 && positive_h) f.verdict = Verdict::interior;
  else f.verdict = Verdict::boundary;
  if (negative_h) f.certified = true;
  return f;
}

}  // namespace zecmac::rates
