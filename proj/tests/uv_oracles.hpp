#pragma once

// Independent reference implementations and random generators for the
// uncertain-variable engine. Nothing here calls the union-find path.

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "zecmac/uv_core.hpp"

namespace zecmac::testing {

using uv::CondFamily;
using uv::JointRange;
using uv::Tuple;

using BlockSet = std::set<std::set<Tuple>>;

// Warshall closure over the "sets intersect" graph, then each member's
// block is the union of every set reachable from a set containing it.
inline BlockSet closure_partition(const CondFamily& f) {
  const std::size_t k = f.sets.size();
  std::vector<std::vector<bool>> reach(k, std::vector<bool>(k, false));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      std::vector<Tuple> common;
      std::set_intersection(f.sets[a].begin(), f.sets[a].end(), f.sets[b].begin(),
                            f.sets[b].end(), std::back_inserter(common));
      reach[a][b] = !common.empty();
    }
  }
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        if (reach[a][m] && reach[m][b]) reach[a][b] = true;

  BlockSet out;
  for (std::size_t a = 0; a < k; ++a) {
    std::set<Tuple> block;
    for (std::size_t b = 0; b < k; ++b)
      if (reach[a][b]) block.insert(f.sets[b].begin(), f.sets[b].end());
    out.insert(block);
  }
  return out;
}

inline BlockSet as_blockset(const uv::OverlapPartition& p) {
  BlockSet out;
  for (const auto& b : p.blocks) out.insert(std::set<Tuple>(b.begin(), b.end()));
  return out;
}

inline std::vector<Tuple> product_tuples(const std::vector<std::uint32_t>& sizes) {
  std::vector<Tuple> out{Tuple{}};
  for (auto s : sizes) {
    std::vector<Tuple> next;
    for (const auto& t : out)
      for (std::uint32_t v = 0; v < s; ++v) {
        auto u = t;
        u.push_back(v);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

inline uv::VarList var_names(std::size_t n) {
  uv::VarList v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("V" + std::to_string(i));
  return v;
}

// Random subset of a random product space; never empty.
inline JointRange random_joint(std::mt19937_64& rng, std::size_t min_vars, std::size_t max_vars,
                               std::uint32_t max_alphabet) {
  std::uniform_int_distribution<std::size_t> nvars(min_vars, max_vars);
  std::uniform_int_distribution<std::uint32_t> asize(1, max_alphabet);
  std::uniform_real_distribution<double> density(0.15, 0.9);
  const std::size_t n = nvars(rng);
  std::vector<std::uint32_t> sizes(n);
  for (auto& s : sizes) s = asize(rng);
  const double p = density(rng);
  std::bernoulli_distribution keep(p);
  auto all = product_tuples(sizes);
  std::vector<Tuple> support;
  for (auto& t : all)
    if (keep(rng)) support.push_back(t);
  if (support.empty()) support.push_back(all[rng() % all.size()]);
  return JointRange::indexed(var_names(n), sizes, std::move(support));
}

// (Lambda, Omega, Theta) with ⟦Lambda, Theta⟧ = ⟦Lambda⟧ x ⟦Theta⟧ by
// construction; Omega is an arbitrary nonempty set per (lambda, theta).
inline JointRange random_unrelated_triple(std::mt19937_64& rng, std::uint32_t max_alphabet) {
  std::uniform_int_distribution<std::uint32_t> asize(1, max_alphabet);
  const std::uint32_t nl = asize(rng), no = asize(rng), nt = asize(rng);
  std::bernoulli_distribution keep(0.45);
  std::vector<Tuple> support;
  for (std::uint32_t l = 0; l < nl; ++l)
    for (std::uint32_t t = 0; t < nt; ++t) {
      bool any = false;
      for (std::uint32_t o = 0; o < no; ++o)
        if (keep(rng)) {
          support.push_back({l, o, t});
          any = true;
        }
      if (!any) support.push_back({l, static_cast<std::uint32_t>(rng() % no), t});
    }
  return JointRange::indexed({"L", "O", "T"}, {nl, no, nt}, std::move(support));
}

}  // namespace zecmac::testing
