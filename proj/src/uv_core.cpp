#include "zecmac/uv_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "zecmac/disjoint_set.hpp"
#include "zecmac/errors.hpp"

namespace zecmac::uv {

namespace {

void sort_unique(std::vector<Tuple>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<std::size_t> concat(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Throws if any variable repeats within or across the groups.
void require_disjoint(const std::vector<std::vector<std::size_t>>& groups, const char* what) {
  std::set<std::size_t> seen;
  for (const auto& g : groups) {
    if (g.empty()) throw PreconditionError(std::string(what) + ": empty variable group");
    for (auto v : g) {
      if (!seen.insert(v).second)
        throw PreconditionError(std::string(what) + ": variable groups overlap");
    }
  }
}

std::vector<Tuple> project_all(const std::vector<Tuple>& rows, const std::vector<std::size_t>& idx) {
  std::vector<Tuple> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(project(r, idx));
  sort_unique(out);
  return out;
}

// Product-size test: a projection onto the union of the groups is always a
// subset of the product of the group projections, so equality of sizes is
// equality of sets.
bool factors(const std::vector<Tuple>& rows, const std::vector<std::vector<std::size_t>>& groups) {
  std::vector<std::size_t> all;
  for (const auto& g : groups) all = concat(std::move(all), g);
  const auto joint = project_all(rows, all).size();
  std::size_t product = 1;
  for (const auto& g : groups) {
    product *= project_all(rows, g).size();
    if (product > joint) return false;
  }
  return product == joint;
}

// Rows grouped by their projection onto `given`, keyed in sorted order.
std::map<Tuple, std::vector<Tuple>> slices(const std::vector<Tuple>& rows,
                                           const std::vector<std::size_t>& given) {
  std::map<Tuple, std::vector<Tuple>> out;
  for (const auto& r : rows) out[project(r, given)].push_back(r);
  return out;
}

CondFamily family_from(const std::vector<Tuple>& rows, const std::vector<std::size_t>& target,
                       const std::vector<std::size_t>& given) {
  std::map<Tuple, std::vector<Tuple>> m;
  for (const auto& r : rows) m[project(r, given)].push_back(project(r, target));
  CondFamily f;
  f.keys.reserve(m.size());
  f.sets.reserve(m.size());
  for (auto& [k, v] : m) {
    sort_unique(v);
    f.keys.push_back(k);
    f.sets.push_back(std::move(v));
  }
  return f;
}

}  // namespace

std::string to_string(const Symbol& s) {
  if (const auto* i = std::get_if<std::int64_t>(&s)) return std::to_string(*i);
  return std::get<std::string>(s);
}

AlphabetPtr integer_alphabet(std::uint32_t size) {
  auto a = std::make_shared<Alphabet>();
  a->reserve(size);
  for (std::uint32_t i = 0; i < size; ++i) a->emplace_back(std::int64_t{i});
  return a;
}

Tuple project(const Tuple& t, const std::vector<std::size_t>& idx) {
  Tuple out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(t[i]);
  return out;
}

JointRange::JointRange(VarList variables, std::vector<AlphabetPtr> alphabets,
                       std::vector<Tuple> support)
    : variables_(std::move(variables)),
      alphabets_(std::move(alphabets)),
      support_(std::move(support)) {
  if (variables_.empty()) throw ConfigError("joint range: no variables");
  if (alphabets_.size() != variables_.size())
    throw ConfigError("joint range: one alphabet per variable required");
  std::set<std::string> names(variables_.begin(), variables_.end());
  if (names.size() != variables_.size()) throw ConfigError("joint range: duplicate variable name");
  for (std::size_t v = 0; v < alphabets_.size(); ++v) {
    if (!alphabets_[v] || alphabets_[v]->empty())
      throw ConfigError("joint range: empty alphabet for " + variables_[v]);
  }
  if (support_.empty()) throw ConfigError("joint range: empty support");
  for (const auto& t : support_) {
    if (t.size() != variables_.size())
      throw ConfigError("joint range: tuple arity does not match variable count");
    for (std::size_t v = 0; v < t.size(); ++v) {
      if (t[v] >= alphabets_[v]->size())
        throw ConfigError("joint range: symbol outside alphabet of " + variables_[v]);
    }
  }
  sort_unique(support_);
}

JointRange::JointRange(VarList variables, std::vector<Alphabet> alphabets,
                       std::vector<Tuple> support)
    : JointRange(std::move(variables),
                 [&] {
                   std::vector<AlphabetPtr> p;
                   for (auto& a : alphabets) p.push_back(std::make_shared<Alphabet>(std::move(a)));
                   return p;
                 }(),
                 std::move(support)) {}

JointRange JointRange::indexed(VarList variables, const std::vector<std::uint32_t>& alphabet_sizes,
                               std::vector<Tuple> support) {
  std::vector<AlphabetPtr> a;
  a.reserve(alphabet_sizes.size());
  for (auto s : alphabet_sizes) a.push_back(integer_alphabet(s));
  return JointRange(std::move(variables), std::move(a), std::move(support));
}

bool JointRange::contains(const Tuple& t) const {
  return std::binary_search(support_.begin(), support_.end(), t);
}

std::size_t JointRange::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i] == name) return i;
  throw ConfigError("unknown variable '" + std::string(name) + "'");
}

std::vector<std::size_t> JointRange::indices_of(const VarList& names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(index_of(n));
  return out;
}

std::string JointRange::format(const std::vector<std::size_t>& vars, const Tuple& t) const {
  std::ostringstream os;
  if (t.size() != 1) os << '(';
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) os << ',';
    os << to_string(alphabet(vars[i]).at(t[i]));
  }
  if (t.size() != 1) os << ')';
  return os.str();
}

std::vector<Tuple> CondFamily::target_range() const {
  std::vector<Tuple> out;
  for (const auto& s : sets) out.insert(out.end(), s.begin(), s.end());
  sort_unique(out);
  return out;
}

std::size_t OverlapPartition::block_of(const Tuple& t) const {
  auto it = block_index.find(t);
  if (it == block_index.end()) throw ConfigError("tuple not in partitioned range");
  return it->second;
}

std::vector<Tuple> marginal_range(const JointRange& j, const VarList& vars) {
  if (vars.empty()) throw PreconditionError("marginal_range: empty variable list");
  const auto idx = j.indices_of(vars);
  require_disjoint({idx}, "marginal_range");
  return project_all(j.support(), idx);
}

CondFamily conditional_family(const JointRange& j, const VarList& target, const VarList& given) {
  const auto t = j.indices_of(target);
  const auto g = j.indices_of(given);
  require_disjoint({t, g}, "conditional_family");
  CondFamily f = family_from(j.support(), t, g);
  f.target = target;
  f.given = given;
  return f;
}

bool is_unrelated(const JointRange& j, const std::vector<VarList>& groups) {
  std::vector<std::vector<std::size_t>> idx;
  for (const auto& g : groups) idx.push_back(j.indices_of(g));
  require_disjoint(idx, "is_unrelated");
  return factors(j.support(), idx);
}

bool is_conditionally_unrelated(const JointRange& j, const std::vector<VarList>& groups,
                                const VarList& given) {
  if (given.empty()) return is_unrelated(j, groups);
  std::vector<std::vector<std::size_t>> idx;
  for (const auto& g : groups) idx.push_back(j.indices_of(g));
  const auto g = j.indices_of(given);
  auto all = idx;
  all.push_back(g);
  require_disjoint(all, "is_conditionally_unrelated");
  for (const auto& [key, rows] : slices(j.support(), g)) {
    if (!factors(rows, idx)) return false;
  }
  return true;
}

bool is_markov(const JointRange& j, const VarList& x1, const VarList& y, const VarList& x2) {
  const auto i1 = j.indices_of(x1);
  const auto iy = j.indices_of(y);
  const auto i2 = j.indices_of(x2);
  require_disjoint({i1, iy, i2}, "is_markov");

  // ⟦X1 | y, x2⟧ == ⟦X1 | y⟧ for every (y, x2) in ⟦Y, X2⟧.
  const CondFamily given_y = family_from(j.support(), i1, iy);
  const CondFamily given_yx2 = family_from(j.support(), i1, concat(iy, i2));
  bool chain = true;
  for (std::size_t k = 0; k < given_yx2.keys.size() && chain; ++k) {
    const Tuple ypart(given_yx2.keys[k].begin(), given_yx2.keys[k].begin() + iy.size());
    const auto pos = std::lower_bound(given_y.keys.begin(), given_y.keys.end(), ypart);
    chain = given_y.sets[pos - given_y.keys.begin()] == given_yx2.sets[k];
  }

  bool cond_unrelated = true;
  for (const auto& [key, rows] : slices(j.support(), iy)) {
    if (!factors(rows, {i1, i2})) {
      cond_unrelated = false;
      break;
    }
  }
  if (chain != cond_unrelated)
    throw InvariantError("is_markov: conditional-range and conditional-unrelatedness forms disagree");
  return chain;
}

OverlapPartition overlap_partition(const CondFamily& f) {
  if (f.sets.size() != f.keys.size()) throw ConfigError("overlap_partition: malformed family");
  for (const auto& s : f.sets)
    if (s.empty()) throw PreconditionError("overlap_partition: family contains an empty set");

  const std::vector<Tuple> members = f.target_range();
  auto id = [&](const Tuple& t) {
    return static_cast<std::size_t>(std::lower_bound(members.begin(), members.end(), t) -
                                    members.begin());
  };
  DisjointSet ds(members.size());
  for (const auto& s : f.sets) {
    const auto first = id(s.front());
    for (std::size_t i = 1; i < s.size(); ++i) ds.unite(first, id(s[i]));
  }

  // Members are visited in sorted order, so the first member seen for a root
  // is the block's smallest and blocks come out in the required order.
  std::map<std::size_t, std::size_t> root_to_block;
  OverlapPartition p;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto r = ds.find(i);
    auto [it, fresh] = root_to_block.try_emplace(r, p.blocks.size());
    if (fresh) p.blocks.emplace_back();
    p.blocks[it->second].push_back(members[i]);
    p.block_index.emplace(members[i], it->second);
  }
  return p;
}

std::size_t overlap_count(const JointRange& j, const VarList& x, const VarList& y) {
  return overlap_partition(conditional_family(j, x, y)).size();
}

double nonstochastic_info(const JointRange& j, const VarList& x, const VarList& y) {
  return std::log2(static_cast<double>(overlap_count(j, x, y)));
}

CommonVariableWitness maximal_common_variable(const JointRange& j, const VarList& x,
                                              const VarList& y) {
  const CondFamily f = conditional_family(j, x, y);
  OverlapPartition p = overlap_partition(f);
  CommonVariableWitness w;
  w.cardinality = p.size();
  w.label_of_x = std::move(p.block_index);
  for (std::size_t k = 0; k < f.keys.size(); ++k)
    w.label_of_y.emplace(f.keys[k], w.label_of_x.at(f.sets[k].front()));
  return w;
}

std::vector<SlicePartition> conditional_overlap_partitions(const JointRange& j, const VarList& x,
                                                           const VarList& y, const VarList& w) {
  const auto ix = j.indices_of(x);
  const auto iy = j.indices_of(y);
  const auto iw = j.indices_of(w);
  require_disjoint({ix, iy, iw}, "conditional_nonstochastic_info");
  std::vector<SlicePartition> out;
  for (const auto& [wkey, rows] : slices(j.support(), iw)) {
    out.push_back({wkey, overlap_partition(family_from(rows, ix, iy))});
  }
  return out;
}

std::size_t conditional_overlap_count(const JointRange& j, const VarList& x, const VarList& y,
                                      const VarList& w) {
  std::size_t best = 0;
  bool first = true;
  for (const auto& s : conditional_overlap_partitions(j, x, y, w)) {
    if (first || s.partition.size() < best) best = s.partition.size();
    first = false;
  }
  return best;
}

double conditional_nonstochastic_info(const JointRange& j, const VarList& x, const VarList& y,
                                      const VarList& w) {
  return std::log2(static_cast<double>(conditional_overlap_count(j, x, y, w)));
}

}  // namespace zecmac::uv
