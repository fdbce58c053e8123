#pragma once

// Finite uncertain-variable engine. A collection of uncertain variables is
// represented by its joint range: the finite set of value tuples that can
// occur together. Every quantity here (conditional ranges, unrelatedness,
// overlap partitions, nonstochastic information) is a function of that set.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace zecmac::uv {

using Symbol = std::variant<std::int64_t, std::string>;
using Alphabet = std::vector<Symbol>;
using AlphabetPtr = std::shared_ptr<const Alphabet>;

// One alphabet index per variable (or per projected variable).
using Tuple = std::vector<std::uint32_t>;
using VarList = std::vector<std::string>;

std::string to_string(const Symbol& s);

// Alphabet {0, 1, ..., size-1} with integer symbols.
AlphabetPtr integer_alphabet(std::uint32_t size);

class JointRange {
 public:
  JointRange(VarList variables, std::vector<AlphabetPtr> alphabets,
             std::vector<Tuple> support);
  JointRange(VarList variables, std::vector<Alphabet> alphabets,
             std::vector<Tuple> support);

  // Integer alphabets 0..size-1 for each variable.
  static JointRange indexed(VarList variables,
                            const std::vector<std::uint32_t>& alphabet_sizes,
                            std::vector<Tuple> support);

  const VarList& variables() const noexcept { return variables_; }
  std::size_t arity() const noexcept { return variables_.size(); }
  const Alphabet& alphabet(std::size_t var) const { return *alphabets_.at(var); }
  const AlphabetPtr& alphabet_ptr(std::size_t var) const { return alphabets_.at(var); }

  // Sorted, duplicate free.
  const std::vector<Tuple>& support() const noexcept { return support_; }

  bool contains(const Tuple& t) const;

  // Throws ConfigError for an unknown name.
  std::size_t index_of(std::string_view name) const;
  std::vector<std::size_t> indices_of(const VarList& names) const;

  // Symbols of a projected tuple, for display.
  std::string format(const std::vector<std::size_t>& vars, const Tuple& t) const;

 private:
  VarList variables_;
  std::vector<AlphabetPtr> alphabets_;
  std::vector<Tuple> support_;
};

Tuple project(const Tuple& t, const std::vector<std::size_t>& idx);

// The family ⟦target | given⟧ of conditional ranges, one set per realization
// of `given`.
struct CondFamily {
  VarList target;
  VarList given;
  std::vector<Tuple> keys;               // sorted realizations of `given`
  std::vector<std::vector<Tuple>> sets;  // sets[i] = ⟦target | keys[i]⟧, sorted

  // Union of all sets (the marginal range of `target`).
  std::vector<Tuple> target_range() const;
};

struct OverlapPartition {
  // Blocks ordered by their smallest member; each block sorted.
  std::vector<std::vector<Tuple>> blocks;
  std::map<Tuple, std::size_t> block_index;

  std::size_t size() const noexcept { return blocks.size(); }
  std::size_t block_of(const Tuple& t) const;
};

struct CommonVariableWitness {
  std::size_t cardinality = 0;
  std::map<Tuple, std::size_t> label_of_x;
  std::map<Tuple, std::size_t> label_of_y;
};

std::vector<Tuple> marginal_range(const JointRange& j, const VarList& vars);

CondFamily conditional_family(const JointRange& j, const VarList& target,
                              const VarList& given);

bool is_unrelated(const JointRange& j, const std::vector<VarList>& groups);

bool is_conditionally_unrelated(const JointRange& j,
                                const std::vector<VarList>& groups,
                                const VarList& given);

// X1 <-> Y <-> X2. Checks the conditional-range form and the conditional
// unrelatedness form and throws InvariantError if they ever disagree.
bool is_markov(const JointRange& j, const VarList& x1, const VarList& y,
               const VarList& x2);

// Connected components of the "conditional ranges intersect" relation.
// Rejects families containing an empty set.
OverlapPartition overlap_partition(const CondFamily& f);

// |⟦X|Y⟧*| and its base-2 logarithm.
std::size_t overlap_count(const JointRange& j, const VarList& x, const VarList& y);
double nonstochastic_info(const JointRange& j, const VarList& x, const VarList& y);

CommonVariableWitness maximal_common_variable(const JointRange& j, const VarList& x,
                                              const VarList& y);

// Per realization w of W: the overlap partition of ⟦X|w⟧ induced by the
// family ⟦X|y,w⟧, y in ⟦Y|w⟧.
struct SlicePartition {
  Tuple w;
  OverlapPartition partition;
};
std::vector<SlicePartition> conditional_overlap_partitions(const JointRange& j,
                                                           const VarList& x,
                                                           const VarList& y,
                                                           const VarList& w);

// min over w of |⟦X|Y,w⟧*|, and its logarithm.
std::size_t conditional_overlap_count(const JointRange& j, const VarList& x,
                                      const VarList& y, const VarList& w);
double conditional_nonstochastic_info(const JointRange& j, const VarList& x,
                                      const VarList& y, const VarList& w);

}  // namespace zecmac::uv
