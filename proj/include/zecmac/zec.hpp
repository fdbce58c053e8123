#pragma once

// Zero-error codes for a MAC with a common message W0 (known to every
// encoder) and private messages W1..WM. Messages are 0-based throughout.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zecmac/mac_model.hpp"
#include "zecmac/rates.hpp"

namespace zecmac::zec {

using mac::Block;
using mac::MacSpec;
using Messages = std::vector<std::uint64_t>;  // (w0, w1, ..., wM)

// Decoder metadata left by construct_code: first the block of ⟦U|Y⟧* that
// contains y, then per user the block of ⟦X^j|Y,u⟧*.
struct StagedTables {
  std::map<std::uint64_t, std::uint64_t> common_block;  // y -> w0
  // private_block[w0][j]: y -> block index (= wj when below w_max[j+1])
  std::vector<std::vector<std::map<std::uint64_t, std::uint64_t>>> private_block;
};

struct ZeCode {
  std::size_t n = 1;
  std::vector<std::uint64_t> w_max;  // M+1 entries
  // encoders[j][w0 * w_max[j+1] + wj]: sequence index of the codeword of user j+1
  std::vector<std::vector<std::uint64_t>> encoders;
  std::optional<StagedTables> staged;

  std::size_t num_users() const noexcept { return encoders.size(); }
  std::uint64_t total_messages() const;
  std::uint64_t codeword(std::size_t user, std::uint64_t w0, std::uint64_t wj) const;
  std::vector<std::uint64_t> encode(const Messages& w) const;
  rates::RatePoint rate_point(std::string source = {}) const;

  // Mixed-radix message tuple id, w0 most significant.
  std::uint64_t message_id(const Messages& w) const;
  Messages message_tuple(std::uint64_t id) const;

  // Checks shapes and codeword ranges against the channel.
  void validate(const MacSpec& m) const;
};

bool is_zero_error(const ZeCode& c, const MacSpec& m);

class Decoder {
 public:
  // Throws InvariantError when the code is not zero-error.
  Decoder(const ZeCode& c, const MacSpec& m);

  // Staged path when the code carries tables, checked against table inversion.
  Messages decode(std::uint64_t y) const;
  Messages decode(const Block& y) const;
  std::size_t reachable_outputs() const noexcept { return table_.size(); }

 private:
  const ZeCode* code_;
  std::size_t n_;
  std::uint32_t output_size_;
  std::map<std::uint64_t, std::uint64_t> table_;  // y -> message id
};

Messages decode(const ZeCode& c, const MacSpec& m, const Block& y);

// Code achieving the corner of the rate box of an input structure (U, X^1..X^M).
// The structure must carry U and satisfy both conditions; violated
// conditions raise PreconditionError naming the check.
ZeCode construct_code(const mac::InputProcess& p, const MacSpec& m);

// Raw I* values behind a structure, reported alongside the integer counts.
struct StructureInfo {
  std::size_t common_blocks = 0;                // |⟦U|Y⟧*|
  std::vector<std::size_t> private_blocks;      // min_u |⟦X^j|Y,u⟧*|
  double common_info = 0;
  std::vector<double> private_info;
};
StructureInfo structure_info(const mac::InputProcess& p, const MacSpec& m);

// j blocks of code a followed by k blocks of code b.
ZeCode time_share(const MacSpec& ma, const ZeCode& a, const MacSpec& mb, const ZeCode& b,
                  std::uint64_t j, std::uint64_t k);

struct Caps {
  std::uint64_t cap_u = 4;     // bound on the common message count
  std::uint64_t cap_wmax = 4;  // bound on each private message count
  std::size_t limit_n = 4;
  std::uint64_t max_search = 50'000'000;  // brute-force candidate budget
};

struct Region {
  std::size_t n_max = 0;
  std::vector<rates::RatePoint> points;  // maximal points, lexicographic
  std::vector<ZeCode> codes;             // witness per point
  std::vector<rates::RatePoint> hull;
  std::vector<std::string> warnings;
  Caps caps;
};

// Union of the rate boxes of all input structures at blocklength n.
Region enumerate_region_thm1(const MacSpec& m, std::size_t n, const Caps& caps);

// Exhaustive search over codes with message counts within the caps.
Region enumerate_region_bruteforce(const MacSpec& m, std::size_t n, const Caps& caps);

// Candidate count the brute-force search would examine.
double bruteforce_search_size(const MacSpec& m, std::size_t n, const Caps& caps);

// Maximal points present in one region but not in the other (by exact rate).
struct RegionDiff {
  std::vector<rates::RatePoint> only_a;
  std::vector<rates::RatePoint> only_b;
  bool empty() const noexcept { return only_a.empty() && only_b.empty(); }
};
RegionDiff diff(const Region& a, const Region& b);

}  // namespace zecmac::zec
