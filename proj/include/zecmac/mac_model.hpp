#pragma once

// Deterministic multiple access channel y = f(x^1, ..., x^M, z) with finite
// alphabets, and its n-fold memoryless extension.

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "zecmac/uv_core.hpp"

namespace zecmac::mac {

using uv::Alphabet;
using uv::AlphabetPtr;
using Block = std::vector<std::uint32_t>;

// Length-n sequences over {0..radix-1}, indexed in lexicographic order
// (first symbol most significant).
class SequenceSpace {
 public:
  SequenceSpace(std::uint32_t radix, std::size_t length);

  std::uint64_t size() const noexcept { return size_; }
  std::size_t length() const noexcept { return length_; }
  std::uint32_t radix() const noexcept { return radix_; }

  std::uint64_t index(std::span<const std::uint32_t> seq) const;
  Block block(std::uint64_t index) const;

 private:
  std::uint32_t radix_;
  std::size_t length_;
  std::uint64_t size_;
};

class MacSpec {
 public:
  // `table` is dense and row-major over (x^1, ..., x^M, z), x^1 most
  // significant; each entry is an index into `output`.
  MacSpec(std::vector<Alphabet> inputs, Alphabet noise, Alphabet output,
          std::vector<std::uint32_t> table);

  MacSpec(const MacSpec& other);
  MacSpec& operator=(const MacSpec& other);

  std::size_t num_users() const noexcept { return inputs_.size(); }
  const Alphabet& input_alphabet(std::size_t user) const { return inputs_.at(user); }
  const Alphabet& noise_alphabet() const noexcept { return noise_; }
  const Alphabet& output_alphabet() const noexcept { return output_; }
  std::uint32_t input_size(std::size_t user) const {
    return static_cast<std::uint32_t>(inputs_.at(user).size());
  }
  std::uint32_t noise_size() const noexcept { return static_cast<std::uint32_t>(noise_.size()); }
  std::uint32_t output_size() const noexcept { return static_cast<std::uint32_t>(output_.size()); }
  const std::vector<std::uint32_t>& table() const noexcept { return table_; }

  // One input symbol index per user.
  std::uint32_t apply(std::span<const std::uint32_t> inputs, std::uint32_t z) const;

  // Alphabet of length-n blocks of user `user`'s inputs (user == num_users()
  // selects the output, user == num_users()+1 the noise). Symbols are the
  // concatenated symbol strings; cached.
  AlphabetPtr block_alphabet(std::size_t which, std::size_t n) const;

  bool operator==(const MacSpec& o) const {
    return inputs_ == o.inputs_ && noise_ == o.noise_ && output_ == o.output_ && table_ == o.table_;
  }

 private:
  std::vector<Alphabet> inputs_;
  Alphabet noise_;
  Alphabet output_;
  std::vector<std::uint32_t> table_;
  std::vector<std::size_t> stride_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::size_t, std::size_t>, AlphabetPtr> cache_;
};

// Every output block reachable from the given per-user input blocks, one
// noise sequence at a time. Sorted, duplicate free.
std::vector<Block> output_set(const MacSpec& m, const std::vector<Block>& x_blocks);

// Same as output_set, on sequence indices (codeword index per user) and
// returning output sequence indices.
std::vector<std::uint64_t> output_indices(const MacSpec& m, std::size_t n,
                                          std::span<const std::uint64_t> codewords);

// Joint range of (U,) X^1_{1:n}, ..., X^M_{1:n}; block variables take
// sequence indices as symbols.
struct InputProcess {
  std::size_t blocklength = 1;
  bool has_aux = false;
  uv::JointRange joint;
};

// Support tuples are (u, x^1, ..., x^M) when has_aux, else (x^1, ..., x^M),
// with each x^j a sequence index.
InputProcess make_input_process(const MacSpec& m, std::size_t n, bool has_aux,
                                std::uint32_t aux_size, std::vector<uv::Tuple> support);

// Variable names used for block variables.
std::string input_var(std::size_t user);  // "X1", "X2", ...
inline const char* kAuxVar = "U";
inline const char* kOutputVar = "Y";
inline const char* kNoiseVar = "Z";

// (U,) X^1..X^M, Y over every support tuple and every noise sequence. With
// include_noise, Z_{1:n} is kept as a variable just before Y.
uv::JointRange extend_joint(const MacSpec& m, const InputProcess& p, bool include_noise = false);

}  // namespace zecmac::mac
