#include "zecmac/mac_model.hpp"

#include <algorithm>
#include <limits>

#include "zecmac/errors.hpp"

namespace zecmac::mac {

SequenceSpace::SequenceSpace(std::uint32_t radix, std::size_t length)
    : radix_(radix), length_(length), size_(1) {
  if (radix == 0) throw ConfigError("sequence space over an empty alphabet");
  constexpr std::uint64_t kMax = std::uint64_t{1} << 62;
  for (std::size_t i = 0; i < length; ++i) {
    if (size_ > kMax / radix) throw CapError("sequence space too large to index");
    size_ *= radix;
  }
}

std::uint64_t SequenceSpace::index(std::span<const std::uint32_t> seq) const {
  if (seq.size() != length_) throw ConfigError("sequence has wrong length");
  std::uint64_t idx = 0;
  for (auto s : seq) {
    if (s >= radix_) throw ConfigError("sequence symbol outside alphabet");
    idx = idx * radix_ + s;
  }
  return idx;
}

Block SequenceSpace::block(std::uint64_t index) const {
  if (index >= size_) throw ConfigError("sequence index out of range");
  Block b(length_);
  for (std::size_t k = length_; k-- > 0;) {
    b[k] = static_cast<std::uint32_t>(index % radix_);
    index /= radix_;
  }
  return b;
}

MacSpec::MacSpec(std::vector<Alphabet> inputs, Alphabet noise, Alphabet output,
                 std::vector<std::uint32_t> table)
    : inputs_(std::move(inputs)), noise_(std::move(noise)), output_(std::move(output)),
      table_(std::move(table)) {
  if (inputs_.empty()) throw ConfigError("MAC needs at least one user");
  for (std::size_t j = 0; j < inputs_.size(); ++j)
    if (inputs_[j].empty()) throw ConfigError("MAC input alphabet " + input_var(j) + " is empty");
  if (noise_.empty()) throw ConfigError("MAC noise alphabet is empty");
  if (output_.empty()) throw ConfigError("MAC output alphabet is empty");

  stride_.assign(inputs_.size() + 1, 1);
  std::size_t cells = noise_.size();
  for (std::size_t j = inputs_.size(); j-- > 0;) {
    stride_[j] = cells;
    cells *= inputs_[j].size();
  }
  if (table_.size() != cells)
    throw ConfigError("MAC table has " + std::to_string(table_.size()) + " cells, expected " +
                      std::to_string(cells));
  for (auto y : table_)
    if (y >= output_.size()) throw ConfigError("MAC table value outside output alphabet");
}

MacSpec::MacSpec(const MacSpec& o)
    : inputs_(o.inputs_), noise_(o.noise_), output_(o.output_), table_(o.table_), stride_(o.stride_) {}

MacSpec& MacSpec::operator=(const MacSpec& o) {
  if (this != &o) {
    inputs_ = o.inputs_;
    noise_ = o.noise_;
    output_ = o.output_;
    table_ = o.table_;
    stride_ = o.stride_;
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
  }
  return *this;
}

std::uint32_t MacSpec::apply(std::span<const std::uint32_t> inputs, std::uint32_t z) const {
  if (inputs.size() != inputs_.size()) throw ConfigError("wrong number of channel inputs");
  std::size_t cell = z;
  if (z >= noise_.size()) throw ConfigError("noise symbol outside alphabet");
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (inputs[j] >= inputs_[j].size())
      throw ConfigError("input symbol outside alphabet of " + input_var(j));
    cell += inputs[j] * stride_[j];
  }
  return table_[cell];
}

AlphabetPtr MacSpec::block_alphabet(std::size_t which, std::size_t n) const {
  std::lock_guard lock(cache_mutex_);
  auto key = std::make_pair(which, n);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  const Alphabet* base = nullptr;
  if (which < inputs_.size()) base = &inputs_[which];
  else if (which == inputs_.size()) base = &output_;
  else if (which == inputs_.size() + 1) base = &noise_;
  else throw ConfigError("block_alphabet: bad selector");

  bool single_char = true;
  for (const auto& s : *base) single_char = single_char && uv::to_string(s).size() == 1;

  SequenceSpace space(static_cast<std::uint32_t>(base->size()), n);
  auto out = std::make_shared<Alphabet>();
  out->reserve(space.size());
  for (std::uint64_t i = 0; i < space.size(); ++i) {
    std::string label;
    const auto b = space.block(i);
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (k && !single_char) label += '.';
      label += uv::to_string((*base)[b[k]]);
    }
    out->emplace_back(std::move(label));
  }
  cache_.emplace(key, out);
  return out;
}

std::string input_var(std::size_t user) { return "X" + std::to_string(user + 1); }

namespace {

// Output sequence indices of fixed per-user input blocks, over all noise.
std::vector<std::uint64_t> outputs_of_blocks(const MacSpec& m, const std::vector<Block>& xs,
                                             std::size_t n) {
  const SequenceSpace noise(m.noise_size(), n);
  std::vector<std::uint64_t> out;
  out.reserve(noise.size());
  std::vector<std::uint32_t> symbol(m.num_users());
  std::vector<std::uint32_t> z(n, 0);
  for (std::uint64_t zi = 0; zi < noise.size(); ++zi) {
    std::uint64_t y = 0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < xs.size(); ++j) symbol[j] = xs[j][k];
      y = y * m.output_size() + m.apply(symbol, z[k]);
    }
    out.push_back(y);
    // odometer over noise sequences, last position fastest
    for (std::size_t k = n; k-- > 0;) {
      if (++z[k] < m.noise_size()) break;
      z[k] = 0;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<Block> output_set(const MacSpec& m, const std::vector<Block>& x_blocks) {
  if (x_blocks.size() != m.num_users()) throw ConfigError("one input block per user required");
  const std::size_t n = x_blocks.front().size();
  for (std::size_t j = 0; j < x_blocks.size(); ++j) {
    if (x_blocks[j].size() != n) throw ConfigError("input blocks differ in length");
    for (auto s : x_blocks[j])
      if (s >= m.input_size(j)) throw ConfigError("input symbol outside alphabet of " + input_var(j));
  }
  const SequenceSpace ys(m.output_size(), n);
  std::vector<Block> out;
  for (auto y : outputs_of_blocks(m, x_blocks, n)) out.push_back(ys.block(y));
  return out;
}

std::vector<std::uint64_t> output_indices(const MacSpec& m, std::size_t n,
                                          std::span<const std::uint64_t> codewords) {
  if (codewords.size() != m.num_users()) throw ConfigError("one codeword per user required");
  std::vector<Block> xs;
  xs.reserve(codewords.size());
  for (std::size_t j = 0; j < codewords.size(); ++j)
    xs.push_back(SequenceSpace(m.input_size(j), n).block(codewords[j]));
  return outputs_of_blocks(m, xs, n);
}

InputProcess make_input_process(const MacSpec& m, std::size_t n, bool has_aux,
                                std::uint32_t aux_size, std::vector<uv::Tuple> support) {
  if (n == 0) throw ConfigError("blocklength must be positive");
  uv::VarList vars;
  std::vector<AlphabetPtr> alphabets;
  if (has_aux) {
    if (aux_size == 0) throw ConfigError("auxiliary variable needs a nonempty alphabet");
    vars.push_back(kAuxVar);
    alphabets.push_back(uv::integer_alphabet(aux_size));
  }
  for (std::size_t j = 0; j < m.num_users(); ++j) {
    vars.push_back(input_var(j));
    alphabets.push_back(m.block_alphabet(j, n));
  }
  return InputProcess{n, has_aux, uv::JointRange(std::move(vars), std::move(alphabets), std::move(support))};
}

uv::JointRange extend_joint(const MacSpec& m, const InputProcess& p, bool include_noise) {
  const std::size_t n = p.blocklength;
  const std::size_t offset = p.has_aux ? 1 : 0;
  if (p.joint.arity() != offset + m.num_users())
    throw ConfigError("input process does not match the MAC's user count");
  for (std::size_t j = 0; j < m.num_users(); ++j) {
    if (p.joint.alphabet(offset + j).size() != SequenceSpace(m.input_size(j), n).size())
      throw ConfigError("input process alphabet of " + input_var(j) + " does not match the MAC");
  }

  const SequenceSpace noise(m.noise_size(), n);
  std::vector<SequenceSpace> in;
  for (std::size_t j = 0; j < m.num_users(); ++j) in.emplace_back(m.input_size(j), n);

  std::vector<uv::Tuple> support;
  support.reserve(p.joint.support().size() * noise.size());
  std::vector<Block> xs(m.num_users());
  std::vector<std::uint32_t> symbol(m.num_users());
  for (const auto& t : p.joint.support()) {
    for (std::size_t j = 0; j < m.num_users(); ++j) xs[j] = in[j].block(t[offset + j]);
    for (std::uint64_t zi = 0; zi < noise.size(); ++zi) {
      const auto z = noise.block(zi);
      std::uint64_t y = 0;
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < xs.size(); ++j) symbol[j] = xs[j][k];
        y = y * m.output_size() + m.apply(symbol, z[k]);
      }
      uv::Tuple row = t;
      if (include_noise) row.push_back(static_cast<std::uint32_t>(zi));
      row.push_back(static_cast<std::uint32_t>(y));
      support.push_back(std::move(row));
    }
  }

  uv::VarList vars = p.joint.variables();
  std::vector<AlphabetPtr> alphabets;
  for (std::size_t v = 0; v < p.joint.arity(); ++v) alphabets.push_back(p.joint.alphabet_ptr(v));
  if (include_noise) {
    vars.push_back(kNoiseVar);
    alphabets.push_back(m.block_alphabet(m.num_users() + 1, n));
  }
  vars.push_back(kOutputVar);
  alphabets.push_back(m.block_alphabet(m.num_users(), n));
  return uv::JointRange(std::move(vars), std::move(alphabets), std::move(support));
}

}  // namespace zecmac::mac
