#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mac_fixtures.hpp"
#include "uv_oracles.hpp"
#include "zecmac/errors.hpp"
#include "zecmac/mac_model.hpp"

namespace zecmac {
namespace {

using mac::Block;
using mac::MacSpec;
using mac::SequenceSpace;
using uv::Tuple;
using namespace testing;

TEST(SequenceSpace, IndexRoundTrip) {
  SequenceSpace s(3, 4);
  EXPECT_EQ(s.size(), 81u);
  for (std::uint64_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.index(s.block(i)), i);
  EXPECT_EQ(s.block(5), (Block{0, 0, 1, 2}));
  EXPECT_THROW(SequenceSpace(2, 70), CapError);
  EXPECT_THROW(s.index(Block{0, 0, 3, 0}), ConfigError);
}

TEST(MacSpec, ValidatesTable) {
  EXPECT_THROW(MacSpec({ints(2), ints(2)}, ints(1), ints(3), {0, 1, 1}), ConfigError);
  EXPECT_THROW(MacSpec({ints(2), ints(2)}, ints(1), ints(2), {0, 1, 1, 2}), ConfigError);
  EXPECT_THROW(MacSpec({}, ints(1), ints(1), {}), ConfigError);
  const auto m = binary_adder();
  EXPECT_EQ(m.apply(std::vector<std::uint32_t>{1, 1}, 0), 2u);
  EXPECT_THROW(m.apply(std::vector<std::uint32_t>{2, 1}, 0), ConfigError);
  const auto n = noisy_adder();
  EXPECT_EQ(n.apply(std::vector<std::uint32_t>{1, 0}, 1), 2u);
}

TEST(MacSpec, BlockAlphabetLabels) {
  const auto m = binary_adder();
  const auto a = m.block_alphabet(0, 2);
  ASSERT_EQ(a->size(), 4u);
  EXPECT_EQ(uv::to_string((*a)[2]), "10");
  EXPECT_EQ(m.block_alphabet(2, 2)->size(), 9u);
  EXPECT_EQ(m.block_alphabet(3, 3)->size(), 1u);
  EXPECT_EQ(m.block_alphabet(0, 2), a);
  MacSpec copy = m;
  EXPECT_EQ(copy, m);
}

TEST(OutputSet, Examples) {
  EXPECT_EQ(mac::output_set(binary_adder(), {{0}, {1}}), (std::vector<Block>{{1}}));
  for (std::uint32_t a = 0; a < 2; ++a)
    for (std::uint32_t b = 0; b < 2; ++b)
      EXPECT_EQ(mac::output_set(noisy_xor(), {{a}, {b}}), (std::vector<Block>{{0}, {1}}));
  EXPECT_EQ(mac::output_set(binary_adder(), {{0, 1}, {1, 1}}), (std::vector<Block>{{1, 2}}));
  EXPECT_THROW(mac::output_set(binary_adder(), {{0, 2}, {1, 1}}), ConfigError);
  EXPECT_THROW(mac::output_set(binary_adder(), {{0}, {1, 1}}), ConfigError);
}

TEST(OutputSet, IndicesAgreeWithBlocks) {
  const auto m = noisy_mod3();
  SequenceSpace x(3, 2), y(3, 2);
  for (std::uint64_t a = 0; a < x.size(); ++a)
    for (std::uint64_t b = 0; b < x.size(); ++b) {
      std::vector<std::uint64_t> cw{a, b};
      std::vector<Block> blocks;
      for (auto i : mac::output_indices(m, 2, cw)) blocks.push_back(y.block(i));
      EXPECT_EQ(blocks, mac::output_set(m, {x.block(a), x.block(b)}));
    }
}

TEST(ExtendJoint, Examples) {
  const auto m = binary_adder();
  {
    auto p = mac::make_input_process(m, 1, false, 0, {{1, 0}});
    auto j = mac::extend_joint(m, p);
    EXPECT_EQ(j.support(), (std::vector<Tuple>{{1, 0, 1}}));
  }
  {
    auto p = mac::make_input_process(m, 1, false, 0, product_tuples({2, 2}));
    auto j = mac::extend_joint(m, p);
    ASSERT_EQ(j.support().size(), 4u);
    std::multiset<std::uint32_t> ys;
    for (const auto& t : j.support()) ys.insert(t[2]);
    EXPECT_EQ(ys, (std::multiset<std::uint32_t>{0, 1, 1, 2}));
    EXPECT_EQ(j.variables(), (uv::VarList{"X1", "X2", "Y"}));
  }
  {
    const auto n = noisy_adder();
    auto p = mac::make_input_process(n, 1, false, 0, product_tuples({2, 2}));
    auto j = mac::extend_joint(n, p, true);
    EXPECT_EQ(j.support().size(), 8u);
    // independent enumeration of x1 + x2 + z
    std::set<Tuple> expected;
    for (std::uint32_t a = 0; a < 2; ++a)
      for (std::uint32_t b = 0; b < 2; ++b)
        for (std::uint32_t z = 0; z < 2; ++z) expected.insert({a, b, z, a + b + z});
    EXPECT_EQ(std::set<Tuple>(j.support().begin(), j.support().end()), expected);
    EXPECT_EQ(uv::marginal_range(j, {"Y"}), (std::vector<Tuple>{{0}, {1}, {2}, {3}}));
  }
}

TEST(ExtendJoint, RejectsMismatchedProcess) {
  const auto m = binary_adder();
  auto p = mac::make_input_process(noisy_mod3(), 1, false, 0, {{0, 0}});
  EXPECT_THROW(mac::extend_joint(m, p), ConfigError);
  EXPECT_THROW(mac::make_input_process(m, 0, false, 0, {{0, 0}}), ConfigError);
}

TEST(Properties, ExtensionInvariants) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 150; ++trial) {
    const auto m = random_mac(rng, 3, 3);
    const std::size_t n = 1 + rng() % 2;
    const std::uint32_t nu = 1 + rng() % 3;
    std::vector<std::uint32_t> sizes{nu};
    for (std::size_t j = 0; j < m.num_users(); ++j)
      sizes.push_back(static_cast<std::uint32_t>(SequenceSpace(m.input_size(j), n).size()));
    std::vector<Tuple> support;
    for (auto& t : product_tuples(sizes))
      if (rng() % 3 == 0) support.push_back(t);
    if (support.empty()) support.push_back(Tuple(sizes.size(), 0));
    auto p = mac::make_input_process(m, n, true, nu, support);
    const auto j = mac::extend_joint(m, p);
    const auto jz = mac::extend_joint(m, p, true);
    const std::uint64_t nz = SequenceSpace(m.noise_size(), n).size();

    // size bound, with equality exactly when noise is injective per input tuple
    bool injective = true;
    for (const auto& t : p.joint.support()) {
      std::vector<std::uint64_t> cw(t.begin() + 1, t.end());
      injective = injective && mac::output_indices(m, n, cw).size() == nz;
    }
    EXPECT_LE(j.support().size(), p.joint.support().size() * nz);
    EXPECT_EQ(j.support().size() == p.joint.support().size() * nz, injective);

    uv::VarList xs;
    for (std::size_t u = 0; u < m.num_users(); ++u) xs.push_back(mac::input_var(u));
    EXPECT_TRUE(uv::is_markov(j, {"U"}, xs, {"Y"}));
    uv::VarList ux = xs;
    ux.insert(ux.begin(), "U");
    EXPECT_TRUE(uv::is_unrelated(jz, {{"Z"}, ux}));
  }
}

}  // namespace
}  // namespace zecmac
