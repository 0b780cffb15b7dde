#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_util.hpp"
#include "xmbcr/gf256.hpp"

namespace {

using xmbcr::Block;
using xmbcr::Errc;
using xmbcr::gf256::Element;
namespace gf = xmbcr::gf256;
namespace oracle = xmbcr::testing;

Element E(unsigned v) { return Element(static_cast<std::uint8_t>(v)); }

TEST(Gf256, AddIsXor) {
  EXPECT_EQ(gf::add(E(0x00), E(0x5A)), E(0x5A));
  EXPECT_EQ(gf::add(E(0x5A), E(0x5A)), E(0x00));
  EXPECT_EQ(gf::add(E(0x0F), E(0xF0)), E(0xFF));
}

TEST(Gf256, MulExamples) {
  for (unsigned x = 0; x < 256; ++x) EXPECT_EQ(gf::mul(E(0), E(x)), E(0));
  EXPECT_EQ(gf::mul(E(0x02), E(0x03)), E(0x06));
  EXPECT_EQ(gf::mul(E(0x80), E(0x02)), E(0x1D));
}

TEST(Gf256, MulMatchesLongDivisionOnAllPairs) {
  for (unsigned a = 0; a < 256; ++a)
    for (unsigned b = 0; b < 256; ++b)
      ASSERT_EQ(gf::mul(E(a), E(b)).value, oracle::oracle_mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)))
          << a << " * " << b;
}

TEST(Gf256, InverseExamples) {
  EXPECT_EQ(gf::inv(E(0x01)), E(0x01));
  EXPECT_EQ(gf::inv(E(0x02)), E(0x8E));
  EXPECT_ERRC(gf::inv(E(0)), Errc::ZeroInverse);
}

TEST(Gf256, InverseOfEveryNonzeroElement) {
  for (unsigned a = 1; a < 256; ++a) {
    EXPECT_EQ(gf::mul(E(a), gf::inv(E(a))), E(1)) << a;
    EXPECT_EQ(gf::inv(E(a)).value, oracle::oracle_inv(static_cast<std::uint8_t>(a)));
  }
}

TEST(Gf256, GeneratorPowersCoverTheMultiplicativeGroup) {
  std::set<unsigned> seen;
  for (unsigned e = 0; e < 255; ++e) {
    const Element x = gf::exp(e);
    seen.insert(x.value);
    EXPECT_EQ(gf::log(x), e);
  }
  EXPECT_EQ(seen.size(), 255u);
  EXPECT_EQ(seen.count(0), 0u);
  EXPECT_EQ(gf::pow(E(2), 255), E(1));
}

TEST(Gf256, AssociativeAndDistributiveOnSample) {
  std::mt19937 rng(20240);
  for (int i = 0; i < 20000; ++i) {
    const Element a = E(rng() & 0xFF), b = E(rng() & 0xFF), c = E(rng() & 0xFF);
    ASSERT_EQ(a * (b * c), (a * b) * c);
    ASSERT_EQ(a * (b + c), a * b + a * c);
  }
}

TEST(Gf256, BlockAxpy) {
  const Block b{1, 2, 3, 250};
  EXPECT_EQ(gf::block_axpy(Block(4, 0), E(1), b), b);
  EXPECT_EQ(gf::block_axpy(b, E(0), Block{9, 9, 9, 9}), b);
  EXPECT_EQ(gf::block_axpy(Block{0x02, 0x02}, E(0x03), Block{0x01, 0x02}), (Block{0x01, 0x04}));
}

TEST(Gf256, BlockAxpyIsLaneWise) {
  std::mt19937_64 rng(3);
  const Block acc = oracle::random_block(rng, 300), src = oracle::random_block(rng, 300);
  for (unsigned c : {2u, 0x1Du, 0x8Eu, 0xFFu}) {
    const Block out = gf::block_axpy(acc, E(c), src);
    for (std::size_t j = 0; j < acc.size(); ++j)
      ASSERT_EQ(out[j], acc[j] ^ oracle::oracle_mul(static_cast<std::uint8_t>(c), src[j]));
  }
}

TEST(Gf256, BlockAxpyRejectsLengthMismatch) {
  EXPECT_ERRC(gf::block_axpy(Block(3), E(1), Block(4)), Errc::LengthMismatch);
}

}  // namespace
