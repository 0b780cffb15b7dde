#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "xmbcr/codec.hpp"

namespace {

using namespace xmbcr;
using xmbcr::testing::label;
using xmbcr::testing::random_payload;

Block blk(std::uint8_t v) { return Block{v, static_cast<std::uint8_t>(v + 100)}; }

std::vector<Block> numbered_payload(const CodeParams& p) {
  std::vector<Block> x;
  for (std::size_t i = 1; i <= p.file_blocks; ++i) x.push_back(blk(static_cast<std::uint8_t>(i)));
  return x;
}

TEST(DeriveParams, Examples) {
  const CodeParams p = derive_params(6, 2, 4, 2);
  EXPECT_EQ(p.alpha, 9u);
  EXPECT_EQ(p.beta, 2u);
  EXPECT_EQ(p.beta_prime, 1u);
  EXPECT_EQ(p.file_blocks, 16u);

  const CodeParams small = derive_params(2, 1, 1, 1);
  EXPECT_EQ(small.alpha, 2u);
  EXPECT_EQ(small.file_blocks, 2u);
}

TEST(DeriveParams, Rejections) {
  EXPECT_ERRC(derive_params(5, 2, 4, 2), Errc::InvalidParams);
  EXPECT_ERRC(derive_params(4, 3, 2, 2), Errc::InvalidParams);
  EXPECT_ERRC(derive_params(4, 2, 4, 0), Errc::InvalidParams);
  EXPECT_ERRC(derive_params(4, 0, 2, 2), Errc::InvalidParams);
  EXPECT_ERRC(derive_params(200, 2, 100, 100), Errc::InvalidParams);
}

TEST(DeriveParams, FileSizeIdentities) {
  for (const CodeParams& p : xmbcr::testing::parameter_sweep()) {
    EXPECT_EQ(p.file_blocks, p.k * p.n + p.k * (p.d - p.k)) << label(p);
    EXPECT_EQ(p.alpha, p.d + p.n - 1) << label(p);
  }
}

TEST(SplitStripe, SixDeviceLayout) {
  const CodeParams p = derive_params(6, 2, 4, 2);
  const auto x = numbered_payload(p);
  const SourceLayout layout = split_stripe(x, p);
  ASSERT_EQ(layout.a.size(), 6u);
  ASSERT_EQ(layout.b.size(), 2u);
  EXPECT_EQ(layout.a[0], (std::vector<Block>{blk(1), blk(2)}));
  EXPECT_EQ(layout.a[5], (std::vector<Block>{blk(11), blk(12)}));
  EXPECT_EQ(layout.b[0], (std::vector<Block>{blk(13), blk(14)}));
  EXPECT_EQ(layout.b[1], (std::vector<Block>{blk(15), blk(16)}));
}

TEST(SplitStripe, DegenerateAndWrongCount) {
  const CodeParams p = derive_params(3, 1, 1, 2);
  const SourceLayout layout = split_stripe(numbered_payload(p), p);
  EXPECT_TRUE(layout.b.empty());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(layout.a[i], std::vector<Block>{blk(static_cast<std::uint8_t>(i + 1))});

  const CodeParams q = derive_params(6, 2, 4, 2);
  const std::vector<Block> fifteen(15, Block(2));
  EXPECT_ERRC(split_stripe(fifteen, q), Errc::WrongBlockCount);
}

TEST(SlotArithmetic, OwnerAndHolderAreInverse) {
  for (std::size_t n = 2; n < 10; ++n)
    for (DeviceId holder = 0; holder < n; ++holder)
      for (std::size_t m = 1; m < n; ++m) {
        const DeviceId owner = slot_owner(holder, m, n);
        EXPECT_NE(owner, holder);
        EXPECT_EQ(slot_for(holder, owner, n), m);
      }
}

TEST(Encode, SmallestParametersByHand) {
  const CodeParams p = derive_params(2, 1, 1, 1);
  const CodeMatrices mx = build_code_matrices(p);
  const Element c = mx.phi(0, 0);
  const Block x1{1, 2, 3}, x2{4, 5, 6};
  const auto shares = encode_stripe(std::vector<Block>{x1, x2}, mx, p);
  ASSERT_EQ(shares.size(), 2u);
  EXPECT_EQ(shares[0].primary, std::vector<Block>{x1});
  EXPECT_EQ(shares[0].secondary, std::vector<Block>{gf256::block_axpy(Block(3, 0), c, x2)});
  EXPECT_EQ(shares[1].primary, std::vector<Block>{x2});
  EXPECT_EQ(shares[1].secondary, std::vector<Block>{gf256::block_axpy(Block(3, 0), c, x1)});
}

TEST(Encode, ShareStructure) {
  const CodeParams p = derive_params(6, 2, 4, 2);
  const CodeMatrices mx = build_code_matrices(p);
  std::mt19937_64 rng(1);
  const auto x = random_payload(rng, p, 16);
  const auto layout = split_stripe(x, p);
  const auto shares = encode(layout, mx, p);
  for (DeviceId i = 0; i < p.n; ++i) {
    EXPECT_EQ(shares[i].device_id, i);
    EXPECT_EQ(shares[i].primary.size(), 4u);
    EXPECT_EQ(shares[i].secondary.size(), 5u);
    EXPECT_EQ(shares[i].block_count(), p.alpha);
    EXPECT_EQ(shares[i].primary[0], layout.a[i][0]);
    EXPECT_EQ(shares[i].primary[1], layout.a[i][1]);
    for (std::size_t j = 0; j < 2; ++j) {
      Block expect(16, 0);
      for (std::size_t r = 0; r < 2; ++r) gf256::axpy_inplace(expect, mx.psi(r, i), layout.b[j][r]);
      EXPECT_EQ(shares[i].primary[2 + j], expect);
    }
    for (std::size_t m = 1; m < p.n; ++m)
      EXPECT_EQ(shares[i].slot(m), mat_vec_blocks(mx.phi.transposed(), shares[(i + m) % p.n].primary)[m - 1]);
  }
}

TEST(Encode, AllZeroPayloadGivesAllZeroShares) {
  for (const CodeParams& p : {derive_params(6, 2, 4, 2), derive_params(2, 1, 1, 1), derive_params(7, 3, 5, 2)}) {
    const auto shares = encode_stripe(std::vector<Block>(p.file_blocks, Block(8, 0)), build_code_matrices(p), p);
    for (const auto& s : shares) {
      for (const auto& b : s.primary) EXPECT_EQ(b, Block(8, 0));
      for (const auto& b : s.secondary) EXPECT_EQ(b, Block(8, 0));
    }
  }
}

TEST(Encode, IsLinear) {
  std::mt19937_64 rng(2);
  for (const CodeParams& p : {derive_params(6, 2, 4, 2), derive_params(8, 3, 5, 3)}) {
    const CodeMatrices mx = build_code_matrices(p);
    const auto x = random_payload(rng, p, 12), y = random_payload(rng, p, 12);
    std::vector<Block> xy;
    for (std::size_t i = 0; i < x.size(); ++i) xy.push_back(gf256::block_axpy(x[i], Element(1), y[i]));
    const auto ex = encode_stripe(x, mx, p), ey = encode_stripe(y, mx, p), exy = encode_stripe(xy, mx, p);
    for (DeviceId i = 0; i < p.n; ++i) {
      for (std::size_t r = 0; r < p.d; ++r)
        EXPECT_EQ(exy[i].primary[r], gf256::block_axpy(ex[i].primary[r], Element(1), ey[i].primary[r]));
      for (std::size_t m = 1; m < p.n; ++m)
        EXPECT_EQ(exy[i].slot(m), gf256::block_axpy(ex[i].slot(m), Element(1), ey[i].slot(m)));
    }
  }
}

TEST(Encode, DegenerateWhenDEqualsK) {
  const CodeParams p = derive_params(5, 3, 3, 2);
  const auto x = numbered_payload(p);
  const auto shares = encode_stripe(x, build_code_matrices(p), p);
  for (DeviceId i = 0; i < p.n; ++i)
    for (std::size_t r = 0; r < p.d; ++r) EXPECT_EQ(shares[i].primary[r], x[i * p.k + r]);
}

TEST(Decode, SixDevicesFromEveryPair) {
  const CodeParams p = derive_params(6, 2, 4, 2);
  const CodeMatrices mx = build_code_matrices(p);
  std::mt19937_64 rng(3);
  const auto x = random_payload(rng, p, 32);
  const auto shares = encode_stripe(x, mx, p);
  for (const auto& pair : xmbcr::testing::subsets(6, 2)) {
    const std::vector<DeviceShare> picked{shares[pair[0]], shares[pair[1]]};
    DecodeStats stats;
    EXPECT_EQ(decode(picked, mx, p, &stats), x);
    EXPECT_EQ(stats.step1_recovered, 8u);
    EXPECT_EQ(stats.step2_rebuilt, 8u);  // (n-k)(d-k)
    EXPECT_EQ(stats.step3_recovered, 8u);
  }
}

TEST(Decode, OrderOfSharesDoesNotMatter) {
  const CodeParams p = derive_params(7, 3, 4, 3);
  const CodeMatrices mx = build_code_matrices(p);
  std::mt19937_64 rng(4);
  const auto x = random_payload(rng, p, 5);
  const auto shares = encode_stripe(x, mx, p);
  EXPECT_EQ(decode(std::vector<DeviceShare>{shares[6], shares[0], shares[3]}, mx, p), x);
}

TEST(Decode, Errors) {
  const CodeParams p = derive_params(6, 2, 4, 2);
  const CodeMatrices mx = build_code_matrices(p);
  const auto shares = encode_stripe(std::vector<Block>(16, Block(4, 1)), mx, p);
  EXPECT_ERRC(decode(std::vector<DeviceShare>{shares[0]}, mx, p), Errc::NotEnoughShares);
  EXPECT_ERRC(decode((std::vector<DeviceShare>{shares[2], shares[2]}), mx, p), Errc::DuplicateDevice);
  DeviceShare broken = shares[1];
  broken.secondary.pop_back();
  EXPECT_ERRC(decode((std::vector<DeviceShare>{shares[0], broken}), mx, p), Errc::ShapeError);
}

TEST(Decode, RoundTripAcrossSweep) {
  std::mt19937_64 rng(5);
  for (const CodeParams& p : xmbcr::testing::parameter_sweep()) {
    const CodeMatrices mx = build_code_matrices(p);
    const auto x = random_payload(rng, p, 3);
    const auto shares = encode_stripe(x, mx, p);
    for (const auto& ids : xmbcr::testing::subsets(p.n, p.k)) {
      std::vector<DeviceShare> picked;
      for (DeviceId id : ids) picked.push_back(shares[id]);
      ASSERT_EQ(decode(picked, mx, p), x) << label(p);
    }
  }
}

}  // namespace
