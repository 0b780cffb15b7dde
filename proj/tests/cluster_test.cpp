#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "xmbcr/cluster.hpp"

namespace {

using namespace xmbcr;

class ClusterTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(17);
    payload = xmbcr::testing::random_payload(rng, params, 8);
    golden = encode_stripe(payload, matrices, params);
  }

  Cluster fresh() const { return Cluster::create(golden, params); }

  const CodeParams params = derive_params(6, 2, 4, 2);
  const CodeMatrices matrices = build_code_matrices(params);
  std::vector<Block> payload;
  std::vector<DeviceShare> golden;
};

TEST_F(ClusterTest, NewClusterIsAliveWithEmptyLedger) {
  const Cluster c = fresh();
  EXPECT_EQ(c.alive_count(), 6u);
  EXPECT_TRUE(c.ledger().empty());
  EXPECT_TRUE(c.ledger_summary().empty());
}

TEST_F(ClusterTest, RejectsBadShapes) {
  auto five = golden;
  five.pop_back();
  EXPECT_ERRC(Cluster::create(five, params), Errc::ShapeError);

  auto short_share = golden;
  short_share[3].primary.pop_back();
  EXPECT_ERRC(Cluster::create(short_share, params), Errc::ShapeError);

  auto swapped = golden;
  std::swap(swapped[0], swapped[1]);
  EXPECT_ERRC(Cluster::create(swapped, params), Errc::ShapeError);

  auto ragged = golden;
  ragged[2].secondary[0].push_back(0);
  EXPECT_ERRC(Cluster::create(ragged, params), Errc::ShapeError);
}

TEST_F(ClusterTest, FailInjection) {
  Cluster c = fresh();
  c.fail({0, 1});
  EXPECT_EQ(c.alive_count(), 4u);
  EXPECT_EQ(c.state(0), DeviceState::Failed);

  EXPECT_ERRC(c.fail({0}), Errc::AlreadyFailed);
  EXPECT_ERRC(c.fail({7}), Errc::UnknownDevice);
  // A rejected call changes nothing.
  EXPECT_ERRC(c.fail({2, 0}), Errc::AlreadyFailed);
  EXPECT_EQ(c.state(2), DeviceState::Alive);
}

TEST_F(ClusterTest, FailedDataCannotBeRead) {
  Cluster c = fresh();
  c.fail({4});
  EXPECT_ERRC(c.fetch_block(4, 0, PrimaryIndex{0}, Phase::Phase1), Errc::DeviceFailed);
  EXPECT_ERRC(c.fetch_block(4, 0, SecondarySlot{1}, Phase::Phase1), Errc::DeviceFailed);
  EXPECT_ERRC(c.fetch_block(4, 0, Contribution{1}, Phase::Phase2), Errc::DeviceFailed);
  EXPECT_ERRC(c.inspect_share(4), Errc::DeviceFailed);
  EXPECT_TRUE(c.ledger().empty());
}

TEST_F(ClusterTest, FetchStoredBlocksIsMetered) {
  Cluster c = fresh();
  EXPECT_EQ(c.fetch_block(2, 0, SecondarySlot{3}, Phase::Phase1), golden[2].slot(3));
  EXPECT_EQ(c.ledger().size(), 1u);
  EXPECT_EQ(c.fetch_block(5, 1, PrimaryIndex{2}, Phase::Phase1), golden[5].primary[2]);
  EXPECT_EQ(c.ledger().size(), 2u);
  EXPECT_EQ(c.ledger().records()[0], (TransferRecord{2, 0, 1, Phase::Phase1}));

  EXPECT_ERRC(c.fetch_block(2, 0, SecondarySlot{0}, Phase::Phase1), Errc::BadSlot);
  EXPECT_ERRC(c.fetch_block(2, 0, SecondarySlot{6}, Phase::Phase1), Errc::BadSlot);
  EXPECT_ERRC(c.fetch_block(2, 0, PrimaryIndex{4}, Phase::Phase1), Errc::BadSlot);
  EXPECT_ERRC(c.fetch_block(2, 9, PrimaryIndex{0}, Phase::Phase1), Errc::UnknownDevice);
  EXPECT_EQ(c.ledger().size(), 2u);
}

TEST_F(ClusterTest, ContributionIsComputedFromSenderPrimary) {
  Cluster c = fresh();
  for (std::size_t m = 1; m < 6; ++m) {
    const Block got = c.fetch_block(3, kClient, Contribution{m}, Phase::Phase2);
    EXPECT_EQ(got, mat_vec_blocks(matrices.phi.transposed(), golden[3].primary)[m - 1]);
  }
  EXPECT_EQ(c.ledger().size(), 5u);
}

TEST_F(ClusterTest, RecoveringDeviceServesOnlyContributions) {
  Cluster c = fresh();
  c.fail({1});
  c.begin_recovery(1, golden[1].primary);
  EXPECT_EQ(c.fetch_block(1, 0, Contribution{1}, Phase::Phase2), golden[0].slot(1));
  EXPECT_ERRC(c.fetch_block(1, 0, PrimaryIndex{0}, Phase::Phase2), Errc::DeviceFailed);
  c.install(golden[1]);
  EXPECT_EQ(c.state(1), DeviceState::Alive);
}

TEST_F(ClusterTest, LedgerSummaryAggregates) {
  Cluster c = fresh();
  c.fetch_block(2, 0, SecondarySlot{4}, Phase::Phase1);
  c.fetch_block(2, 0, Contribution{2}, Phase::Phase2);
  c.fetch_block(2, 0, SecondarySlot{1}, Phase::Phase1);
  c.fetch_block(3, 0, SecondarySlot{3}, Phase::Phase1);
  const auto summary = c.ledger_summary();
  EXPECT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary.at({2, 0, Phase::Phase1}), 2u);
  EXPECT_EQ(summary.at({2, 0, Phase::Phase2}), 1u);
  EXPECT_EQ(summary.at({3, 0, Phase::Phase1}), 1u);
  EXPECT_EQ(c.ledger().inbound(0), 4u);
  EXPECT_EQ(c.ledger().between(2, 0), 3u);
}

TEST_F(ClusterTest, DecodeThroughClusterReadsWholeShares) {
  Cluster c = fresh();
  const std::vector<DeviceId> ids{1, 4};
  EXPECT_EQ(decode_from_cluster(c, ids), payload);
  EXPECT_EQ(c.ledger().inbound(kClient, Phase::Decode), params.k * params.alpha);
}

TEST(TransferLedger, RejectsEmptyTransfers) {
  TransferLedger ledger;
  EXPECT_ERRC(ledger.append({0, 1, 0, Phase::Phase1}), Errc::ShapeError);
}

}  // namespace
