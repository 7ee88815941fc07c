#include <gtest/gtest.h>

#include <random>

#include "forktree/fork.hpp"
#include "support/fixtures.hpp"

using namespace forktree;
using forktree::testing::make_chain;

TEST(HardFork, FullHeightCopiesEverything) {
  auto a = make_chain(1, 8545, Difficulty{4}, {"tx-A1", "tx-A2", "tx-A3"});
  auto b = hard_fork(a, a.height(), 2, 8546, Difficulty{4});
  EXPECT_EQ(b.blocks(), a.blocks());
  EXPECT_EQ(b.network_id(), 2u);
  EXPECT_EQ(b.parent_network_id(), std::optional<NetworkId>(1));
  EXPECT_EQ(b.fork_block_no(), a.height());
  EXPECT_EQ(b.port(), 8546);
  EXPECT_TRUE(validate_chain(b));
}

TEST(HardFork, PrefixThenIndependentGrowth) {
  auto a = make_chain(1, 8545, Difficulty{4}, {"tx-A1", "tx-A2", "tx-A3"});
  const auto a_before = a;
  auto b = hard_fork(a, 2, 2, 8546, Difficulty{4});
  ASSERT_EQ(b.height(), 2u);
  EXPECT_EQ(b.blocks()[0], a.blocks()[0]);
  EXPECT_EQ(b.blocks()[1], a.blocks()[1]);
  b = append_payload(b, to_bytes("tx-B1"));
  EXPECT_EQ(a, a_before);
  EXPECT_EQ(b.blocks()[2].header.previous_hash, a.blocks()[1].hash);
  EXPECT_NE(b.blocks()[2].hash, a.blocks()[2].hash);
  EXPECT_TRUE(validate_chain(a));
  EXPECT_TRUE(validate_chain(b));
}

TEST(HardFork, RootForkedTwice) {
  auto a = make_chain(1, 8545, Difficulty{4}, {"tx-A1", "tx-A2", "tx-A3"});
  const auto a_before = a;
  auto b = hard_fork(a, 2, 2, 8546, Difficulty{4});
  auto g = hard_fork(a, 3, 7, 8551, Difficulty{4});
  EXPECT_EQ(b.parent_network_id(), a.network_id());
  EXPECT_EQ(g.parent_network_id(), a.network_id());
  EXPECT_EQ(a, a_before);
}

TEST(HardFork, NewDifficultyGovernsOnlyNewBlocks) {
  auto a = make_chain(1, 8545, Difficulty{0}, {"tx-A1", "tx-A2"});
  auto b = hard_fork(a, 3, 2, 8546, Difficulty{10});
  EXPECT_TRUE(validate_chain(b));  // prefix mined at 0 bits stays acceptable
  b = append_payload(b, to_bytes("tx-B1"));
  EXPECT_TRUE(meets_target(b.tip().hash, Difficulty{10}));
  EXPECT_TRUE(validate_chain(b));
  EXPECT_EQ(b.blocks()[0].hash, a.blocks()[0].hash);
}

TEST(HardFork, Errors) {
  auto a = make_chain(1, 8545, Difficulty{0}, {"x"});
  EXPECT_THROW(hard_fork(a, 0, 2, 1, Difficulty{0}), RangeError);
  EXPECT_THROW(hard_fork(a, 3, 2, 1, Difficulty{0}), RangeError);
  EXPECT_THROW(hard_fork(a, 1, 1, 1, Difficulty{0}), DuplicateRegistration);
}

TEST(HardFork, TipsStaySeparatedAfterDivergence) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto parent = make_chain(1, 1, Difficulty{0}, {"s1", "s2"});
    auto child = hard_fork(parent, 1 + rng() % parent.height(), 2, 2, Difficulty{0});
    child = append_payload(child, to_bytes("diverge-" + std::to_string(trial)));
    for (int step = 0; step < 6; ++step) {
      const auto payload = to_bytes("p" + std::to_string(rng() % 3));
      if (rng() % 2) {
        parent = append_payload(parent, payload);
      } else {
        child = append_payload(child, payload);
      }
      ASSERT_NE(parent.tip().hash, child.tip().hash);
    }
  }
}
