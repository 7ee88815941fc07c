#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "forktree/error.hpp"
#include "forktree/hashcore.hpp"

using namespace forktree;

namespace {

// Expected values below were computed independently with Python's hashlib
// over the same byte layout and frozen here.
constexpr std::string_view kHelloWorld =
    "64ec88ca00b268e5ba1a35678a1b5316d212f4f366b2477232534a8aeca37f3c";
constexpr std::string_view kZeroHeaderHash =
    "d4817aa5497628e7c77e6b606107042bbba3130888c5f47a375e6179be789fbb";
constexpr std::string_view kTxHeaderHash =
    "62bbc227053402fa22a533dc263d82cac8fce5e1651009ba9711f4e4822c39ab";

Digest digest_with_first_byte(std::uint8_t b) {
  Digest d{};
  d[0] = b;
  return d;
}

}  // namespace

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(to_hex(sha256(to_bytes("abc"))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(to_hex(sha256(to_bytes(""))),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(to_hex(sha256(to_bytes("Hello world"))), kHelloWorld);
}

TEST(Hex, RoundTripAndStrictness) {
  Bytes raw{0x00, 0x7f, 0xab, 0xff};
  EXPECT_EQ(to_hex(raw), "007fabff");
  EXPECT_EQ(from_hex("007fabff"), raw);
  EXPECT_THROW(from_hex("ABCD"), ParseError);
  EXPECT_THROW(from_hex("abc"), ParseError);
  EXPECT_THROW(from_hex("zz"), ParseError);
  EXPECT_THROW(digest_from_hex("00"), ParseError);
}

TEST(Difficulty, Range) {
  EXPECT_NO_THROW(Difficulty{255});
  EXPECT_THROW(Difficulty{256}, RangeError);
}

TEST(CanonicalSerialize, AllZeroHeader) {
  Bytes s = canonical_serialize(BlockHeader{});
  ASSERT_EQ(s.size(), 56u);
  EXPECT_TRUE(std::all_of(s.begin(), s.end(), [](auto b) { return b == 0; }));
  EXPECT_EQ(to_hex(hash_block(BlockHeader{})), kZeroHeaderHash);
}

TEST(CanonicalSerialize, HandAssembledLayout) {
  BlockHeader h{1, digest_from_hex(kHelloWorld), to_bytes("tx"), 7};
  Bytes expected = from_hex("0000000000000001");
  auto prev = from_hex(kHelloWorld);
  expected.insert(expected.end(), prev.begin(), prev.end());
  for (auto b : from_hex("0000000000000002")) expected.push_back(b);
  expected.push_back('t');
  expected.push_back('x');
  for (auto b : from_hex("0000000000000007")) expected.push_back(b);

  Bytes s = canonical_serialize(h);
  EXPECT_EQ(s.size(), 58u);
  EXPECT_EQ(s, expected);
  EXPECT_EQ(to_hex(hash_block(h)), kTxHeaderHash);
}

TEST(CanonicalSerialize, NonceAndLengthPrefixAreInjective) {
  BlockHeader a{3, {}, to_bytes("x"), 1};
  BlockHeader b = a;
  b.nonce = 2;
  EXPECT_NE(canonical_serialize(a), canonical_serialize(b));
  EXPECT_EQ(hash_block(a), hash_block(BlockHeader(a)));

  // Moving a byte between payload and nonce must not collide.
  BlockHeader c{0, {}, Bytes{}, 0};
  BlockHeader d{0, {}, Bytes{0}, 0};
  EXPECT_NE(canonical_serialize(c), canonical_serialize(d));
}

TEST(HashBlock, PayloadFlipChangesDigest) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Bytes payload(1 + rng() % 32);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    BlockHeader h{rng() % 100, {}, payload, rng()};
    BlockHeader flipped = h;
    flipped.payload[rng() % payload.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    EXPECT_NE(hash_block(h), hash_block(flipped));
    EXPECT_EQ(sha256(canonical_serialize(flipped)), hash_block(flipped));
  }
}

TEST(HashBlock, AvalancheOverSingleBitFlips) {
  std::mt19937_64 rng(11);
  double total = 0;
  constexpr int kTrials = 1000;
  for (int t = 0; t < kTrials; ++t) {
    Bytes payload(16);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    BlockHeader h{1, {}, payload, 0};
    BlockHeader f = h;
    const auto bit = rng() % (payload.size() * 8);
    f.payload[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    auto a = hash_block(h), b = hash_block(f);
    int differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i) differing += std::popcount<unsigned>(a[i] ^ b[i]);
    total += differing / 256.0;
  }
  EXPECT_GE(total / kTrials, 0.40);
}

TEST(MeetsTarget, Edges) {
  Digest any = sha256(to_bytes("anything"));
  EXPECT_TRUE(meets_target(any, Difficulty{0}));
  EXPECT_TRUE(meets_target(kZeroDigest, Difficulty{255}));
  EXPECT_FALSE(meets_target(digest_with_first_byte(0x80), Difficulty{1}));
  EXPECT_TRUE(meets_target(digest_with_first_byte(0x7f), Difficulty{1}));
  EXPECT_FALSE(meets_target(digest_with_first_byte(0x7f), Difficulty{2}));
  EXPECT_TRUE(meets_target(digest_with_first_byte(0x01), Difficulty{7}));
  EXPECT_FALSE(meets_target(digest_with_first_byte(0x01), Difficulty{8}));
}

TEST(MeetsTarget, MatchesBigEndianComparison) {
  // d leading zero bits <=> H < 2^(256-d); compare on the top 64 bits.
  std::mt19937_64 rng(3);
  for (int t = 0; t < 2000; ++t) {
    Digest d{};
    for (auto& b : d) b = static_cast<std::uint8_t>(rng());
    const int zero_bytes = static_cast<int>(rng() % 4);
    for (int i = 0; i < zero_bytes; ++i) d[i] = 0;
    std::uint64_t top = 0;
    for (int i = 0; i < 8; ++i) top = (top << 8) | d[i];
    for (unsigned bits = 0; bits <= 40; ++bits) {
      const bool expected = bits == 0 || top < (std::uint64_t{1} << (64 - bits));
      ASSERT_EQ(meets_target(d, Difficulty{bits}), expected) << bits;
    }
  }
}

TEST(Mine, ZeroDifficultyTakesFirstNonce) {
  auto m = mine(5, kZeroDigest, to_bytes("whatever"), Difficulty{0});
  EXPECT_EQ(m.header.nonce, 0u);
  EXPECT_EQ(m.hash, hash_block(m.header));
}

TEST(Mine, PinnedGenesisNonces) {
  struct Case {
    unsigned bits;
    std::uint64_t nonce;
    std::string_view hash;
  };
  const Case cases[] = {
      {0, 0, "fae7e12c564f9ae54cc8b68c59521fe333bd9ac2c5da9b71c82818e8a027a724"},
      {4, 10, "07ebfdf2681422709e1c369e835eba16b93c7a2dfc2215e5550b79b110b589f9"},
      {8, 85, "00f0035ae4b501b8339d1e9e9094a594e67499004799934e074a35f5fb885dd1"},
      {12, 12304, "00087404bca1399d20bf799ed8d65dabc41368b68a4671a353570c23d2eba298"},
  };
  for (const auto& c : cases) {
    auto m = mine(0, kZeroDigest, to_bytes("genesis"), Difficulty{c.bits});
    EXPECT_EQ(m.header.nonce, c.nonce) << c.bits;
    EXPECT_EQ(to_hex(m.hash), c.hash) << c.bits;
  }
}

TEST(Mine, SoundMinimalAndDeterministic) {
  std::mt19937_64 rng(5);
  for (unsigned bits : {1u, 3u, 6u, 8u}) {
    for (int t = 0; t < 5; ++t) {
      Bytes payload = to_bytes("payload-" + std::to_string(rng()));
      Digest prev = sha256(payload);
      auto m = mine(t, prev, payload, Difficulty{bits});
      EXPECT_TRUE(meets_target(hash_block(m.header), Difficulty{bits}));
      for (std::uint64_t n = 0; n < m.header.nonce; ++n) {
        ASSERT_FALSE(meets_target(hash_block({static_cast<std::uint64_t>(t), prev, payload, n}),
                                  Difficulty{bits}));
      }
      auto again = mine(t, prev, payload, Difficulty{bits});
      EXPECT_EQ(again.header, m.header);
      EXPECT_EQ(again.hash, m.hash);
    }
  }
}

TEST(Mine, RejectsNonDeskScaleDifficulty) {
  EXPECT_THROW(mine(0, kZeroDigest, to_bytes("x"), Difficulty{33}), RangeError);
}
