#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forktree {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

Bytes to_bytes(std::string_view s);
std::string to_string(ByteView bytes);

// Lowercase hex, two characters per byte.
std::string to_hex(ByteView bytes);
inline std::string to_hex(const Digest& d) { return to_hex(ByteView{d}); }

// Strict: lowercase only, even length. Throws ParseError otherwise.
Bytes from_hex(std::string_view hex);
Digest digest_from_hex(std::string_view hex);

// Required number of leading zero bits in a block hash.
class Difficulty {
 public:
  static constexpr unsigned kMaxBits = 255;
  // Upper bound accepted by mine(); anything above is not desk-scale.
  static constexpr unsigned kMaxMiningBits = 32;

  constexpr Difficulty() = default;
  explicit Difficulty(unsigned leading_zero_bits);

  constexpr unsigned bits() const noexcept { return bits_; }
  friend constexpr bool operator==(Difficulty, Difficulty) = default;

 private:
  unsigned bits_ = 0;
};

struct BlockHeader {
  std::uint64_t index = 0;
  Digest previous_hash{};
  Bytes payload;
  std::uint64_t nonce = 0;

  friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

// index (8, BE) | previous_hash (32) | payload length (8, BE) | payload | nonce (8, BE)
Bytes canonical_serialize(const BlockHeader& header);

Digest sha256(ByteView data);
Digest hash_block(const BlockHeader& header);

bool meets_target(const Digest& digest, Difficulty difficulty) noexcept;

struct MinedHeader {
  BlockHeader header;
  Digest hash;
};

// Sequential nonce search from zero; returns the smallest nonce whose hash
// meets `difficulty`. Throws RangeError above kMaxMiningBits and MiningError
// if the nonce space is exhausted.
MinedHeader mine(std::uint64_t index, const Digest& previous_hash, ByteView payload,
                 Difficulty difficulty);

}  // namespace forktree
