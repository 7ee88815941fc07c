#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "forktree/error.hpp"
#include "forktree/hashcore.hpp"

namespace forktree {

struct Block {
  BlockHeader header;
  Digest hash{};  // cached hash_block(header)

  friend bool operator==(const Block&, const Block&) = default;
};

struct ChainMeta {
  NetworkId network_id = 0;
  std::optional<NetworkId> parent_network_id;  // absent for the root chain
  std::uint64_t fork_block_no = 0;             // blocks shared with the parent
  std::uint16_t port = 0;
  Difficulty difficulty;

  friend bool operator==(const ChainMeta&, const ChainMeta&) = default;
};

// One blockchain network. Values are immutable; appending produces a new
// instance.
class ChainInstance {
 public:
  // Assembles a chain without validating it. Loaders and tamper tests use
  // this; callers that need a trusted chain run validate_chain afterwards.
  static ChainInstance from_parts(ChainMeta meta, std::vector<Block> blocks);

  const ChainMeta& meta() const noexcept { return meta_; }
  NetworkId network_id() const noexcept { return meta_.network_id; }
  const std::optional<NetworkId>& parent_network_id() const noexcept {
    return meta_.parent_network_id;
  }
  std::uint64_t fork_block_no() const noexcept { return meta_.fork_block_no; }
  std::uint16_t port() const noexcept { return meta_.port; }
  Difficulty difficulty() const noexcept { return meta_.difficulty; }

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::uint64_t height() const noexcept { return blocks_.size(); }
  const Block& tip() const { return blocks_.back(); }

  friend bool operator==(const ChainInstance&, const ChainInstance&) = default;

 private:
  ChainInstance(ChainMeta meta, std::vector<Block> blocks)
      : meta_(std::move(meta)), blocks_(std::move(blocks)) {}

  ChainMeta meta_;
  std::vector<Block> blocks_;
};

ChainInstance create_chain(NetworkId network_id, std::uint16_t port, Difficulty difficulty,
                           ByteView genesis_payload);

ChainInstance append_payload(const ChainInstance& chain, ByteView payload);

enum class InvalidReason { kBadGenesis, kBrokenLink, kWrongIndex, kBelowDifficulty, kStaleHash };

std::string_view to_string(InvalidReason reason);

struct ValidationResult {
  bool valid = true;
  std::uint64_t first_bad_index = 0;
  InvalidReason reason = InvalidReason::kBadGenesis;

  static ValidationResult ok() { return {}; }
  static ValidationResult invalid(std::uint64_t index, InvalidReason why) {
    return {false, index, why};
  }
  explicit operator bool() const noexcept { return valid; }
};

// Reports the lowest offending index. Blocks below fork_block_no were mined
// under the parent's rules and are exempt from this chain's difficulty; their
// work is checked against the parent when an ecosystem is loaded.
ValidationResult validate_chain(const ChainInstance& chain);

struct LocatedBlock {
  std::uint64_t index = 0;
  Block block;
};

// Lowest-index block whose payload equals `target` byte for byte.
std::optional<LocatedBlock> find_in_chain(const ChainInstance& chain, ByteView target);

}  // namespace forktree
