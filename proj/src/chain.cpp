#include "forktree/chain.hpp"

#include <algorithm>

namespace forktree {

namespace {

Block mine_block(std::uint64_t index, const Digest& previous, ByteView payload,
                 Difficulty difficulty) {
  auto mined = mine(index, previous, payload, difficulty);
  return Block{std::move(mined.header), mined.hash};
}

}  // namespace

ChainInstance ChainInstance::from_parts(ChainMeta meta, std::vector<Block> blocks) {
  return ChainInstance(std::move(meta), std::move(blocks));
}

ChainInstance create_chain(NetworkId network_id, std::uint16_t port, Difficulty difficulty,
                           ByteView genesis_payload) {
  ChainMeta meta{network_id, std::nullopt, 0, port, difficulty};
  std::vector<Block> blocks;
  blocks.push_back(mine_block(0, kZeroDigest, genesis_payload, difficulty));
  return ChainInstance::from_parts(std::move(meta), std::move(blocks));
}

ChainInstance append_payload(const ChainInstance& chain, ByteView payload) {
  if (chain.blocks().empty()) throw RangeError("cannot append to a chain without genesis");
  std::vector<Block> blocks = chain.blocks();
  blocks.push_back(mine_block(chain.height(), chain.tip().hash, payload, chain.difficulty()));
  return ChainInstance::from_parts(chain.meta(), std::move(blocks));
}

std::string_view to_string(InvalidReason reason) {
  switch (reason) {
    case InvalidReason::kBadGenesis: return "bad-genesis";
    case InvalidReason::kBrokenLink: return "broken-link";
    case InvalidReason::kWrongIndex: return "wrong-index";
    case InvalidReason::kBelowDifficulty: return "below-difficulty";
    case InvalidReason::kStaleHash: return "stale-hash";
  }
  return "unknown";
}

ValidationResult validate_chain(const ChainInstance& chain) {
  const auto& blocks = chain.blocks();
  if (blocks.empty()) return ValidationResult::invalid(0, InvalidReason::kBadGenesis);

  for (std::uint64_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (i == 0) {
      if (b.header.index != 0 || b.header.previous_hash != kZeroDigest) {
        return ValidationResult::invalid(0, InvalidReason::kBadGenesis);
      }
    } else {
      if (b.header.index != i) return ValidationResult::invalid(i, InvalidReason::kWrongIndex);
      if (b.header.previous_hash != blocks[i - 1].hash) {
        return ValidationResult::invalid(i, InvalidReason::kBrokenLink);
      }
    }
    if (hash_block(b.header) != b.hash) {
      return ValidationResult::invalid(i, InvalidReason::kStaleHash);
    }
    if (i >= chain.fork_block_no() && !meets_target(b.hash, chain.difficulty())) {
      return ValidationResult::invalid(i, InvalidReason::kBelowDifficulty);
    }
  }
  return ValidationResult::ok();
}

std::optional<LocatedBlock> find_in_chain(const ChainInstance& chain, ByteView target) {
  const auto& blocks = chain.blocks();
  auto it = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) {
    return std::ranges::equal(b.header.payload, target);
  });
  if (it == blocks.end()) return std::nullopt;
  return LocatedBlock{static_cast<std::uint64_t>(it - blocks.begin()), *it};
}

}  // namespace forktree
