#include "forktree/fork.hpp"

#include <string>

namespace forktree {

ChainInstance hard_fork(const ChainInstance& parent, std::uint64_t fork_block_no,
                        NetworkId new_network_id, std::uint16_t new_port,
                        Difficulty new_difficulty) {
  if (fork_block_no < 1 || fork_block_no > parent.height()) {
    throw RangeError("fork block " + std::to_string(fork_block_no) + " outside [1, " +
                     std::to_string(parent.height()) + "]");
  }
  if (new_network_id == parent.network_id()) {
    throw DuplicateRegistration("fork reuses parent network id " +
                                std::to_string(new_network_id));
  }
  ChainMeta meta{new_network_id, parent.network_id(), fork_block_no, new_port, new_difficulty};
  std::vector<Block> prefix(parent.blocks().begin(),
                            parent.blocks().begin() + static_cast<std::ptrdiff_t>(fork_block_no));
  return ChainInstance::from_parts(std::move(meta), std::move(prefix));
}

}  // namespace forktree
