#pragma once

#include "forktree/chain.hpp"

namespace forktree {

// Clones parent.blocks()[0, fork_block_no) into a new network. The new
// difficulty only governs blocks appended after the fork. Registering the
// event in the repository is a separate step (Repository::add_fork_detail).
//
// Throws RangeError unless 1 <= fork_block_no <= parent.height(), and
// DuplicateRegistration if new_network_id equals the parent's id.
ChainInstance hard_fork(const ChainInstance& parent, std::uint64_t fork_block_no,
                        NetworkId new_network_id, std::uint16_t new_port,
                        Difficulty new_difficulty);

}  // namespace forktree
