#pragma once

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "forktree/fork.hpp"
#include "forktree/netharness.hpp"

namespace forktree::testing {

// The nine-network ecosystem A..I of the reference fork tree:
// A -> B, G; B -> C, F; C -> D; D -> E; G -> H; H -> I.
// Every network X carries payloads "tx-X1", "tx-X2", ... of its own.
struct Fig4 {
  std::unique_ptr<Ecosystem> eco;
  std::map<char, NetworkId> id;
  std::map<NetworkId, char> name;

  std::vector<NetworkId> ids(std::string_view letters) const;
};

inline constexpr NetworkId kRepositoryId = 1000;

Fig4 build_fig4(Difficulty difficulty = Difficulty{8});

// Root chain with genesis payload plus `payloads` appended in order.
ChainInstance make_chain(NetworkId id, std::uint16_t port, Difficulty difficulty,
                         const std::vector<std::string>& payloads,
                         std::string genesis = "genesis");

struct RandomEcosystem {
  std::unique_ptr<Ecosystem> eco;
  std::vector<std::string> payload_pool;
};

// Up to `max_networks` networks of at most `max_blocks` blocks each, random
// fork points, payloads drawn from a small pool so duplicates within and
// across networks are common.
RandomEcosystem build_random_ecosystem(std::mt19937_64& rng, std::size_t max_networks,
                                       std::size_t max_blocks, Difficulty difficulty);

}  // namespace forktree::testing
