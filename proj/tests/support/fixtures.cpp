#include "fixtures.hpp"

namespace forktree::testing {

std::vector<NetworkId> Fig4::ids(std::string_view letters) const {
  std::vector<NetworkId> out;
  for (char c : letters) out.push_back(id.at(c));
  return out;
}

ChainInstance make_chain(NetworkId id, std::uint16_t port, Difficulty difficulty,
                         const std::vector<std::string>& payloads, std::string genesis) {
  auto chain = create_chain(id, port, difficulty, to_bytes(genesis));
  for (const auto& p : payloads) chain = append_payload(chain, to_bytes(p));
  return chain;
}

namespace {

ChainInstance mine_own(ChainInstance chain, char letter, int count) {
  for (int k = 1; k <= count; ++k) {
    chain = append_payload(chain, to_bytes(std::string("tx-") + letter + std::to_string(k)));
  }
  return chain;
}

}  // namespace

Fig4 build_fig4(Difficulty difficulty) {
  Fig4 f;
  f.eco = std::make_unique<Ecosystem>(Repository(kRepositoryId, 30300, difficulty));
  auto& repo = f.eco->repository();
  std::map<char, ChainInstance> chains;

  auto add = [&](char letter, ChainInstance chain) {
    const NetworkId id = chain.network_id();
    f.id[letter] = id;
    f.name[id] = letter;
    repo.add_fork_detail(id, chain.port(), chain.parent_network_id(), chain.fork_block_no());
    chains.emplace(letter, chain);
    f.eco->register_network(std::move(chain));
  };
  auto fork_from = [&](char parent, char letter, std::uint64_t at, int own) {
    const NetworkId id = 101 + static_cast<NetworkId>(letter - 'A');
    auto child = hard_fork(chains.at(parent), at, id, static_cast<std::uint16_t>(8545 + (letter - 'A')),
                           difficulty);
    add(letter, mine_own(std::move(child), letter, own));
  };

  add('A', mine_own(create_chain(101, 8545, difficulty, to_bytes("genesis-A")), 'A', 3));
  fork_from('A', 'B', 2, 2);
  fork_from('B', 'C', 3, 1);
  fork_from('C', 'D', 4, 1);
  fork_from('D', 'E', 5, 1);
  fork_from('B', 'F', 4, 1);
  fork_from('A', 'G', 3, 2);
  fork_from('G', 'H', 4, 1);
  fork_from('H', 'I', 5, 1);
  return f;
}

RandomEcosystem build_random_ecosystem(std::mt19937_64& rng, std::size_t max_networks,
                                       std::size_t max_blocks, Difficulty difficulty) {
  RandomEcosystem out;
  for (int i = 0; i < 8; ++i) out.payload_pool.push_back("p" + std::to_string(i));

  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto payload = [&] { return out.payload_pool[pick(0, out.payload_pool.size() - 1)]; };

  out.eco = std::make_unique<Ecosystem>(Repository(kRepositoryId, 30300, difficulty));
  std::vector<ChainInstance> chains;
  const std::size_t count = pick(1, max_networks);

  for (std::size_t n = 0; n < count; ++n) {
    const NetworkId id = 1 + n;
    const auto port = static_cast<std::uint16_t>(9000 + n);
    ChainInstance chain = [&] {
      if (n == 0) return create_chain(id, port, difficulty, to_bytes(payload()));
      const auto& parent = chains[pick(0, chains.size() - 1)];
      return hard_fork(parent, pick(1, parent.height()), id, port, difficulty);
    }();
    const std::size_t target_height = pick(chain.height(), max_blocks);
    while (chain.height() < target_height) chain = append_payload(chain, to_bytes(payload()));

    out.eco->repository().add_fork_detail(id, port, chain.parent_network_id(),
                                          chain.fork_block_no());
    chains.push_back(chain);
    out.eco->register_network(std::move(chain));
  }
  return out;
}

}  // namespace forktree::testing
