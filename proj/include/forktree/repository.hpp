#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "forktree/chain.hpp"

namespace forktree {

// Returned by find_fork_id for unregistered networks; never a real fork id.
inline constexpr ForkId kForkNotFound = std::numeric_limits<ForkId>::max();

struct ForkRecord {
  ForkId fork_id = 0;
  NetworkId network_id = 0;
  std::uint16_t port_number = 0;
  std::optional<NetworkId> parent_network_id;  // nullopt marks the root
  std::uint64_t fork_block_no = 0;

  bool is_root() const noexcept { return !parent_network_id.has_value(); }
  friend bool operator==(const ForkRecord&, const ForkRecord&) = default;
};

// Canonical JSON with sorted keys; the root's parent is encoded as null.
std::string encode_record(const ForkRecord& record);
ForkRecord decode_record(std::string_view text);

// Decodes every record straight from the chain's block payloads, without
// consulting any index. Throws MalformedRepository.
std::vector<ForkRecord> decode_records(const ChainInstance& repository_chain);

struct AdjacencyList {
  NetworkId root = 0;
  // Children in registration order; every known network has an entry.
  std::map<NetworkId, std::vector<NetworkId>> children;

  bool contains(NetworkId id) const { return children.contains(id); }
  friend bool operator==(const AdjacencyList&, const AdjacencyList&) = default;
};

// Throws MalformedRepository on zero or multiple roots, duplicate networks,
// parents that are unknown or registered later, and cycles.
AdjacencyList build_adjacency(const std::vector<ForkRecord>& records);

inline constexpr unsigned kDefaultRepositoryDifficulty = 8;
inline constexpr std::string_view kRepositoryGenesis = "forktree repository";

// The repository blockchain: one fork-event record per block after genesis,
// with the registry queries answered from an in-memory index that always
// mirrors the chain.
//
// add_fork_detail needs exclusive access; queries are const and may run
// concurrently between writes.
class Repository {
 public:
  Repository(NetworkId network_id, std::uint16_t port,
             Difficulty difficulty = Difficulty{kDefaultRepositoryDifficulty});

  // Rebuilds the index from an existing chain. The chain must validate and
  // every payload must decode to the record with the matching fork id.
  static Repository from_chain(ChainInstance chain);

  ForkId add_fork_detail(NetworkId network_id, std::uint16_t port_number,
                         std::optional<NetworkId> parent_network_id,
                         std::uint64_t fork_block_no);

  ForkId find_fork_id(NetworkId network_id) const;
  const ForkRecord& get_fork_data(ForkId fork_id) const;
  std::vector<ForkId> get_children(ForkId fork_id) const;
  const std::vector<ForkRecord>& get_all_fork_details() const noexcept { return records_; }

  AdjacencyList adjacency() const { return build_adjacency(records_); }
  const ChainInstance& chain() const noexcept { return chain_; }
  std::size_t size() const noexcept { return records_.size(); }

 private:
  explicit Repository(ChainInstance chain) : chain_(std::move(chain)) {}
  void index_record(const ForkRecord& record);

  ChainInstance chain_;
  std::vector<ForkRecord> records_;
  std::unordered_map<NetworkId, ForkId> by_network_;
  std::vector<std::vector<ForkId>> children_;
};

}  // namespace forktree
