#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "forktree/chain.hpp"
#include "forktree/repository.hpp"

namespace forktree {

struct BlockHit {
  std::uint64_t index = 0;
  Bytes payload;
  Digest hash{};

  friend bool operator==(const BlockHit&, const BlockHit&) = default;
};

// Read-only access to one network, local or behind a socket.
class ChainView {
 public:
  virtual ~ChainView() = default;
  virtual std::uint64_t height() const = 0;
  virtual Block block(std::uint64_t index) const = 0;
  virtual std::optional<BlockHit> find(ByteView target) const = 0;
};

class NetworkResolver {
 public:
  virtual ~NetworkResolver() = default;
  // Throws UnknownNetwork for ids it has never seen.
  virtual std::shared_ptr<const ChainView> resolve(NetworkId id) const = 0;
};

enum class Strategy { kDfs, kBfs };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

// DFS is preorder, BFS is level order; siblings follow adjacency order.
// Throws UnknownNetwork if `start` is not in `adj`.
std::vector<NetworkId> traversal_order(const AdjacencyList& adj, NetworkId start,
                                       Strategy strategy);

struct SearchMatch {
  NetworkId network_id = 0;
  BlockHit hit;

  friend bool operator==(const SearchMatch&, const SearchMatch&) = default;
};

struct SearchResult {
  std::optional<SearchMatch> match;
  // Networks checked, in order. Ends with the matching network when found;
  // covers every reachable network otherwise.
  std::vector<NetworkId> visited;

  bool found() const noexcept { return match.has_value(); }
  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

// Checks each network in traversal order and stops at the first match.
// A network that cannot be resolved or queried aborts the whole search with
// NetworkUnreachable.
SearchResult search(const NetworkResolver& networks, const AdjacencyList& adj, NetworkId start,
                    ByteView target, Strategy strategy = Strategy::kDfs);

struct ScanHit {
  NetworkId network_id = 0;
  std::uint64_t block_index = 0;

  friend bool operator==(const ScanHit&, const ScanHit&) = default;
};

// Every matching block, fetched block by block rather than through
// ChainView::find, in (traversal order, block index) order from the root.
std::vector<ScanHit> exhaustive_scan(const NetworkResolver& networks, const AdjacencyList& adj,
                                     ByteView target, Strategy strategy = Strategy::kDfs);

}  // namespace forktree
