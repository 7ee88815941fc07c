#include "forktree/traverse.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace forktree {

namespace {

template <typename Fn>
auto on_network(NetworkId id, Fn&& fn) {
  try {
    return fn();
  } catch (const NetworkUnreachable&) {
    throw;
  } catch (const Error& e) {
    throw NetworkUnreachable(id, e.what());
  }
}

}  // namespace

std::string_view to_string(Strategy s) { return s == Strategy::kDfs ? "dfs" : "bfs"; }

Strategy parse_strategy(std::string_view name) {
  if (name == "dfs") return Strategy::kDfs;
  if (name == "bfs") return Strategy::kBfs;
  throw RangeError("unknown strategy '" + std::string(name) + "'");
}

std::vector<NetworkId> traversal_order(const AdjacencyList& adj, NetworkId start,
                                       Strategy strategy) {
  if (!adj.contains(start)) throw UnknownNetwork(start);
  std::vector<NetworkId> order;
  order.reserve(adj.children.size());

  if (strategy == Strategy::kDfs) {
    std::function<void(NetworkId)> visit = [&](NetworkId id) {
      order.push_back(id);
      for (NetworkId child : adj.children.at(id)) visit(child);
    };
    visit(start);
  } else {
    std::deque<NetworkId> queue{start};
    while (!queue.empty()) {
      NetworkId id = queue.front();
      queue.pop_front();
      order.push_back(id);
      const auto& kids = adj.children.at(id);
      queue.insert(queue.end(), kids.begin(), kids.end());
    }
  }
  return order;
}

SearchResult search(const NetworkResolver& networks, const AdjacencyList& adj, NetworkId start,
                    ByteView target, Strategy strategy) {
  SearchResult result;
  for (NetworkId id : traversal_order(adj, start, strategy)) {
    result.visited.push_back(id);
    auto hit = on_network(id, [&] { return networks.resolve(id)->find(target); });
    if (hit) {
      result.match = SearchMatch{id, std::move(*hit)};
      break;
    }
  }
  return result;
}

std::vector<ScanHit> exhaustive_scan(const NetworkResolver& networks, const AdjacencyList& adj,
                                     ByteView target, Strategy strategy) {
  std::vector<ScanHit> hits;
  for (NetworkId id : traversal_order(adj, adj.root, strategy)) {
    on_network(id, [&] {
      auto view = networks.resolve(id);
      const auto height = view->height();
      for (std::uint64_t i = 0; i < height; ++i) {
        if (std::ranges::equal(view->block(i).header.payload, target)) hits.push_back({id, i});
      }
    });
  }
  return hits;
}

}  // namespace forktree
