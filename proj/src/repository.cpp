#include "forktree/repository.hpp"

#include <deque>
#include <set>

#include "forktree/codec.hpp"

namespace forktree {

namespace {

std::string network_name(NetworkId id) { return "network " + std::to_string(id); }

}  // namespace

std::string encode_record(const ForkRecord& record) {
  codec::Json j{{"fork_block_no", record.fork_block_no},
                {"fork_id", record.fork_id},
                {"network_id", record.network_id},
                {"parent_network_id", nullptr},
                {"port_number", record.port_number}};
  if (record.parent_network_id) j["parent_network_id"] = *record.parent_network_id;
  return codec::dump(j);
}

ForkRecord decode_record(std::string_view text) {
  try {
    auto j = codec::parse_canonical(text);
    codec::require_keys(
        j, {"fork_block_no", "fork_id", "network_id", "parent_network_id", "port_number"},
        "fork record");
    ForkRecord r;
    r.fork_block_no = codec::get_u64(j, "fork_block_no");
    r.fork_id = codec::get_u64(j, "fork_id");
    r.network_id = codec::get_u64(j, "network_id");
    r.parent_network_id = codec::get_optional_u64(j, "parent_network_id");
    r.port_number = codec::get_port(j, "port_number");
    return r;
  } catch (const ParseError& e) {
    throw MalformedRepository(std::string("undecodable fork record: ") + e.what());
  }
}

std::vector<ForkRecord> decode_records(const ChainInstance& repository_chain) {
  std::vector<ForkRecord> out;
  const auto& blocks = repository_chain.blocks();
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    auto r = decode_record(to_string(blocks[i].header.payload));
    if (r.fork_id != i - 1) {
      throw MalformedRepository("block " + std::to_string(i) + " carries fork id " +
                                std::to_string(r.fork_id));
    }
    out.push_back(r);
  }
  return out;
}

AdjacencyList build_adjacency(const std::vector<ForkRecord>& records) {
  AdjacencyList adj;
  std::optional<NetworkId> root;
  for (const auto& r : records) {
    if (adj.children.contains(r.network_id)) {
      throw MalformedRepository(network_name(r.network_id) + " registered twice");
    }
    if (r.is_root()) {
      if (root) throw MalformedRepository("multiple root records");
      root = r.network_id;
    } else {
      auto parent = adj.children.find(*r.parent_network_id);
      if (parent == adj.children.end()) {
        throw MalformedRepository(network_name(r.network_id) + " names parent " +
                                  std::to_string(*r.parent_network_id) +
                                  " which is not registered before it");
      }
      parent->second.push_back(r.network_id);
    }
    adj.children[r.network_id];
  }
  if (!root) throw MalformedRepository("no root record");
  adj.root = *root;

  // Ordering already rules out cycles; the reachability sweep confirms the
  // result is a single tree.
  std::set<NetworkId> seen;
  std::deque<NetworkId> pending{adj.root};
  while (!pending.empty()) {
    NetworkId id = pending.front();
    pending.pop_front();
    if (!seen.insert(id).second) throw MalformedRepository("cycle through " + network_name(id));
    for (NetworkId child : adj.children.at(id)) pending.push_back(child);
  }
  if (seen.size() != adj.children.size()) {
    throw MalformedRepository("fork graph is not a single rooted tree");
  }
  return adj;
}

Repository::Repository(NetworkId network_id, std::uint16_t port, Difficulty difficulty)
    : chain_(create_chain(network_id, port, difficulty, to_bytes(kRepositoryGenesis))) {}

Repository Repository::from_chain(ChainInstance chain) {
  if (auto v = validate_chain(chain); !v) {
    throw MalformedRepository("repository chain invalid at block " +
                              std::to_string(v.first_bad_index) + " (" +
                              std::string(to_string(v.reason)) + ")");
  }
  auto records = decode_records(chain);
  Repository repo(std::move(chain));
  for (const auto& r : records) {
    if (repo.by_network_.contains(r.network_id)) {
      throw MalformedRepository(network_name(r.network_id) + " registered twice");
    }
    if (r.parent_network_id && !repo.by_network_.contains(*r.parent_network_id)) {
      throw MalformedRepository(network_name(r.network_id) + " has unregistered parent");
    }
    repo.index_record(r);
  }
  build_adjacency(repo.records_);
  return repo;
}

void Repository::index_record(const ForkRecord& record) {
  records_.push_back(record);
  by_network_.emplace(record.network_id, record.fork_id);
  children_.emplace_back();
  if (record.parent_network_id) {
    children_[by_network_.at(*record.parent_network_id)].push_back(record.fork_id);
  }
}

ForkId Repository::add_fork_detail(NetworkId network_id, std::uint16_t port_number,
                                   std::optional<NetworkId> parent_network_id,
                                   std::uint64_t fork_block_no) {
  if (by_network_.contains(network_id)) {
    throw DuplicateRegistration(network_name(network_id) + " is already registered");
  }
  if (parent_network_id) {
    if (!by_network_.contains(*parent_network_id)) {
      throw UnknownParent("parent " + network_name(*parent_network_id) + " is not registered");
    }
  } else if (!records_.empty()) {
    // A second root would make the registry a forest.
    throw DuplicateRegistration("root network already registered");
  }
  ForkRecord record{records_.size(), network_id, port_number, parent_network_id, fork_block_no};
  chain_ = append_payload(chain_, to_bytes(encode_record(record)));
  index_record(record);
  return record.fork_id;
}

ForkId Repository::find_fork_id(NetworkId network_id) const {
  auto it = by_network_.find(network_id);
  return it == by_network_.end() ? kForkNotFound : it->second;
}

const ForkRecord& Repository::get_fork_data(ForkId fork_id) const {
  if (fork_id >= records_.size()) {
    throw NotFoundError("no fork with id " + std::to_string(fork_id));
  }
  return records_[fork_id];
}

std::vector<ForkId> Repository::get_children(ForkId fork_id) const {
  if (fork_id >= records_.size()) {
    throw NotFoundError("no fork with id " + std::to_string(fork_id));
  }
  return children_[fork_id];
}

}  // namespace forktree
