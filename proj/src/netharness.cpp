#include "forktree/netharness.hpp"

#include <mutex>

namespace forktree {

Block LocalChainView::block(std::uint64_t index) const {
  if (index >= chain_->height()) {
    throw RangeError("block " + std::to_string(index) + " beyond height " +
                     std::to_string(chain_->height()));
  }
  return chain_->blocks()[index];
}

std::optional<BlockHit> LocalChainView::find(ByteView target) const {
  auto located = find_in_chain(*chain_, target);
  if (!located) return std::nullopt;
  return BlockHit{located->index, located->block.header.payload, located->block.hash};
}

codec::Json RemoteChainView::round_trip(const codec::Json& request,
                                        std::string_view expected_type) const {
  codec::Json response;
  try {
    response = wire::query(port_, request, host_);
  } catch (const ConnectionError& e) {
    throw NetworkUnreachable(id_, e.what());
  }
  const auto type = response.value("type", std::string{});
  if (type == "ERR") {
    throw ProtocolError(response.value("code", std::string{"internal"}),
                        response.value("message", std::string{}));
  }
  if (type != expected_type) {
    throw ProtocolError("internal", "expected " + std::string(expected_type) + ", got " + type);
  }
  return response;
}

std::uint64_t RemoteChainView::height() const {
  return codec::get_u64(round_trip(wire::height_request(), "HEIGHT"), "height");
}

Block RemoteChainView::block(std::uint64_t index) const {
  return codec::block_from_json(round_trip(wire::get_block_request(index), "BLOCK").at("block"));
}

std::optional<BlockHit> RemoteChainView::find(ByteView target) const {
  codec::Json response;
  try {
    response = wire::query(port_, wire::find_request(target), host_);
  } catch (const ConnectionError& e) {
    throw NetworkUnreachable(id_, e.what());
  }
  const auto type = response.value("type", std::string{});
  if (type == "ABSENT") return std::nullopt;
  if (type != "FOUND") {
    throw ProtocolError(response.value("code", std::string{"internal"}),
                        response.value("message", "unexpected reply " + type));
  }
  return BlockHit{codec::get_u64(response, "index"),
                  from_hex(codec::get_string(response, "payload")),
                  digest_from_hex(codec::get_string(response, "hash"))};
}

Ecosystem::Ecosystem(Repository repository) : repository_(std::move(repository)) {}

void Ecosystem::check_free(NetworkId id, std::uint16_t port) const {
  if (id == repository_id() || networks_.contains(id)) {
    throw RegistrationError("network id " + std::to_string(id) + " already registered");
  }
  for (const auto& [other, entry] : networks_) {
    auto used = std::visit(
        [](const auto& e) -> std::uint16_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(e)>, Remote>) {
            return e.port;
          } else {
            return e->port();
          }
        },
        entry);
    if (used == port) {
      throw RegistrationError("port " + std::to_string(port) + " already used by network " +
                              std::to_string(other));
    }
  }
}

void Ecosystem::register_network(ChainInstance chain) {
  std::unique_lock lock(mutex_);
  check_free(chain.network_id(), chain.port());
  const NetworkId id = chain.network_id();
  networks_.emplace(id, std::make_shared<const ChainInstance>(std::move(chain)));
}

void Ecosystem::register_remote(NetworkId id, std::uint16_t port, std::string host) {
  std::unique_lock lock(mutex_);
  check_free(id, port);
  networks_.emplace(id, Remote{port, std::move(host)});
}

void Ecosystem::replace_chain(ChainInstance chain) {
  std::unique_lock lock(mutex_);
  auto it = networks_.find(chain.network_id());
  if (it == networks_.end()) throw UnknownNetwork(chain.network_id());
  auto* local = std::get_if<std::shared_ptr<const ChainInstance>>(&it->second);
  if (local == nullptr) {
    throw RegistrationError("network " + std::to_string(chain.network_id()) +
                            " is remote and cannot be replaced");
  }
  if ((*local)->port() != chain.port()) {
    throw RegistrationError("replacement changes the port of network " +
                            std::to_string(chain.network_id()));
  }
  *local = std::make_shared<const ChainInstance>(std::move(chain));
}

std::shared_ptr<const ChainView> Ecosystem::resolve(NetworkId id) const {
  std::shared_lock lock(mutex_);
  if (id == repository_id()) {
    return std::make_shared<LocalChainView>(
        std::make_shared<const ChainInstance>(repository_.chain()));
  }
  auto it = networks_.find(id);
  if (it == networks_.end()) throw UnknownNetwork(id);
  if (auto* local = std::get_if<std::shared_ptr<const ChainInstance>>(&it->second)) {
    return std::make_shared<LocalChainView>(*local);
  }
  const auto& remote = std::get<Remote>(it->second);
  return std::make_shared<RemoteChainView>(id, remote.port, remote.host);
}

std::shared_ptr<const ChainInstance> Ecosystem::local_chain(NetworkId id) const {
  std::shared_lock lock(mutex_);
  auto it = networks_.find(id);
  if (it == networks_.end()) return nullptr;
  if (auto* local = std::get_if<std::shared_ptr<const ChainInstance>>(&it->second)) return *local;
  return nullptr;
}

bool Ecosystem::contains(NetworkId id) const {
  std::shared_lock lock(mutex_);
  return id == repository_id() || networks_.contains(id);
}

std::uint16_t Ecosystem::port_of(NetworkId id) const {
  std::shared_lock lock(mutex_);
  if (id == repository_id()) return repository_.chain().port();
  auto it = networks_.find(id);
  if (it == networks_.end()) throw UnknownNetwork(id);
  if (auto* local = std::get_if<std::shared_ptr<const ChainInstance>>(&it->second)) {
    return (*local)->port();
  }
  return std::get<Remote>(it->second).port;
}

std::vector<NetworkId> Ecosystem::network_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<NetworkId> ids;
  for (const auto& [id, entry] : networks_) ids.push_back(id);
  return ids;
}

std::size_t Ecosystem::size() const {
  std::shared_lock lock(mutex_);
  return networks_.size() + 1;
}

ServedEcosystem serve_ecosystem(const Ecosystem& local, bool use_recorded_ports) {
  ServedEcosystem served;
  served.remote = std::make_unique<Ecosystem>(local.repository());
  for (NetworkId id : local.network_ids()) {
    auto chain = local.local_chain(id);
    if (!chain) throw RegistrationError("network " + std::to_string(id) + " is not in-process");
    const std::uint16_t port = use_recorded_ports ? chain->port() : 0;
    served.servers.push_back(std::make_unique<ChainServer>(chain, port));
    served.remote->register_remote(id, served.servers.back()->port());
  }
  return served;
}

}  // namespace forktree
