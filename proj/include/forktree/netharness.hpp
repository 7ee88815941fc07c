#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "forktree/codec.hpp"
#include "forktree/repository.hpp"
#include "forktree/traverse.hpp"

namespace forktree {

inline constexpr std::string_view kLoopback = "127.0.0.1";

class LocalChainView final : public ChainView {
 public:
  explicit LocalChainView(std::shared_ptr<const ChainInstance> chain) : chain_(std::move(chain)) {}

  std::uint64_t height() const override { return chain_->height(); }
  Block block(std::uint64_t index) const override;
  std::optional<BlockHit> find(ByteView target) const override;

 private:
  std::shared_ptr<const ChainInstance> chain_;
};

// Every call is one request/response round trip over the wire protocol.
// Transport failures surface as NetworkUnreachable naming this network.
class RemoteChainView final : public ChainView {
 public:
  RemoteChainView(NetworkId id, std::uint16_t port, std::string host = std::string(kLoopback))
      : id_(id), port_(port), host_(std::move(host)) {}

  std::uint64_t height() const override;
  Block block(std::uint64_t index) const override;
  std::optional<BlockHit> find(ByteView target) const override;

 private:
  codec::Json round_trip(const codec::Json& request, std::string_view expected_type) const;

  NetworkId id_;
  std::uint16_t port_;
  std::string host_;
};

// Registry of every network in one ecosystem, keyed by network id, plus the
// repository that records how they fork from one another. Members are held
// either in-process or as socket addresses; resolve() hides the difference.
//
// resolve() may be called concurrently; registrations need exclusive access.
class Ecosystem final : public NetworkResolver {
 public:
  explicit Ecosystem(Repository repository);
  Ecosystem(const Ecosystem&) = delete;
  Ecosystem& operator=(const Ecosystem&) = delete;

  // Port taken from chain.port(). Throws RegistrationError if the id or port
  // is already in use (the repository's own id and port included).
  void register_network(ChainInstance chain);
  void register_remote(NetworkId id, std::uint16_t port,
                       std::string host = std::string(kLoopback));

  // Swaps in a new value for an in-process network with the same metadata
  // identity (id and port).
  void replace_chain(ChainInstance chain);

  std::shared_ptr<const ChainView> resolve(NetworkId id) const override;

  // Null for remote or unknown networks.
  std::shared_ptr<const ChainInstance> local_chain(NetworkId id) const;

  bool contains(NetworkId id) const;
  std::uint16_t port_of(NetworkId id) const;
  // Member networks only, ascending.
  std::vector<NetworkId> network_ids() const;
  // Members plus the repository itself.
  std::size_t size() const;

  Repository& repository() noexcept { return repository_; }
  const Repository& repository() const noexcept { return repository_; }
  NetworkId repository_id() const noexcept { return repository_.chain().network_id(); }
  AdjacencyList adjacency() const { return repository_.adjacency(); }

 private:
  struct Remote {
    std::uint16_t port;
    std::string host;
  };
  using Entry = std::variant<std::shared_ptr<const ChainInstance>, Remote>;

  void check_free(NetworkId id, std::uint16_t port) const;

  Repository repository_;
  std::map<NetworkId, Entry> networks_;
  mutable std::shared_mutex mutex_;
};

namespace wire {

// Request builders. Each request/response is one line of canonical JSON.
codec::Json height_request();
codec::Json get_block_request(std::uint64_t index);
codec::Json find_request(ByteView target);

// Answers one request line against `chain`. Never mutates it. Malformed
// input yields ERR bad-request, a missing block ERR unknown-block.
codec::Json handle_request(const ChainInstance& chain, std::string_view line);

codec::Json error_response(std::string_view code, std::string_view message);

// One round trip: connect, send one line, read one line. Throws
// ConnectionError when nothing is listening and ProtocolError on a garbled
// reply.
codec::Json query(std::uint16_t port, const codec::Json& request,
                  const std::string& host = std::string(kLoopback));

}  // namespace wire

// Serves one chain read-only over local TCP. Connections are handled one at
// a time on a background thread; each may carry any number of request lines.
class ChainServer {
 public:
  // Port 0 binds an ephemeral port; see port(). Throws ConnectionError if
  // the port cannot be bound.
  ChainServer(std::shared_ptr<const ChainInstance> chain, std::uint16_t port,
              const std::string& host = std::string(kLoopback));
  ~ChainServer();
  ChainServer(const ChainServer&) = delete;
  ChainServer& operator=(const ChainServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  void stop();

 private:
  void run();
  void serve_connection(int fd);

  std::shared_ptr<const ChainInstance> chain_;
  int listen_fd_ = -1;
  int wake_pipe_[2] = {-1, -1};
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread thread_;
};

// Serves every in-process member of `local` and exposes the same ecosystem
// as remote handles, so traversal runs entirely over sockets.
struct ServedEcosystem {
  std::vector<std::unique_ptr<ChainServer>> servers;
  std::unique_ptr<Ecosystem> remote;
};

// With use_recorded_ports the servers bind the ports recorded for each
// network; otherwise they take ephemeral ports.
ServedEcosystem serve_ecosystem(const Ecosystem& local, bool use_recorded_ports = false);

}  // namespace forktree
