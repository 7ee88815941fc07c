// forktree: command-line driver for a repository-indexed fork ecosystem.
//
// Exit codes: 0 success / found, 1 not found or invalid, 2 error.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "forktree/fork.hpp"
#include "forktree/persist.hpp"

namespace fs = std::filesystem;
using namespace forktree;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotFound = 1;
constexpr int kExitError = 2;

// Advisory lock on <dir>/.lock. Writers take it exclusively, readers shared,
// so a concurrent writer is refused instead of racing.
class DirLock {
 public:
  DirLock(const fs::path& dir, bool exclusive) {
    fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open lock file in " + dir.string());
    if (::flock(fd_, (exclusive ? LOCK_EX : LOCK_SH) | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(dir.string() + " is in use by another forktree invocation");
    }
  }
  ~DirLock() { ::close(fd_); }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

void require_ecosystem_dir(const fs::path& dir) {
  if (!fs::exists(dir / persist::kManifestName)) {
    throw Error(dir.string() + " is not an ecosystem directory (run `forktree init`)");
  }
}

std::uint16_t to_port(std::uint64_t v) {
  if (v > 65535) throw RangeError("port must be at most 65535");
  return static_cast<std::uint16_t>(v);
}

std::string join(const std::vector<NetworkId>& ids) {
  std::string out;
  for (auto id : ids) {
    if (!out.empty()) out += ' ';
    out += std::to_string(id);
  }
  return out;
}

struct InitArgs {
  std::string dir;
  NetworkId network_id = 0;
  std::uint64_t port = 0;
  unsigned difficulty = 0;
  std::string genesis;
  NetworkId repo_network_id = 0;
  std::uint64_t repo_port = 30300;
  unsigned repo_difficulty = kDefaultRepositoryDifficulty;
};

int cmd_init(const InitArgs& a) {
  const fs::path dir = a.dir;
  if (fs::exists(dir)) throw Error(dir.string() + " already exists");
  if (a.network_id == a.repo_network_id) {
    throw RegistrationError("root network id collides with the repository id");
  }
  auto root = create_chain(a.network_id, to_port(a.port), Difficulty{a.difficulty},
                           to_bytes(a.genesis));
  Repository repo(a.repo_network_id, to_port(a.repo_port), Difficulty{a.repo_difficulty});
  repo.add_fork_detail(root.network_id(), root.port(), std::nullopt, 0);
  Ecosystem eco(std::move(repo));
  eco.register_network(root);

  fs::create_directories(dir);
  DirLock lock(dir, true);
  persist::save_ecosystem(eco, dir);
  std::cout << "network=" << root.network_id() << " height=" << root.height()
            << " hash=" << to_hex(root.tip().hash) << "\n";
  return kExitOk;
}

int cmd_mine(const std::string& dir, NetworkId network, const std::string& payload) {
  require_ecosystem_dir(dir);
  DirLock lock(dir, true);
  auto eco = persist::load_ecosystem(dir);
  auto chain = eco->local_chain(network);
  if (!chain) throw UnknownNetwork(network);
  auto next = append_payload(*chain, to_bytes(payload));
  const auto height = next.height();
  const auto hash = next.tip().hash;
  eco->replace_chain(std::move(next));
  persist::save_ecosystem(*eco, dir);
  std::cout << "height=" << height << " hash=" << to_hex(hash) << "\n";
  return kExitOk;
}

int cmd_fork(const std::string& dir, NetworkId parent_id, std::uint64_t at, NetworkId new_id,
             std::uint64_t port, std::optional<unsigned> difficulty) {
  require_ecosystem_dir(dir);
  DirLock lock(dir, true);
  auto eco = persist::load_ecosystem(dir);
  auto parent = eco->local_chain(parent_id);
  if (!parent) throw UnknownNetwork(parent_id);
  auto child = hard_fork(*parent, at, new_id, to_port(port),
                         difficulty ? Difficulty{*difficulty} : parent->difficulty());
  // Both steps happen in memory; files are only written once both succeed.
  eco->register_network(child);
  const ForkId fork_id =
      eco->repository().add_fork_detail(new_id, child.port(), parent_id, child.fork_block_no());
  persist::save_ecosystem(*eco, dir);
  std::cout << "fork_id=" << fork_id << "\n";
  return kExitOk;
}

struct SearchArgs {
  std::string dir;
  std::string value;
  std::string strategy = "dfs";
  bool net = false;
  bool external = false;
  bool include_repository = false;
};

int cmd_search(const SearchArgs& a) {
  require_ecosystem_dir(a.dir);
  DirLock lock(a.dir, false);
  auto eco = persist::load_ecosystem(a.dir);
  const auto strategy = parse_strategy(a.strategy);
  const auto adj = eco->adjacency();
  const auto target = to_bytes(a.value);

  std::vector<NetworkId> pre_visited;
  if (a.include_repository) {
    pre_visited.push_back(eco->repository_id());
    if (auto hit = find_in_chain(eco->repository().chain(), target)) {
      std::cout << "FOUND network=" << eco->repository_id() << " block=" << hit->index
                << " hash=" << to_hex(hit->block.hash) << "\n";
      return kExitOk;
    }
  }

  SearchResult result;
  if (!a.net) {
    result = search(*eco, adj, adj.root, target, strategy);
  } else if (a.external) {
    Ecosystem remote(eco->repository());
    for (NetworkId id : eco->network_ids()) remote.register_remote(id, eco->port_of(id));
    result = search(remote, adj, adj.root, target, strategy);
  } else {
    auto served = serve_ecosystem(*eco, true);
    result = search(*served.remote, adj, adj.root, target, strategy);
  }

  if (result.found()) {
    std::cout << "FOUND network=" << result.match->network_id
              << " block=" << result.match->hit.index
              << " hash=" << to_hex(result.match->hit.hash) << "\n";
    return kExitOk;
  }
  pre_visited.insert(pre_visited.end(), result.visited.begin(), result.visited.end());
  std::cout << "NOT FOUND after visiting: " << join(pre_visited) << "\n";
  return kExitNotFound;
}

int cmd_tree(const std::string& dir, const std::string& format) {
  require_ecosystem_dir(dir);
  DirLock lock(dir, false);
  auto eco = persist::load_ecosystem(dir);
  const auto& repo = eco->repository();
  const auto adj = eco->adjacency();
  auto record_of = [&](NetworkId id) -> const ForkRecord& {
    return repo.get_fork_data(repo.find_fork_id(id));
  };

  if (format == "ascii") {
    std::function<void(NetworkId, int)> print = [&](NetworkId id, int depth) {
      std::cout << std::string(2 * static_cast<std::size_t>(depth), ' ') << "net " << id
                << " (fork@" << record_of(id).fork_block_no << ") height="
                << eco->resolve(id)->height() << "\n";
      for (NetworkId child : adj.children.at(id)) print(child, depth + 1);
    };
    print(adj.root, 0);
  } else if (format == "dot") {
    std::cout << "digraph forktree {\n";
    for (const auto& r : repo.get_all_fork_details()) {
      std::cout << "  n" << r.network_id << " [label=\"net " << r.network_id << " (fork@"
                << r.fork_block_no << ")\"];\n";
    }
    for (const auto& r : repo.get_all_fork_details()) {
      if (r.parent_network_id) {
        std::cout << "  n" << *r.parent_network_id << " -> n" << r.network_id << ";\n";
      }
    }
    std::cout << "}\n";
  } else {
    throw RangeError("unknown tree format '" + format + "'");
  }
  return kExitOk;
}

int cmd_repo(const std::string& dir, std::optional<ForkId> fork_id,
             std::optional<NetworkId> network, std::optional<ForkId> children) {
  require_ecosystem_dir(dir);
  DirLock lock(dir, false);
  auto eco = persist::load_ecosystem(dir);
  const auto& repo = eco->repository();
  try {
    if (fork_id) {
      std::cout << encode_record(repo.get_fork_data(*fork_id)) << "\n";
    } else if (network) {
      const ForkId k = repo.find_fork_id(*network);
      if (k == kForkNotFound) {
        std::cout << kForkNotFound << "\n";
        return kExitNotFound;
      }
      std::cout << encode_record(repo.get_fork_data(k)) << "\n";
    } else if (children) {
      for (ForkId k : repo.get_children(*children)) {
        std::cout << encode_record(repo.get_fork_data(k)) << "\n";
      }
    } else {
      for (const auto& r : repo.get_all_fork_details()) std::cout << encode_record(r) << "\n";
    }
  } catch (const NotFoundError& e) {
    std::cerr << "not found: " << e.what() << "\n";
    return kExitNotFound;
  }
  return kExitOk;
}

int cmd_verify(const std::string& dir_arg) {
  const fs::path dir = dir_arg;
  require_ecosystem_dir(dir);
  DirLock lock(dir, false);
  bool all_valid = true;
  auto report = [&](const std::string& line) {
    all_valid = false;
    std::cout << "INVALID " << line << "\n";
  };

  auto check_file = [&](const std::string& label, const fs::path& path) {
    try {
      auto chain = persist::read_chain_file(path);
      if (auto v = validate_chain(chain); !v) {
        report("network=" + std::to_string(chain.network_id()) + " block=" +
               std::to_string(v.first_bad_index) + " reason=" + std::string(to_string(v.reason)));
      }
    } catch (const Error& e) {
      report(label + " reason=unreadable: " + e.what());
    }
  };

  std::size_t networks = 0;
  try {
    std::string text = persist::read_file(dir / persist::kManifestName);
    if (!text.empty() && text.back() == '\n') text.pop_back();
    auto manifest = codec::parse_canonical(text);
    check_file("repository", dir / codec::get_string(manifest, "repository"));
    for (const auto& entry : manifest.at("networks")) {
      ++networks;
      check_file("network=" + std::to_string(codec::get_u64(entry, "network_id")),
                 dir / codec::get_string(entry, "path"));
    }
  } catch (const std::exception& e) {
    report(std::string("manifest reason=") + e.what());
  }
  if (all_valid) {
    try {
      persist::load_ecosystem(dir);
    } catch (const Error& e) {
      report(std::string("ecosystem reason=") + e.what());
    }
  }
  if (!all_valid) return kExitNotFound;
  std::cout << "OK networks=" << networks << " repository=valid\n";
  return kExitOk;
}

int cmd_serve(const std::string& dir, NetworkId network, std::optional<std::uint64_t> port) {
  require_ecosystem_dir(dir);
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::shared_ptr<const ChainInstance> chain;
  {
    DirLock lock(dir, false);
    auto eco = persist::load_ecosystem(dir);
    chain = eco->local_chain(network);
    if (!chain) throw UnknownNetwork(network);
  }
  ChainServer server(chain, port ? to_port(*port) : chain->port());
  std::cout << "serving network=" << network << " port=" << server.port() << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repository-indexed hard-fork ecosystem: mine, fork, search, inspect"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  InitArgs init;
  auto* init_cmd = app.add_subcommand("init", "Create an ecosystem with its root chain");
  init_cmd->add_option("--dir", init.dir, "Ecosystem directory (must not exist)")->required();
  init_cmd->add_option("--network-id", init.network_id, "Root network id")->required();
  init_cmd->add_option("--port", init.port, "Root network port")->required();
  init_cmd->add_option("--difficulty", init.difficulty, "Leading zero bits")->required()
      ->check(CLI::Range(0u, Difficulty::kMaxMiningBits));
  init_cmd->add_option("--genesis", init.genesis, "Genesis payload")->required();
  init_cmd->add_option("--repo-network-id", init.repo_network_id, "Repository network id")
      ->capture_default_str();
  init_cmd->add_option("--repo-port", init.repo_port, "Repository port")->capture_default_str();
  init_cmd->add_option("--repo-difficulty", init.repo_difficulty, "Repository difficulty")
      ->capture_default_str()
      ->check(CLI::Range(0u, Difficulty::kMaxMiningBits));
  init_cmd->callback([&] { exit_code = cmd_init(init); });

  std::string dir;
  NetworkId network = 0;
  std::string payload;
  auto* mine_cmd = app.add_subcommand("mine", "Mine one payload onto a network");
  mine_cmd->add_option("--dir", dir)->required();
  mine_cmd->add_option("--network", network)->required();
  mine_cmd->add_option("--payload", payload)->required();
  mine_cmd->callback([&] { exit_code = cmd_mine(dir, network, payload); });

  NetworkId parent = 0, new_id = 0;
  std::uint64_t at = 0, port = 0;
  std::optional<unsigned> fork_difficulty;
  auto* fork_cmd = app.add_subcommand("fork", "Hard-fork a network and record the event");
  fork_cmd->add_option("--dir", dir)->required();
  fork_cmd->add_option("--parent", parent)->required();
  fork_cmd->add_option("--at", at, "Number of parent blocks the fork keeps")->required();
  fork_cmd->add_option("--network-id", new_id)->required();
  fork_cmd->add_option("--port", port)->required();
  fork_cmd->add_option("--difficulty", fork_difficulty, "Defaults to the parent's")
      ->check(CLI::Range(0u, Difficulty::kMaxMiningBits));
  fork_cmd->callback([&] { exit_code = cmd_fork(dir, parent, at, new_id, port, fork_difficulty); });

  SearchArgs sa;
  auto* search_cmd = app.add_subcommand("search", "Search every network for a payload");
  search_cmd->add_option("--dir", sa.dir)->required();
  search_cmd->add_option("--value", sa.value)->required();
  search_cmd->add_option("--strategy", sa.strategy)->check(CLI::IsMember({"dfs", "bfs"}))
      ->capture_default_str();
  search_cmd->add_flag("--net", sa.net, "Query every network over its socket");
  search_cmd->add_flag("--external", sa.external,
                       "With --net: use servers already started by `forktree serve`");
  search_cmd->add_flag("--include-repository", sa.include_repository,
                       "Also search the repository chain, before the fork tree");
  search_cmd->callback([&] { exit_code = cmd_search(sa); });

  std::string format = "ascii";
  auto* tree_cmd = app.add_subcommand("tree", "Render the fork tree");
  tree_cmd->add_option("--dir", dir)->required();
  tree_cmd->add_option("--format", format)->check(CLI::IsMember({"ascii", "dot"}))
      ->capture_default_str();
  tree_cmd->callback([&] { exit_code = cmd_tree(dir, format); });

  std::optional<ForkId> fork_id, children;
  std::optional<NetworkId> by_network;
  auto* repo_cmd = app.add_subcommand("repo", "Query fork records");
  repo_cmd->add_option("--dir", dir)->required();
  auto* o1 = repo_cmd->add_option("--fork-id", fork_id);
  auto* o2 = repo_cmd->add_option("--network", by_network);
  auto* o3 = repo_cmd->add_option("--children", children);
  o1->excludes(o2, o3);
  o2->excludes(o3);
  repo_cmd->callback([&] { exit_code = cmd_repo(dir, fork_id, by_network, children); });

  auto* verify_cmd = app.add_subcommand("verify", "Validate every chain and the repository");
  verify_cmd->add_option("--dir", dir)->required();
  verify_cmd->callback([&] { exit_code = cmd_verify(dir); });

  std::optional<std::uint64_t> serve_port;
  auto* serve_cmd = app.add_subcommand("serve", "Serve one network over the socket protocol");
  serve_cmd->add_option("--dir", dir)->required();
  serve_cmd->add_option("--network", network)->required();
  serve_cmd->add_option("--port", serve_port, "Defaults to the recorded port");
  serve_cmd->callback([&] { exit_code = cmd_serve(dir, network, serve_port); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return exit_code;
}
