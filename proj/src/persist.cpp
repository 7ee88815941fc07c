#include "forktree/persist.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <utility>
#include <vector>

namespace forktree::persist {

namespace {

std::string network_file(NetworkId id) {
  return std::string(kNetworksDir) + "/net-" + std::to_string(id) + ".json";
}

std::string file_digest(std::string_view content) {
  return to_hex(sha256(ByteView(reinterpret_cast<const std::uint8_t*>(content.data()),
                                content.size())));
}

ChainInstance parse_chain_text(const std::string& text, const fs::path& path) {
  if (text.empty()) throw ParseError(path.string() + ": empty file");
  if (text.back() != '\n') throw ParseError(path.string() + ": missing trailing newline");
  try {
    return chain_from_json(codec::parse_canonical(std::string_view(text).substr(0, text.size() - 1)));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ChainInstance validated(ChainInstance chain, const fs::path& path) {
  if (auto v = validate_chain(chain); !v) {
    throw HashMismatch(v.first_bad_index, std::string(to_string(v.reason)) + " in " + path.string());
  }
  return chain;
}

struct LoadedFile {
  ChainInstance chain;
  std::string digest;
};

LoadedFile load_with_digest(const fs::path& path) {
  std::string text = read_file(path);
  auto chain = validated(parse_chain_text(text, path), path);
  return {std::move(chain), file_digest(text)};
}

void expect(bool ok, const std::string& what) {
  if (!ok) throw ConsistencyError(what);
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

codec::Json chain_to_json(const ChainInstance& chain) {
  codec::Json blocks = codec::Json::array();
  for (const auto& b : chain.blocks()) blocks.push_back(codec::block_to_json(b));
  codec::Json j{{"blocks", std::move(blocks)},
                {"difficulty", chain.difficulty().bits()},
                {"fork_block_no", chain.fork_block_no()},
                {"network_id", chain.network_id()},
                {"parent_network_id", nullptr},
                {"port", chain.port()}};
  if (chain.parent_network_id()) j["parent_network_id"] = *chain.parent_network_id();
  return j;
}

ChainInstance chain_from_json(const codec::Json& j) {
  codec::require_keys(
      j, {"blocks", "difficulty", "fork_block_no", "network_id", "parent_network_id", "port"},
      "chain file");
  const auto bits = codec::get_u64(j, "difficulty");
  if (bits > Difficulty::kMaxBits) throw ParseError("difficulty out of range");
  ChainMeta meta{codec::get_u64(j, "network_id"), codec::get_optional_u64(j, "parent_network_id"),
                 codec::get_u64(j, "fork_block_no"), codec::get_port(j, "port"),
                 Difficulty{static_cast<unsigned>(bits)}};
  if (meta.parent_network_id.has_value() == (meta.fork_block_no == 0)) {
    throw ParseError("fork_block_no must be 0 exactly when there is no parent");
  }
  const auto& raw_blocks = j.at("blocks");
  if (!raw_blocks.is_array()) throw ParseError("\"blocks\" must be an array");
  std::vector<Block> blocks;
  blocks.reserve(raw_blocks.size());
  for (const auto& b : raw_blocks) blocks.push_back(codec::block_from_json(b));
  return ChainInstance::from_parts(std::move(meta), std::move(blocks));
}

std::string encode_chain(const ChainInstance& chain) {
  return codec::dump(chain_to_json(chain)) + "\n";
}

void save_chain(const ChainInstance& chain, const fs::path& path) {
  write_file_atomic(path, encode_chain(chain));
}

ChainInstance read_chain_file(const fs::path& path) {
  return parse_chain_text(read_file(path), path);
}

ChainInstance load_chain(const fs::path& path) { return validated(read_chain_file(path), path); }

void save_ecosystem(const Ecosystem& eco, const fs::path& dir) {
  std::vector<std::pair<fs::path, std::string>> staged;

  std::string repo_text = encode_chain(eco.repository().chain());
  codec::Json networks = codec::Json::array();
  for (NetworkId id : eco.network_ids()) {
    auto chain = eco.local_chain(id);
    if (!chain) throw Error("network " + std::to_string(id) + " is not held in-process");
    std::string text = encode_chain(*chain);
    networks.push_back({{"network_id", id},
                        {"path", network_file(id)},
                        {"port", chain->port()},
                        {"sha256", file_digest(text)}});
    staged.emplace_back(dir / network_file(id), std::move(text));
  }
  codec::Json manifest{{"networks", std::move(networks)},
                       {"repository", kRepositoryFile},
                       {"repository_sha256", file_digest(repo_text)}};
  staged.emplace_back(dir / kRepositoryFile, std::move(repo_text));
  staged.emplace_back(dir / kManifestName, codec::dump(manifest) + "\n");

  std::vector<fs::path> temps;
  try {
    for (const auto& [path, text] : staged) {
      fs::create_directories(path.parent_path());
      fs::path tmp = path;
      tmp += ".tmp";
      temps.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(text.data(), static_cast<std::streamsize>(text.size()));
      if (!out) throw Error("cannot write " + tmp.string());
    }
  } catch (...) {
    std::error_code ignored;
    for (const auto& t : temps) fs::remove(t, ignored);
    throw;
  }
  for (std::size_t i = 0; i < staged.size(); ++i) fs::rename(temps[i], staged[i].first);
}

std::unique_ptr<Ecosystem> load_ecosystem(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestName;
  std::string manifest_text = read_file(manifest_path);
  if (manifest_text.empty() || manifest_text.back() != '\n') {
    throw ParseError(manifest_path.string() + ": missing trailing newline");
  }
  manifest_text.pop_back();

  codec::Json manifest;
  try {
    manifest = codec::parse_canonical(manifest_text);
    codec::require_keys(manifest, {"networks", "repository", "repository_sha256"}, "manifest");
    if (!manifest.at("networks").is_array()) throw ParseError("\"networks\" must be an array");
    for (const auto& n : manifest.at("networks")) {
      codec::require_keys(n, {"network_id", "path", "port", "sha256"}, "manifest entry");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }

  auto repo_file = load_with_digest(dir / codec::get_string(manifest, "repository"));
  expect(repo_file.digest == codec::get_string(manifest, "repository_sha256"),
         "repository file does not match its manifest digest");
  Repository repository = [&] {
    try {
      return Repository::from_chain(std::move(repo_file.chain));
    } catch (const MalformedRepository& e) {
      throw ConsistencyError(e.what());
    }
  }();

  auto eco = std::make_unique<Ecosystem>(std::move(repository));
  const Repository& repo = eco->repository();
  expect(manifest.at("networks").size() == repo.size(),
         "manifest lists " + std::to_string(manifest.at("networks").size()) +
             " networks but the repository records " + std::to_string(repo.size()));

  std::map<NetworkId, ChainInstance> chains;
  NetworkId previous = 0;
  for (const auto& entry : manifest.at("networks")) {
    const NetworkId id = codec::get_u64(entry, "network_id");
    expect(chains.empty() || id > previous, "manifest networks must be in ascending id order");
    previous = id;
    const fs::path path = dir / codec::get_string(entry, "path");
    auto file = load_with_digest(path);
    const std::string label = "network " + std::to_string(id);
    expect(file.digest == codec::get_string(entry, "sha256"),
           label + ": file does not match its manifest digest");
    expect(file.chain.network_id() == id, label + ": file holds network " +
                                              std::to_string(file.chain.network_id()));
    expect(file.chain.port() == codec::get_port(entry, "port"), label + ": port mismatch");

    const ForkId fork_id = repo.find_fork_id(id);
    expect(fork_id != kForkNotFound, label + " has no fork record");
    const ForkRecord& record = repo.get_fork_data(fork_id);
    expect(record.parent_network_id == file.chain.parent_network_id(),
           label + ": parent disagrees with fork record");
    expect(record.fork_block_no == file.chain.fork_block_no(),
           label + ": fork block disagrees with fork record");
    expect(record.port_number == file.chain.port(), label + ": port disagrees with fork record");
    chains.emplace(id, std::move(file.chain));
  }

  for (const auto& [id, chain] : chains) {
    if (!chain.parent_network_id()) continue;
    const auto& parent = chains.at(*chain.parent_network_id());
    const auto n = chain.fork_block_no();
    expect(n <= parent.height() && n <= chain.height(),
           "network " + std::to_string(id) + ": fork prefix exceeds a chain height");
    for (std::uint64_t i = 0; i < n; ++i) {
      expect(chain.blocks()[i] == parent.blocks()[i],
             "network " + std::to_string(id) + ": block " + std::to_string(i) +
                 " differs from its parent");
    }
  }

  for (auto& [id, chain] : chains) eco->register_network(std::move(chain));
  return eco;
}

}  // namespace forktree::persist
