#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "forktree/codec.hpp"
#include "forktree/netharness.hpp"

namespace forktree::persist {

namespace fs = std::filesystem;

inline constexpr std::string_view kManifestName = "manifest.json";
inline constexpr std::string_view kRepositoryFile = "repository.json";
inline constexpr std::string_view kNetworksDir = "networks";

// {"blocks":[...],"difficulty","fork_block_no","network_id","parent_network_id","port"}
codec::Json chain_to_json(const ChainInstance& chain);
// Decodes without validating. Throws ParseError.
ChainInstance chain_from_json(const codec::Json& j);

std::string encode_chain(const ChainInstance& chain);

void save_chain(const ChainInstance& chain, const fs::path& path);

// Parses a chain file without validating it (used by `verify` to report
// problems instead of refusing the file).
ChainInstance read_chain_file(const fs::path& path);

// Parses and fully validates. Throws ParseError for unreadable or
// non-canonical files and HashMismatch naming the first bad block.
ChainInstance load_chain(const fs::path& path);

// Writes one file per chain plus a manifest holding each file's SHA-256.
// All files are staged first; nothing is renamed into place unless every
// write succeeded, and the manifest goes last.
void save_ecosystem(const Ecosystem& eco, const fs::path& dir);

// Loads and cross-checks everything: file digests against the manifest,
// each chain's metadata against its fork record, and every fork prefix
// against its parent. Throws ParseError, HashMismatch or ConsistencyError.
std::unique_ptr<Ecosystem> load_ecosystem(const fs::path& dir);

std::string read_file(const fs::path& path);
void write_file_atomic(const fs::path& path, std::string_view content);

}  // namespace forktree::persist
