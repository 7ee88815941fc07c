#pragma once

// Canonical JSON: keys sorted, no insignificant whitespace, integers only,
// byte strings as lowercase hex. nlohmann::json's default object type is
// ordered by key, so dump() with no indent is already canonical.

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "forktree/chain.hpp"

namespace forktree::codec {

using Json = nlohmann::json;

std::string dump(const Json& j);

// Parses `text` and rejects anything whose canonical re-encoding differs
// from the input (reordered keys, whitespace, uppercase escapes, ...).
Json parse_canonical(std::string_view text);

// Throws ParseError unless `j` is an object with exactly these keys.
void require_keys(const Json& j, std::initializer_list<std::string_view> keys,
                  std::string_view what);

std::uint64_t get_u64(const Json& j, std::string_view key);
std::uint16_t get_port(const Json& j, std::string_view key);
std::string get_string(const Json& j, std::string_view key);
std::optional<std::uint64_t> get_optional_u64(const Json& j, std::string_view key);

// {"hash","index","nonce","payload_hex","previous_hash"}
Json block_to_json(const Block& block);
Block block_from_json(const Json& j);

}  // namespace forktree::codec
