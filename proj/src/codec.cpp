#include "forktree/codec.hpp"

#include <algorithm>
#include <limits>

namespace forktree::codec {

std::string dump(const Json& j) { return j.dump(); }

Json parse_canonical(std::string_view text) {
  Json j = Json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON");
  if (j.dump() != text) throw ParseError("JSON is not in canonical form");
  return j;
}

void require_keys(const Json& j, std::initializer_list<std::string_view> keys,
                  std::string_view what) {
  if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
  if (j.size() != keys.size()) throw ParseError(std::string(what) + " has unexpected fields");
  for (auto key : keys) {
    if (!j.contains(key)) {
      throw ParseError(std::string(what) + " is missing \"" + std::string(key) + "\"");
    }
  }
}

std::uint64_t get_u64(const Json& j, std::string_view key) {
  const Json& v = j.at(key);
  if (!v.is_number_unsigned()) {
    throw ParseError("\"" + std::string(key) + "\" must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::uint16_t get_port(const Json& j, std::string_view key) {
  auto v = get_u64(j, key);
  if (v > std::numeric_limits<std::uint16_t>::max()) {
    throw ParseError("\"" + std::string(key) + "\" exceeds 65535");
  }
  return static_cast<std::uint16_t>(v);
}

std::string get_string(const Json& j, std::string_view key) {
  const Json& v = j.at(key);
  if (!v.is_string()) throw ParseError("\"" + std::string(key) + "\" must be a string");
  return v.get<std::string>();
}

std::optional<std::uint64_t> get_optional_u64(const Json& j, std::string_view key) {
  if (j.at(key).is_null()) return std::nullopt;
  return get_u64(j, key);
}

Json block_to_json(const Block& block) {
  return Json{{"hash", to_hex(block.hash)},
              {"index", block.header.index},
              {"nonce", block.header.nonce},
              {"payload_hex", to_hex(block.header.payload)},
              {"previous_hash", to_hex(block.header.previous_hash)}};
}

Block block_from_json(const Json& j) {
  require_keys(j, {"hash", "index", "nonce", "payload_hex", "previous_hash"}, "block");
  Block b;
  b.hash = digest_from_hex(get_string(j, "hash"));
  b.header.index = get_u64(j, "index");
  b.header.nonce = get_u64(j, "nonce");
  b.header.payload = from_hex(get_string(j, "payload_hex"));
  b.header.previous_hash = digest_from_hex(get_string(j, "previous_hash"));
  return b;
}

}  // namespace forktree::codec
