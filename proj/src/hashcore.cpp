#include "forktree/hashcore.hpp"

#include <openssl/evp.h>

#include <limits>

#include "forktree/error.hpp"

namespace forktree {

namespace {

void put_be64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

std::string to_string(ByteView bytes) { return std::string(bytes.begin(), bytes.end()); }

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw ParseError("hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_value(hex[i]);
    int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw ParseError("invalid lowercase hex character");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

Digest digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) throw ParseError("digest must be 64 hex characters");
  Bytes raw = from_hex(hex);
  Digest d{};
  std::copy(raw.begin(), raw.end(), d.begin());
  return d;
}

Difficulty::Difficulty(unsigned leading_zero_bits) : bits_(leading_zero_bits) {
  if (leading_zero_bits > kMaxBits) {
    throw RangeError("difficulty must be in [0, 255], got " + std::to_string(leading_zero_bits));
  }
}

Bytes canonical_serialize(const BlockHeader& header) {
  Bytes out;
  out.reserve(56 + header.payload.size());
  put_be64(out, header.index);
  out.insert(out.end(), header.previous_hash.begin(), header.previous_hash.end());
  put_be64(out, header.payload.size());
  out.insert(out.end(), header.payload.begin(), header.payload.end());
  put_be64(out, header.nonce);
  return out;
}

Digest sha256(ByteView data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw Error("SHA-256 computation failed");
  }
  return out;
}

Digest hash_block(const BlockHeader& header) { return sha256(canonical_serialize(header)); }

bool meets_target(const Digest& digest, Difficulty difficulty) noexcept {
  unsigned remaining = difficulty.bits();
  for (auto byte : digest) {
    if (remaining == 0) return true;
    if (remaining >= 8) {
      if (byte != 0) return false;
      remaining -= 8;
    } else {
      return (byte >> (8 - remaining)) == 0;
    }
  }
  return true;
}

MinedHeader mine(std::uint64_t index, const Digest& previous_hash, ByteView payload,
                 Difficulty difficulty) {
  if (difficulty.bits() > Difficulty::kMaxMiningBits) {
    throw RangeError("mining difficulty above " + std::to_string(Difficulty::kMaxMiningBits) +
                     " bits is not supported");
  }
  // The nonce is the trailing 8 bytes of the serialization, so only those
  // are rewritten per attempt.
  BlockHeader header{index, previous_hash, Bytes(payload.begin(), payload.end()), 0};
  Bytes buf = canonical_serialize(header);
  const std::size_t nonce_at = buf.size() - 8;
  for (std::uint64_t nonce = 0;; ++nonce) {
    for (int i = 0; i < 8; ++i) {
      buf[nonce_at + i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
    }
    Digest d = sha256(buf);
    if (meets_target(d, difficulty)) {
      header.nonce = nonce;
      return {std::move(header), d};
    }
    if (nonce == std::numeric_limits<std::uint64_t>::max()) break;
  }
  throw MiningError("nonce space exhausted at block " + std::to_string(index));
}

}  // namespace forktree
