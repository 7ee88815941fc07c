#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace forktree {

using NetworkId = std::uint64_t;
using ForkId = std::uint64_t;

// Base for every error raised by the library. Invalid chains are reported as
// values (see ValidationResult), not as exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MiningError : public Error {
 public:
  using Error::Error;
};

// Argument outside its permitted range (fork height, hex length, ...).
class RangeError : public Error {
 public:
  using Error::Error;
};

class DuplicateRegistration : public Error {
 public:
  using Error::Error;
};

class UnknownParent : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class MalformedRepository : public Error {
 public:
  using Error::Error;
};

class RegistrationError : public Error {
 public:
  using Error::Error;
};

class UnknownNetwork : public Error {
 public:
  explicit UnknownNetwork(NetworkId id)
      : Error("unknown network " + std::to_string(id)), network_id_(id) {}
  NetworkId network_id() const noexcept { return network_id_; }

 private:
  NetworkId network_id_;
};

class NetworkUnreachable : public Error {
 public:
  NetworkUnreachable(NetworkId id, const std::string& detail)
      : Error("network " + std::to_string(id) + " unreachable: " + detail), network_id_(id) {}
  NetworkId network_id() const noexcept { return network_id_; }

 private:
  NetworkId network_id_;
};

// Socket-level failure before a network id is known (raw query by port).
class ConnectionError : public Error {
 public:
  using Error::Error;
};

// Well-formed transport, but the peer answered ERR or something unexpected.
class ProtocolError : public Error {
 public:
  ProtocolError(std::string code, const std::string& message)
      : Error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class HashMismatch : public Error {
 public:
  HashMismatch(std::uint64_t index, const std::string& reason)
      : Error("hash mismatch at block " + std::to_string(index) + " (" + reason + ")"),
        index_(index) {}
  std::uint64_t block_index() const noexcept { return index_; }

 private:
  std::uint64_t index_;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace forktree
