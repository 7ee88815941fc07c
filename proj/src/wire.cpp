#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "forktree/netharness.hpp"

namespace forktree {

namespace {

constexpr std::size_t kMaxLine = 1 << 20;
constexpr int kIoTimeoutSeconds = 5;

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const noexcept { return fd_; }
  int release() noexcept { return std::exchange(fd_, -1); }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

sockaddr_in make_address(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw ConnectionError("invalid IPv4 address '" + host + "'");
  }
  return addr;
}

void set_timeouts(int fd) {
  timeval tv{kIoTimeoutSeconds, 0};
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

// Reads bytes up to and excluding '\n' into `line`, keeping leftovers in
// `buffer`. Returns false on EOF/error before a full line.
bool read_line(int fd, std::string& buffer, std::string& line) {
  for (;;) {
    if (auto nl = buffer.find('\n'); nl != std::string::npos) {
      line.assign(buffer, 0, nl);
      buffer.erase(0, nl + 1);
      return true;
    }
    if (buffer.size() > kMaxLine) return false;
    char chunk[4096];
    ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace

namespace wire {

codec::Json height_request() { return {{"type", "HEIGHT"}}; }

codec::Json get_block_request(std::uint64_t index) {
  return {{"index", index}, {"type", "GET_BLOCK"}};
}

codec::Json find_request(ByteView target) {
  return {{"target", to_hex(target)}, {"type", "FIND"}};
}

codec::Json error_response(std::string_view code, std::string_view message) {
  return {{"code", code}, {"message", message}, {"type", "ERR"}};
}

codec::Json handle_request(const ChainInstance& chain, std::string_view line) {
  codec::Json request = codec::Json::parse(line.begin(), line.end(), nullptr, false);
  if (request.is_discarded() || !request.is_object() || !request.contains("type") ||
      !request["type"].is_string()) {
    return error_response("bad-request", "request must be a JSON object with a \"type\"");
  }
  try {
    const auto type = request["type"].get<std::string>();
    if (type == "HEIGHT") {
      codec::require_keys(request, {"type"}, "HEIGHT request");
      return {{"height", chain.height()}, {"type", "HEIGHT"}};
    }
    if (type == "GET_BLOCK") {
      codec::require_keys(request, {"index", "type"}, "GET_BLOCK request");
      const auto index = codec::get_u64(request, "index");
      if (index >= chain.height()) {
        return error_response("unknown-block", "no block " + std::to_string(index));
      }
      return {{"block", codec::block_to_json(chain.blocks()[index])}, {"type", "BLOCK"}};
    }
    if (type == "FIND") {
      codec::require_keys(request, {"target", "type"}, "FIND request");
      const auto target = from_hex(codec::get_string(request, "target"));
      auto located = find_in_chain(chain, target);
      if (!located) return {{"type", "ABSENT"}};
      return {{"hash", to_hex(located->block.hash)},
              {"index", located->index},
              {"payload", to_hex(located->block.header.payload)},
              {"type", "FOUND"}};
    }
    return error_response("bad-request", "unknown request type '" + type + "'");
  } catch (const ParseError& e) {
    return error_response("bad-request", e.what());
  } catch (const std::exception& e) {
    return error_response("internal", e.what());
  }
}

codec::Json query(std::uint16_t port, const codec::Json& request, const std::string& host) {
  Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (fd.get() < 0) throw ConnectionError(errno_text("socket"));
  set_timeouts(fd.get());
  auto addr = make_address(host, port);
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    throw ConnectionError(errno_text(("connect to port " + std::to_string(port)).c_str()));
  }
  if (!send_all(fd.get(), codec::dump(request) + "\n")) {
    throw ConnectionError(errno_text("send"));
  }
  std::string buffer, line;
  if (!read_line(fd.get(), buffer, line)) {
    throw ConnectionError("connection closed before a response line");
  }
  codec::Json response = codec::Json::parse(line, nullptr, false);
  if (response.is_discarded() || !response.is_object()) {
    throw ProtocolError("internal", "unparseable response");
  }
  return response;
}

}  // namespace wire

ChainServer::ChainServer(std::shared_ptr<const ChainInstance> chain, std::uint16_t port,
                         const std::string& host)
    : chain_(std::move(chain)) {
  Fd listener(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (listener.get() < 0) throw ConnectionError(errno_text("socket"));
  int one = 1;
  ::setsockopt(listener.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  auto addr = make_address(host, port);
  if (::bind(listener.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    throw ConnectionError(errno_text(("bind port " + std::to_string(port)).c_str()));
  }
  if (::listen(listener.get(), 16) != 0) throw ConnectionError(errno_text("listen"));
  socklen_t len = sizeof addr;
  ::getsockname(listener.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  if (::pipe2(wake_pipe_, O_CLOEXEC) != 0) throw ConnectionError(errno_text("pipe"));
  listen_fd_ = listener.release();
  thread_ = std::thread([this] { run(); });
}

ChainServer::~ChainServer() {
  stop();
  for (int fd : {wake_pipe_[0], wake_pipe_[1]}) {
    if (fd >= 0) ::close(fd);
  }
}

void ChainServer::stop() {
  if (stopping_.exchange(true)) return;
  char byte = 0;
  [[maybe_unused]] auto n = ::write(wake_pipe_[1], &byte, 1);
  if (thread_.joinable()) thread_.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

void ChainServer::run() {
  while (!stopping_) {
    pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_pipe_[0], POLLIN, 0}};
    if (::poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      return;
    }
    if (fds[1].revents != 0) return;
    if ((fds[0].revents & POLLIN) == 0) continue;
    Fd conn(::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC));
    if (conn.get() < 0) continue;
    serve_connection(conn.get());
  }
}

void ChainServer::serve_connection(int fd) {
  set_timeouts(fd);
  std::string buffer, line;
  while (!stopping_ && read_line(fd, buffer, line)) {
    if (!send_all(fd, codec::dump(wire::handle_request(*chain_, line)) + "\n")) return;
  }
  if (buffer.size() > kMaxLine) {
    send_all(fd, codec::dump(wire::error_response("bad-request", "request line too long")) + "\n");
  }
}

}  // namespace forktree
