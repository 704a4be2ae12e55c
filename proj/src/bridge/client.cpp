#include "ace/bridge/client.hpp"

#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <arpa/inet.h>
#include <cstring>

namespace ace::bridge {

namespace {

void set_timeout(int fd, int timeout_ms) {
  timeval tv{};
  tv.tv_sec = timeout_ms / 1000;
  tv.tv_usec = (timeout_ms % 1000) * 1000;
  setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

}  // namespace

BridgeClient::BridgeClient(ClientConfig config) : config_(std::move(config)) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw BridgeError("socket: " + std::string(std::strerror(errno)));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(config_.port));
  if (inet_pton(AF_INET, config_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    fd_ = -1;
    throw BridgeError("bad host address '" + config_.host + "'");
  }
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    std::string err = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw BridgeError("connect to " + config_.host + ":" + std::to_string(config_.port) +
                      ": " + err);
  }
  set_timeout(fd_, config_.timeout_ms);
  int one = 1;
  setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

  Hello hello;
  hello.screen_w = config_.screen_w;
  hello.screen_h = config_.screen_h;
  WireMessage reply = request(hello);
  auto* h = std::get_if<Hello>(&reply);
  if (!h) {
    ::close(fd_);
    fd_ = -1;
    throw BridgeError("unexpected handshake reply of type '" + message_type(reply) + "'");
  }
  server_hello_ = *h;
}

BridgeClient::~BridgeClient() {
  if (fd_ >= 0) ::close(fd_);
}

WireMessage BridgeClient::request(const WireMessage& msg) {
  if (fd_ < 0) throw BridgeError("session is closed");
  write_frame(fd_, msg);
  WireMessage reply = read_frame(fd_);
  if (auto* err = std::get_if<Error>(&reply)) {
    // Protocol-level errors close the server side; reflect that here so the
    // next request fails fast instead of hanging on a dead socket.
    if (err->code != "app_error") {
      ::close(fd_);
      fd_ = -1;
    }
    throw RemoteError(err->code, err->detail);
  }
  return reply;
}

sim::Observation BridgeClient::reset(const std::string& task_id, std::string* state_hash) {
  WireMessage reply = request(Reset{task_id});
  auto* obs = std::get_if<ObservationMsg>(&reply);
  if (!obs) throw BridgeError("unexpected reset reply of type '" + message_type(reply) + "'");
  if (state_hash) *state_hash = obs->state_hash;
  return std::move(obs->observation);
}

sim::Observation BridgeClient::observe(std::string* state_hash) {
  WireMessage reply = request(Observe{});
  auto* obs = std::get_if<ObservationMsg>(&reply);
  if (!obs) throw BridgeError("unexpected observe reply of type '" + message_type(reply) + "'");
  if (state_hash) *state_hash = obs->state_hash;
  return std::move(obs->observation);
}

sim::ExecReport BridgeClient::execute(const actions::ActionScript& script,
                                      std::string* state_hash) {
  WireMessage reply = request(Execute{actions::render(script)});
  auto* res = std::get_if<ExecResultMsg>(&reply);
  if (!res) throw BridgeError("unexpected execute reply of type '" + message_type(reply) + "'");
  if (state_hash) *state_hash = res->state_hash;
  return std::move(res->report);
}

void BridgeClient::shutdown_session() {
  if (fd_ < 0) return;
  try {
    WireMessage reply = request(Shutdown{});
    (void)reply;  // the ack's content does not matter
  } catch (const BridgeError&) {
    // Best effort; the server may already be gone.
  }
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

RemoteEnv::RemoteEnv(BridgeClient& client, const std::string& task_id, sim::EnvState initial)
    : client_(client), shadow_(std::move(initial)) {
  std::string server_hash;
  client_.reset(task_id, &server_hash);
  check(server_hash, "reset");
}

void RemoteEnv::check(const std::string& server_hash, const char* when) const {
  std::string local = sim::state_hash(shadow_);
  if (server_hash != local)
    throw BridgeError(std::string("state hash mismatch after ") + when + ": server " +
                      server_hash + ", local " + local);
}

sim::Observation RemoteEnv::observe() {
  std::string server_hash;
  sim::Observation obs = client_.observe(&server_hash);
  check(server_hash, "observe");
  return obs;
}

sim::ExecReport RemoteEnv::execute(const actions::ActionScript& script) {
  std::string server_hash;
  sim::ExecReport report = client_.execute(script, &server_hash);
  auto [next, local_report] = sim::execute(shadow_, script);
  shadow_ = std::move(next);
  check(server_hash, "execute");
  if (!(local_report == report))
    throw BridgeError("execution report mismatch between server and local replay");
  return report;
}

}  // namespace ace::bridge
