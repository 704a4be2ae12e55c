#include "ace/bridge/server.hpp"

#include <cerrno>
#include <cstring>
#include <optional>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "ace/actions.hpp"

namespace ace::bridge {

namespace {

void set_timeout(int fd, int timeout_ms) {
  if (timeout_ms <= 0) return;
  timeval tv{};
  tv.tv_sec = timeout_ms / 1000;
  tv.tv_usec = (timeout_ms % 1000) * 1000;
  setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

void reply_best_effort(int fd, const WireMessage& msg) {
  try {
    write_frame(fd, msg);
  } catch (const BridgeError&) {
    // the peer is already gone; nothing left to tell it
  }
}

}  // namespace

BridgeServer::BridgeServer(EnvStateFactory factory, ServerConfig config)
    : factory_(std::move(factory)), config_(std::move(config)) {}

BridgeServer::~BridgeServer() { stop(); }

void BridgeServer::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0)
    throw BridgeError(std::string("socket() failed: ") + std::strerror(errno));
  int one = 1;
  setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(config_.port));
  if (inet_pton(AF_INET, config_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw BridgeError("bad listen address: " + config_.host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 16) != 0) {
    std::string err = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw BridgeError("cannot listen on " + config_.host + ":" +
                      std::to_string(config_.port) + ": " + err);
  }
  socklen_t len = sizeof(addr);
  getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void BridgeServer::stop() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (stopping_) {
      if (accept_thread_.joinable()) accept_thread_.join();
      return;
    }
    stopping_ = true;
    if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
    for (int fd : session_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> sessions;
  {
    std::lock_guard<std::mutex> lock(mu_);
    sessions.swap(sessions_);
  }
  for (auto& t : sessions)
    if (t.joinable()) t.join();
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
}

void BridgeServer::accept_loop() {
  while (true) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;  // listener closed by stop()
    }
    std::lock_guard<std::mutex> lock(mu_);
    if (stopping_) {
      ::close(fd);
      return;
    }
    session_fds_.insert(fd);
    sessions_.emplace_back([this, fd] { session(fd); });
  }
}

void BridgeServer::session(int fd) {
  set_timeout(fd, config_.timeout_ms);
  enum class Phase { AwaitHello, Idle, Ready };
  Phase phase = Phase::AwaitHello;
  std::optional<sim::EnvState> state;
  bool open = true;

  auto violation = [&](const std::string& detail) {
    reply_best_effort(fd, Error{"protocol_violation", detail});
    open = false;
  };

  while (open) {
    WireMessage msg;
    try {
      msg = read_frame(fd);
    } catch (const FrameTooLarge& e) {
      reply_best_effort(fd, Error{"frame_too_large", e.what()});
      break;
    } catch (const MalformedPayload& e) {
      reply_best_effort(fd, Error{"malformed", e.what()});
      break;
    } catch (const BridgeError&) {
      break;  // peer closed or timed out
    }

    try {
      std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Hello>) {
            if (phase != Phase::AwaitHello) {
              violation("duplicate hello");
            } else if (m.proto_version != kProtoVersion) {
              reply_best_effort(
                  fd, Error{"version_mismatch", "server speaks protocol version " +
                                                    std::string(kProtoVersion) +
                                                    ", client sent '" +
                                                    m.proto_version + "'"});
              open = false;
            } else {
              Hello reply;
              reply.screen_w = config_.screen_w;
              reply.screen_h = config_.screen_h;
              write_frame(fd, reply);
              phase = Phase::Idle;
            }
          } else if constexpr (std::is_same_v<T, Reset>) {
            if (phase == Phase::AwaitHello) {
              violation("reset before hello");
              return;
            }
            try {
              sim::EnvState fresh = factory_(m.task_id);
              state = std::move(fresh);
              phase = Phase::Ready;
              write_frame(fd, ObservationMsg{sim::observe(*state),
                                             sim::state_hash(*state)});
            } catch (const std::exception& e) {
              reply_best_effort(fd, Error{"app_error", e.what()});
            }
          } else if constexpr (std::is_same_v<T, Observe>) {
            if (phase != Phase::Ready) {
              violation("observe before reset");
              return;
            }
            write_frame(fd,
                        ObservationMsg{sim::observe(*state), sim::state_hash(*state)});
          } else if constexpr (std::is_same_v<T, Execute>) {
            if (phase != Phase::Ready) {
              violation("execute before reset");
              return;
            }
            try {
              actions::ActionScript script = actions::parse(m.script_text);
              auto [next, report] = sim::execute(*state, script);
              *state = std::move(next);
              write_frame(fd, ExecResultMsg{report, sim::state_hash(*state)});
            } catch (const actions::ParseError& e) {
              reply_best_effort(fd, Error{"app_error",
                                          std::string("unparsable script: ") + e.what()});
            } catch (const BridgeError&) {
              throw;  // reply write failure, not an execution failure
            } catch (const std::exception& e) {
              // e.g. a click outside the screen; state is unchanged
              reply_best_effort(fd, Error{"app_error", e.what()});
            }
          } else if constexpr (std::is_same_v<T, Shutdown>) {
            reply_best_effort(fd, Shutdown{});
            open = false;
          } else {
            violation("client sent a response-type message (" + message_type(msg) + ")");
          }
        },
        msg);
    } catch (const BridgeError&) {
      break;  // reply could not be delivered; the session is over
    }
  }

  ::close(fd);
  std::lock_guard<std::mutex> lock(mu_);
  session_fds_.erase(fd);
}

}  // namespace ace::bridge
