#pragma once

#include <functional>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "ace/bridge/protocol.hpp"

namespace ace::bridge {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = kDefaultPort;  // 0 binds an ephemeral port
  int timeout_ms = 30000;   // per-session socket read timeout
  int screen_w = 800, screen_h = 480;
};

// Builds a fresh environment state for a Reset; throwing (unknown task id,
// bad pack) turns into an app_error reply and the session stays open.
using EnvStateFactory = std::function<sim::EnvState(const std::string& task_id)>;

// Hosts simulated environments over TCP, one session per connection.
// Sessions are served concurrently; within a session requests are handled
// strictly in order (lockstep). The session state machine:
//   AwaitHello --Hello--> Idle --Reset--> Ready --(Observe|Execute|Reset)--> Ready
// Out-of-order messages get an Error{protocol_violation} reply and the
// connection closes; application failures get Error{app_error} and the
// session continues.
class BridgeServer {
 public:
  explicit BridgeServer(EnvStateFactory factory, ServerConfig config = {});
  ~BridgeServer();

  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  void start();  // bind + listen + accept thread; throws BridgeError
  void stop();   // idempotent; wakes and joins every session
  int port() const { return port_; }

 private:
  void accept_loop();
  void session(int fd);

  EnvStateFactory factory_;
  ServerConfig config_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::thread accept_thread_;
  std::mutex mu_;
  std::vector<std::thread> sessions_;
  std::set<int> session_fds_;
  bool stopping_ = false;
};

}  // namespace ace::bridge
