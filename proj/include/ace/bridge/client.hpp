#pragma once

#include "ace/bridge/protocol.hpp"
#include "ace/eval/env.hpp"

namespace ace::bridge {

// An Error reply from the server (the session may still be usable for
// app_error codes; protocol-level codes mean the server closed it).
struct RemoteError : BridgeError {
  RemoteError(std::string code_, const std::string& detail)
      : BridgeError("server error [" + code_ + "]: " + detail), code(std::move(code_)) {}
  std::string code;
};

struct ClientConfig {
  std::string host = "127.0.0.1";
  int port = kDefaultPort;
  int timeout_ms = 30000;
  int screen_w = 800, screen_h = 480;  // announced in the hello
};

// Lockstep request/response client. The constructor connects and performs
// the hello handshake; a protocol version mismatch surfaces as RemoteError.
class BridgeClient {
 public:
  explicit BridgeClient(ClientConfig config = {});
  ~BridgeClient();

  BridgeClient(const BridgeClient&) = delete;
  BridgeClient& operator=(const BridgeClient&) = delete;

  sim::Observation reset(const std::string& task_id, std::string* state_hash = nullptr);
  sim::Observation observe(std::string* state_hash = nullptr);
  sim::ExecReport execute(const actions::ActionScript& script,
                          std::string* state_hash = nullptr);
  void shutdown_session();  // polite goodbye; further requests fail

  const Hello& server_hello() const { return server_hello_; }

 private:
  WireMessage request(const WireMessage& msg);

  ClientConfig config_;
  int fd_ = -1;
  Hello server_hello_;
};

// eval::Env over the bridge. Keeps a shadow EnvState (the client's own copy
// of the task's initial state) advanced in lockstep with the server and
// cross-checks the server's state hash after every reset/execute; any
// divergence raises BridgeError. final_state() serves the shadow, which the
// hash checks have pinned to the server's state, so goal checking needs no
// extra wire traffic.
class RemoteEnv : public eval::Env {
 public:
  RemoteEnv(BridgeClient& client, const std::string& task_id, sim::EnvState initial);

  sim::Observation observe() override;
  sim::ExecReport execute(const actions::ActionScript& script) override;
  std::string state_hash() override { return sim::state_hash(shadow_); }
  const sim::EnvState& final_state() override { return shadow_; }

 private:
  void check(const std::string& server_hash, const char* when) const;

  BridgeClient& client_;
  sim::EnvState shadow_;
};

}  // namespace ace::bridge
