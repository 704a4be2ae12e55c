#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "ace/sim/desktop.hpp"
#include "ace/util.hpp"

namespace ace::bridge {

struct BridgeError : std::runtime_error {
  using runtime_error::runtime_error;
};
struct FrameTooLarge : BridgeError {
  using BridgeError::BridgeError;
};
struct MalformedPayload : BridgeError {
  using BridgeError::BridgeError;
};

inline constexpr const char* kProtoVersion = "1";
inline constexpr int kDefaultPort = 48333;
inline constexpr size_t kMaxFrame = 16u * 1024 * 1024;  // payload bytes

// ---------------------------------------------------------------------------
// Messages. Every request gets exactly one response; state_hash is the
// canonical EnvState hash after the operation.

struct Hello {
  std::string proto_version = kProtoVersion;
  int screen_w = 800, screen_h = 480;
  bool operator==(const Hello&) const = default;
};
struct Reset {
  std::string task_id;
  bool operator==(const Reset&) const = default;
};
struct Observe {
  bool operator==(const Observe&) const = default;
};
struct ObservationMsg {
  sim::Observation observation;
  std::string state_hash;
  bool operator==(const ObservationMsg&) const = default;
};
struct Execute {
  std::string script_text;
  bool operator==(const Execute&) const = default;
};
struct ExecResultMsg {
  sim::ExecReport report;
  std::string state_hash;
  bool operator==(const ExecResultMsg&) const = default;
};
struct Error {
  std::string code;  // "version_mismatch", "protocol_violation", "app_error"
  std::string detail;
  bool operator==(const Error&) const = default;
};
struct Shutdown {
  bool operator==(const Shutdown&) const = default;
};

using WireMessage = std::variant<Hello, Reset, Observe, ObservationMsg, Execute,
                                 ExecResultMsg, Error, Shutdown>;

// Payload form (UTF-8 JSON with a "type" discriminator).
json message_to_json(const WireMessage& msg);
WireMessage message_from_json(const json& j);  // throws MalformedPayload

// Frame = 4-byte big-endian payload length + payload bytes.
// decode(encode(m)) == m. Oversized payloads raise FrameTooLarge; empty or
// truncated ones raise MalformedPayload.
std::string encode(const WireMessage& msg);
WireMessage decode(const std::string& frame);

// Blocking frame IO over a connected socket. Throws BridgeError on EOF or
// socket failure (FrameTooLarge/MalformedPayload pass through).
void write_frame(int fd, const WireMessage& msg);
WireMessage read_frame(int fd);

// For diagnostics: "hello", "reset", ... (the payload type tag).
std::string message_type(const WireMessage& msg);

}  // namespace ace::bridge
