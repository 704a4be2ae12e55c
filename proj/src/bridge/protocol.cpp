#include "ace/bridge/protocol.hpp"

#include <cerrno>
#include <cstring>

#include <sys/socket.h>
#include <unistd.h>

namespace ace::bridge {

namespace {

json require(const json& j, const char* key) {
  if (!j.contains(key))
    throw MalformedPayload(std::string("missing field '") + key + "' in " +
                           j.value("type", "?") + " payload");
  return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const json::exception& e) {
    throw MalformedPayload(std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

json message_to_json(const WireMessage& msg) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Hello>) {
          return json{{"type", "hello"},
                      {"proto", m.proto_version},
                      {"screen", json{{"w", m.screen_w}, {"h", m.screen_h}}}};
        } else if constexpr (std::is_same_v<T, Reset>) {
          return json{{"type", "reset"}, {"task_id", m.task_id}};
        } else if constexpr (std::is_same_v<T, Observe>) {
          return json{{"type", "observe"}};
        } else if constexpr (std::is_same_v<T, ObservationMsg>) {
          json j = sim::observation_to_json(m.observation);
          j["type"] = "observation";
          j["state_hash"] = m.state_hash;
          return j;
        } else if constexpr (std::is_same_v<T, Execute>) {
          return json{{"type", "execute"}, {"script", m.script_text}};
        } else if constexpr (std::is_same_v<T, ExecResultMsg>) {
          return json{{"type", "exec_result"},
                      {"report", sim::report_to_json(m.report)},
                      {"state_hash", m.state_hash}};
        } else if constexpr (std::is_same_v<T, Error>) {
          return json{{"type", "error"}, {"code", m.code}, {"detail", m.detail}};
        } else {
          return json{{"type", "shutdown"}};
        }
      },
      msg);
}

WireMessage message_from_json(const json& j) {
  if (!j.is_object()) throw MalformedPayload("payload is not a json object");
  std::string type = get_as<std::string>(j, "type");
  if (type == "hello") {
    Hello m;
    m.proto_version = get_as<std::string>(j, "proto");
    json screen = require(j, "screen");
    m.screen_w = get_as<int>(screen, "w");
    m.screen_h = get_as<int>(screen, "h");
    return m;
  }
  if (type == "reset") return Reset{get_as<std::string>(j, "task_id")};
  if (type == "observe") return Observe{};
  if (type == "observation") {
    ObservationMsg m;
    try {
      m.observation = sim::observation_from_json(j);
    } catch (const std::exception& e) {
      throw MalformedPayload(std::string("bad observation payload: ") + e.what());
    }
    m.state_hash = get_as<std::string>(j, "state_hash");
    return m;
  }
  if (type == "execute") return Execute{get_as<std::string>(j, "script")};
  if (type == "exec_result") {
    ExecResultMsg m;
    try {
      m.report = sim::report_from_json(require(j, "report"));
    } catch (const std::exception& e) {
      throw MalformedPayload(std::string("bad exec_result payload: ") + e.what());
    }
    m.state_hash = get_as<std::string>(j, "state_hash");
    return m;
  }
  if (type == "error")
    return Error{get_as<std::string>(j, "code"), get_as<std::string>(j, "detail")};
  if (type == "shutdown") return Shutdown{};
  throw MalformedPayload("unknown message type '" + type + "'");
}

std::string message_type(const WireMessage& msg) {
  return message_to_json(msg).at("type").get<std::string>();
}

std::string encode(const WireMessage& msg) {
  std::string payload = message_to_json(msg).dump();
  if (payload.size() > kMaxFrame)
    throw FrameTooLarge("payload of " + std::to_string(payload.size()) +
                        " bytes exceeds the 16 MiB frame limit");
  std::string frame;
  frame.reserve(4 + payload.size());
  uint32_t len = static_cast<uint32_t>(payload.size());
  frame.push_back(static_cast<char>((len >> 24) & 0xff));
  frame.push_back(static_cast<char>((len >> 16) & 0xff));
  frame.push_back(static_cast<char>((len >> 8) & 0xff));
  frame.push_back(static_cast<char>(len & 0xff));
  frame += payload;
  return frame;
}

WireMessage decode(const std::string& frame) {
  if (frame.size() < 4) throw MalformedPayload("frame shorter than the length prefix");
  uint32_t len = (static_cast<uint32_t>(static_cast<unsigned char>(frame[0])) << 24) |
                 (static_cast<uint32_t>(static_cast<unsigned char>(frame[1])) << 16) |
                 (static_cast<uint32_t>(static_cast<unsigned char>(frame[2])) << 8) |
                 static_cast<uint32_t>(static_cast<unsigned char>(frame[3]));
  if (len > kMaxFrame)
    throw FrameTooLarge("declared payload of " + std::to_string(len) +
                        " bytes exceeds the 16 MiB frame limit");
  if (len == 0) throw MalformedPayload("zero-length frame");
  if (frame.size() != 4u + len)
    throw MalformedPayload("frame length prefix says " + std::to_string(len) +
                           " bytes, got " + std::to_string(frame.size() - 4));
  try {
    return message_from_json(json::parse(frame.substr(4)));
  } catch (const json::exception& e) {
    throw MalformedPayload(std::string("payload is not valid json: ") + e.what());
  }
}

namespace {

void write_all(int fd, const char* data, size_t n) {
  size_t off = 0;
  while (off < n) {
    ssize_t w = ::send(fd, data + off, n - off, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw BridgeError(std::string("socket write failed: ") + std::strerror(errno));
    }
    off += static_cast<size_t>(w);
  }
}

// Returns false on clean EOF at a message boundary.
bool read_exact(int fd, char* data, size_t n, bool eof_ok) {
  size_t off = 0;
  while (off < n) {
    ssize_t r = ::recv(fd, data + off, n - off, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw BridgeError(std::string("socket read failed: ") + std::strerror(errno));
    }
    if (r == 0) {
      if (off == 0 && eof_ok) return false;
      throw BridgeError("connection closed mid-frame");
    }
    off += static_cast<size_t>(r);
  }
  return true;
}

}  // namespace

void write_frame(int fd, const WireMessage& msg) {
  std::string frame = encode(msg);
  write_all(fd, frame.data(), frame.size());
}

WireMessage read_frame(int fd) {
  char head[4];
  if (!read_exact(fd, head, 4, /*eof_ok=*/true))
    throw BridgeError("connection closed");
  uint32_t len = (static_cast<uint32_t>(static_cast<unsigned char>(head[0])) << 24) |
                 (static_cast<uint32_t>(static_cast<unsigned char>(head[1])) << 16) |
                 (static_cast<uint32_t>(static_cast<unsigned char>(head[2])) << 8) |
                 static_cast<uint32_t>(static_cast<unsigned char>(head[3]));
  if (len > kMaxFrame)
    throw FrameTooLarge("peer declared a " + std::to_string(len) + " byte payload");
  if (len == 0) throw MalformedPayload("zero-length frame");
  std::string payload(len, '\0');
  read_exact(fd, payload.data(), len, /*eof_ok=*/false);
  try {
    return message_from_json(json::parse(payload));
  } catch (const json::exception& e) {
    throw MalformedPayload(std::string("payload is not valid json: ") + e.what());
  }
}

}  // namespace ace::bridge
