#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ace/util.hpp"

namespace ace::llm {

struct BackendError : std::runtime_error {
  using runtime_error::runtime_error;
};

// One completion call as it went over the wire (or the rule table).
struct CallRecord {
  uint64_t index = 0;  // monotonically increasing per backend
  std::string prompt;
  std::string reply;
  bool ok = true;
  std::string error;
};

// Uniform text-completion interface. complete() assigns the call index,
// delegates to do_complete() and logs the outcome; failures are logged and
// rethrown. Safe for concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;

  std::string complete(const std::string& prompt);

  virtual std::string name() const = 0;
  virtual bool deterministic() const = 0;

  std::vector<CallRecord> log() const;
  uint64_t call_count() const { return next_index_.load(); }

 protected:
  virtual std::string do_complete(const std::string& prompt) = 0;

 private:
  mutable std::mutex mu_;
  std::vector<CallRecord> log_;
  std::atomic<uint64_t> next_index_{0};
};

}  // namespace ace::llm
