#pragma once

#include "ace/llm/backend.hpp"

namespace ace::llm {

struct Timeout : BackendError {
  using BackendError::BackendError;
};
struct RetryExhausted : BackendError {
  using BackendError::BackendError;
};
struct HttpStatus : BackendError {
  HttpStatus(int code_, const std::string& msg) : BackendError(msg), code(code_) {}
  int code;
};

// OpenAI-compatible chat-completions client. One user message per call,
// temperature 0 by default. 5xx and transport failures retry with
// exponential backoff (backoff_ms, doubling); other statuses fail fast
// with HttpStatus. When attempts run out: Timeout if every failure was a
// timeout, RetryExhausted otherwise.
//
// Credentials come only from the environment: ACE_API_KEY (bearer token)
// and ACE_API_BASE (endpoint; overrides config.endpoint when set).
struct HttpConfig {
  std::string endpoint = "http://127.0.0.1:8080";
  std::string model = "gpt-4-0613";
  double temperature = 0.0;
  int timeout_ms = 30000;
  int max_retries = 3;
  int backoff_ms = 200;  // doubled after each failed attempt
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpConfig config);

  std::string name() const override { return "http:" + config_.model; }
  bool deterministic() const override { return false; }

  const HttpConfig& config() const { return config_; }

 protected:
  std::string do_complete(const std::string& prompt) override;

 private:
  HttpConfig config_;
};

}  // namespace ace::llm
