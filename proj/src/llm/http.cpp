#include "ace/llm/http.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace ace::llm {

HttpBackend::HttpBackend(HttpConfig config) : config_(std::move(config)) {
  if (const char* base = std::getenv("ACE_API_BASE"); base && *base)
    config_.endpoint = base;
}

std::string HttpBackend::do_complete(const std::string& prompt) {
  json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv("ACE_API_KEY"); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  const int attempts = config_.max_retries + 1;
  int backoff = config_.backoff_ms;
  bool all_timeouts = true;
  std::string last_error = "no attempt made";

  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    httplib::Client cli(config_.endpoint);
    auto ms = std::chrono::milliseconds(config_.timeout_ms);
    cli.set_connection_timeout(ms);
    cli.set_read_timeout(ms);
    cli.set_write_timeout(ms);

    auto res = cli.Post("/v1/chat/completions", headers, payload, "application/json");
    if (!res) {
      auto err = res.error();
      bool is_timeout = err == httplib::Error::ConnectionTimeout ||
                        err == httplib::Error::Read || err == httplib::Error::Write;
      all_timeouts = all_timeouts && is_timeout;
      last_error = "transport error: " + httplib::to_string(err);
      continue;
    }
    if (res->status / 100 == 5) {  // transient server failure: retry
      all_timeouts = false;
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw HttpStatus(res->status, "HTTP " + std::to_string(res->status) + " from " +
                                        config_.endpoint);
    try {
      json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed completion response: ") + e.what());
    }
  }
  if (all_timeouts)
    throw Timeout("request to " + config_.endpoint + " timed out (" +
                  std::to_string(attempts) + " attempts)");
  throw RetryExhausted(last_error + " after " + std::to_string(attempts) + " attempts to " +
                       config_.endpoint);
}

}  // namespace ace::llm
