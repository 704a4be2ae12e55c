#include "ace/llm/backend.hpp"

namespace ace::llm {

std::string Backend::complete(const std::string& prompt) {
  CallRecord rec;
  rec.index = next_index_.fetch_add(1);
  rec.prompt = prompt;
  try {
    rec.reply = do_complete(prompt);
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    {
      std::lock_guard<std::mutex> lock(mu_);
      log_.push_back(std::move(rec));
    }
    throw;
  }
  std::string reply = rec.reply;
  std::lock_guard<std::mutex> lock(mu_);
  log_.push_back(std::move(rec));
  return reply;
}

std::vector<CallRecord> Backend::log() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_;
}

}  // namespace ace::llm
