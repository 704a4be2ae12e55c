#pragma once

#include <memory>

#include "ace/actions.hpp"
#include "ace/sim/desktop.hpp"

namespace ace::eval {

// What the agent loop needs from an environment. LocalEnv wraps the
// in-process simulator; the bridge client implements the same interface
// over TCP.
class Env {
 public:
  virtual ~Env() = default;

  virtual sim::Observation observe() = 0;
  virtual sim::ExecReport execute(const actions::ActionScript& script) = 0;
  virtual std::string state_hash() = 0;
  // Final state for goal checking once the episode ends.
  virtual const sim::EnvState& final_state() = 0;
};

class LocalEnv : public Env {
 public:
  explicit LocalEnv(sim::EnvState initial) : state_(std::move(initial)) {}

  sim::Observation observe() override { return sim::observe(state_); }
  sim::ExecReport execute(const actions::ActionScript& script) override {
    auto [next, report] = sim::execute(state_, script);
    state_ = std::move(next);
    return report;
  }
  std::string state_hash() override { return sim::state_hash(state_); }
  const sim::EnvState& final_state() override { return state_; }

 private:
  sim::EnvState state_;
};

}  // namespace ace::eval
