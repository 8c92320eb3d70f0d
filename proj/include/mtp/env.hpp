#pragma once

#include <stdexcept>
#include <string>

#include "mtp/types.hpp"

namespace mtp {

struct StepResult {
  Observation obs;
  std::optional<std::string> parsed_action;
  bool terminal = false;
};

// One environment instance drives exactly one episode. Construction takes the
// puzzle instance plus the simulator seed; after that the environment is a
// deterministic state machine over agent messages.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual TaskId task() const = 0;

  // Initial instruction/observation. Called once before any step.
  virtual Observation reset() = 0;

  // True when the environment itself acts next (word chaining moves).
  virtual bool env_turn_pending() const { return false; }
  virtual Turn take_env_turn() { throw std::logic_error("environment has no pending turn"); }

  virtual StepResult step(const std::string& agent_text) = 0;

  virtual bool is_terminal() const = 0;
  // Valid once terminal; best effort if the runner cuts the episode short.
  virtual Outcome final_outcome() const = 0;
  virtual double final_score() const = 0;
};

// Shared plumbing: terminal bookkeeping and the malformed-output policy
// (one reprompt with a format reminder per episode, then the episode ends
// as a parse failure with score 0).
class EnvBase : public Environment {
 public:
  bool is_terminal() const override { return terminal_; }
  Outcome final_outcome() const override { return outcome_; }
  double final_score() const override { return score_; }

 protected:
  StepResult proceed(Observation obs) { return {std::move(obs), parsed_, false}; }

  StepResult finish(Outcome outcome, double score, Observation obs) {
    terminal_ = true;
    outcome_ = outcome;
    score_ = score;
    return {std::move(obs), parsed_, true};
  }

  StepResult reject_malformed(const std::string& reminder) {
    parsed_ = std::nullopt;
    if (!reprompt_used_) {
      reprompt_used_ = true;
      Observation obs;
      obs.text = "Could not parse your message. " + reminder;
      return proceed(std::move(obs));
    }
    Observation obs;
    obs.text = "Could not parse your message again; the episode ends.";
    return finish(Outcome::parse_failure, 0.0, std::move(obs));
  }

  void set_parsed(std::string action) { parsed_ = std::move(action); }
  void clear_parsed() { parsed_ = std::nullopt; }

  // Used when the runner stops an episode that the environment considers
  // still in progress.
  void mark_cut_short() {
    terminal_ = true;
    outcome_ = Outcome::turn_limit;
  }

  bool terminal_ = false;
  Outcome outcome_ = Outcome::failed;
  double score_ = 0.0;
  bool reprompt_used_ = false;
  std::optional<std::string> parsed_;
};

// Grammar helpers shared by the task environments.
namespace parse {

// Returns the trimmed remainder of the first line starting with `prefix`
// (case-sensitive), or nullopt.
std::optional<std::string> keyword_line(const std::string& text, const std::string& prefix);

std::string trim(const std::string& s);
std::string lower(std::string s);

}  // namespace parse

}  // namespace mtp
