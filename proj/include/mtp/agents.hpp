#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtp/rng.hpp"
#include "mtp/types.hpp"

namespace mtp {

// Raised by transport-backed agents after their retry policy is exhausted.
// The episode runner turns it into a parse_failure episode with score 0.
struct AgentTransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An agent maps the dialogue so far (initial observation plus turns) to its
// next message. Deterministic agents must be pure functions of the
// transcript and their seed.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string id() const = 0;
  virtual std::string act(const EpisodeRecord& so_far) = 0;
};

using AgentPtr = std::unique_ptr<Agent>;

// ---- degenerate and utility agents ----

// Always sends the empty string: exercises the parse-failure path.
class EmptyAgent : public Agent {
 public:
  std::string id() const override { return "empty"; }
  std::string act(const EpisodeRecord&) override { return ""; }
};

// Replays a fixed list of messages (e.g. from a recorded transcript).
class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(std::vector<std::string> lines, std::string name = "scripted")
      : lines_(std::move(lines)), name_(std::move(name)) {}
  std::string id() const override { return name_; }
  std::string act(const EpisodeRecord& so_far) override;

 private:
  std::vector<std::string> lines_;
  std::string name_;
  std::size_t next_ = 0;
};

// Reads one line from stdin per turn, printing observations to stdout.
class HumanAgent : public Agent {
 public:
  std::string id() const override { return "human"; }
  std::string act(const EpisodeRecord& so_far) override;
};

// Relabels another agent, e.g. to tell A from B in takeover transcripts.
class RenamedAgent : public Agent {
 public:
  RenamedAgent(AgentPtr inner, std::string name)
      : inner_(std::move(inner)), name_(std::move(name)) {}
  std::string id() const override { return name_; }
  std::string act(const EpisodeRecord& so_far) override { return inner_->act(so_far); }

 private:
  AgentPtr inner_;
  std::string name_;
};

// ---- scripted oracles (verify the environments' score ceilings) ----

// Keeps only vocabulary words consistent with every feedback received and
// guesses the first survivor.
class WordGuessOracle : public Agent {
 public:
  std::string id() const override { return "oracle"; }
  std::string act(const EpisodeRecord& so_far) override;
};

// Asks fixed throwaway comparisons, then recommends the argmax of the true
// utility over the unseen table. The true weights are injected at
// construction (testing only).
class MovieRecOracle : public Agent {
 public:
  explicit MovieRecOracle(std::vector<double> true_weights)
      : weights_(std::move(true_weights)) {}
  std::string id() const override { return "oracle"; }
  std::string act(const EpisodeRecord& so_far) override;

 private:
  std::vector<double> weights_;
};

// Probes all 2^k inputs in ascending order, then reads the table off the
// collected outputs.
class CircuitOracle : public Agent {
 public:
  std::string id() const override { return "oracle"; }
  std::string act(const EpisodeRecord& so_far) override;
};

// Plays the alphabetically first valid word.
class WordChainOracle : public Agent {
 public:
  std::string id() const override { return "oracle"; }
  std::string act(const EpisodeRecord& so_far) override;
};

// Fixes a secret word (seed-chosen from the lexicon table) and answers every
// question truthfully.
class TwentyQOracle : public Agent {
 public:
  explicit TwentyQOracle(std::uint64_t seed) : seed_(seed) {}
  std::string id() const override { return "oracle"; }
  std::string act(const EpisodeRecord& so_far) override;

 private:
  std::uint64_t seed_;
};

// ---- stress agents: well-formed but random moves ----

class RandomAgent : public Agent {
 public:
  RandomAgent(TaskId task, std::uint64_t seed) : task_(task), rng_(seed) {}
  std::string id() const override { return "random"; }
  std::string act(const EpisodeRecord& so_far) override;

 private:
  TaskId task_;
  Rng rng_;
};

AgentPtr make_oracle(TaskId task, const Json& instance, std::uint64_t seed);

// ---- transcript parsing helpers shared by the oracles ----
namespace transcript {

// Words listed after a `header` line, split on whitespace, until a blank
// line or a line containing ':'.
std::vector<std::string> word_block(const std::string& text, const std::string& header);

// The last observation text the agent saw (initial observation before any
// turns; environment turns contribute their raw_text).
std::string last_view(const EpisodeRecord& so_far);

// Value of `KEY: value` on the first matching line of any observation/turn.
std::optional<std::string> find_field(const std::string& text, const std::string& prefix);

}  // namespace transcript

}  // namespace mtp
