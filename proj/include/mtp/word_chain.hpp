#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtp/env.hpp"
#include "mtp/rng.hpp"
#include "mtp/types.hpp"

namespace mtp::word_chain {

inline constexpr int kLexiconSize = 500;
inline constexpr int kMaxMoves = 20;  // both players' moves combined

enum class MoveCheck { ok, not_in_lexicon, already_used, wrong_letter };

const char* move_check_name(MoveCheck c);

// Environment player policies. The default mirrors nothing strategic: a
// uniform choice among the currently valid words.
enum class EnvPolicy { uniform_random, minimize_opponent_options };

struct ChainState {
  std::vector<std::string> lexicon;  // sorted, distinct
  std::vector<std::string> used;     // in play order
  std::optional<char> required_letter;

  bool is_used(const std::string& word) const;
  bool in_lexicon(const std::string& word) const;
  std::vector<std::string> valid_moves() const;
  void apply(const std::string& word);
};

struct Instance {
  std::uint64_t id = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t sim_seed = 0;
  std::vector<std::string> lexicon;

  Json to_json() const;
  static Instance from_json(const Json& j);
};

// 500 distinct words sampled from the bundled list, seed-deterministic.
std::vector<std::string> build_lexicon(Rng& rng, const std::vector<std::string>& word_pool);

MoveCheck validate_move(const ChainState& state, const std::string& word);

// A word drawn by the environment policy, or nullopt when no valid move
// exists (the game then ends without a loss).
std::optional<std::string> environment_move(const ChainState& state, Rng& rng,
                                            EnvPolicy policy = EnvPolicy::uniform_random);

std::vector<Instance> generate_instances(std::uint64_t master_seed, int count,
                                         const std::vector<std::string>& word_pool);

// 0 when the agent committed a violation (or never produced a parseable
// move), 1 when the game ended by move exhaustion or the move limit.
double adjudicate(const EpisodeRecord& record);

class Env : public EnvBase {
 public:
  Env(Instance instance, std::uint64_t sim_seed, EnvPolicy policy = EnvPolicy::uniform_random);

  TaskId task() const override { return TaskId::word_chain; }
  Observation reset() override;
  bool env_turn_pending() const override { return env_to_move_ && !terminal_; }
  Turn take_env_turn() override;
  StepResult step(const std::string& agent_text) override;

  bool agent_starts() const { return agent_starts_; }

 private:
  // Ends the game when the move budget is spent or the next player is stuck;
  // returns the closing text.
  std::optional<std::string> termination_after_move();

  Instance instance_;
  Rng rng_;
  EnvPolicy policy_;
  ChainState state_;
  bool agent_starts_ = true;
  bool env_to_move_ = false;
  int moves_total_ = 0;
};

}  // namespace mtp::word_chain
