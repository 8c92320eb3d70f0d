#pragma once

#include <array>
#include <string>
#include <vector>

#include "mtp/env.hpp"
#include "mtp/rng.hpp"
#include "mtp/types.hpp"

namespace mtp::word_guess {

inline constexpr int kWordLength = 5;
inline constexpr int kVocabularySize = 40;
inline constexpr int kNumVocabularies = 10;
inline constexpr int kMaxAttempts = 40;

enum class Mark : char { correct = 'G', present = 'Y', absent = 'B' };

struct GuessFeedback {
  std::array<Mark, kWordLength> marks{};

  bool all_correct() const;
  std::string to_string() const;  // e.g. "GYBBY"
  bool operator==(const GuessFeedback&) const = default;
};

struct Instance {
  std::uint64_t id = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t sim_seed = 0;
  int vocabulary_id = 0;
  std::vector<std::string> vocabulary;  // exactly 40 distinct 5-letter words
  std::string secret;                   // member of vocabulary

  Json to_json() const;
  static Instance from_json(const Json& j);
};

// Two-pass marking: exact-position matches first (consuming those secret
// letters), then left-to-right presence against the remaining multiset.
// Both words must be 5 lowercase letters.
GuessFeedback compute_feedback(const std::string& guess, const std::string& secret);

// Solved episodes score (max - attempts + 1) / max; unsolved score 0.
double score_episode(int attempts, bool solved, int max_turns = kMaxAttempts);

// 10 seeded vocabularies of 40 words, each word serving once as the secret.
// `word_pool` must contain at least 400 distinct 5-letter words.
std::vector<Instance> generate_instances(std::uint64_t master_seed,
                                         const std::vector<std::string>& word_pool);

class Env : public EnvBase {
 public:
  explicit Env(Instance instance);

  TaskId task() const override { return TaskId::word_guess; }
  Observation reset() override;
  StepResult step(const std::string& agent_text) override;

 private:
  Instance instance_;
  int attempts_used_ = 0;
};

}  // namespace mtp::word_guess
