#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mtp {

using Json = nlohmann::ordered_json;

enum class TaskId { word_guess, movie_rec, circuit_dec, word_chain, twenty_q };

constexpr std::array<TaskId, 5> kAllTasks = {TaskId::word_guess, TaskId::movie_rec,
                                             TaskId::circuit_dec, TaskId::word_chain,
                                             TaskId::twenty_q};

const char* task_name(TaskId task);
std::optional<TaskId> parse_task(const std::string& name);

// Per-task defaults: turn budget and evaluation-suite size.
int default_max_turns(TaskId task);
int default_num_problems(TaskId task);

enum class Outcome { solved, failed, rule_violation, parse_failure, turn_limit };

const char* outcome_name(Outcome o);
std::optional<Outcome> parse_outcome(const std::string& name);

enum class Actor { agent, environment };

// Reply fed back after each turn.
struct Observation {
  std::string text;
  // Set when the next agent action must be the task's final prediction.
  bool final_turn = false;
  // Identifier of the violated rule when a rule violation ended the episode.
  std::optional<std::string> violation;
};

struct Turn {
  int index = 0;  // 1-based, contiguous
  Actor actor = Actor::agent;
  std::string agent_id;  // which agent produced an agent turn; "env" otherwise
  std::string raw_text;
  std::optional<std::string> parsed_action;
  Observation observation;
  std::uint64_t wall_time_ms = 0;
};

struct EpisodeConfig {
  TaskId task = TaskId::word_guess;
  std::uint64_t instance_id = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t sim_seed = 0;
  int max_turns = 0;  // 0 -> default_max_turns(task)
  std::optional<int> takeover_turn;  // agent B acts from this turn index on

  int effective_max_turns() const { return max_turns > 0 ? max_turns : default_max_turns(task); }
};

struct EpisodeRecord {
  EpisodeConfig config;
  Json instance;  // task-specific instance payload, enough to rebuild the env
  std::string initial_observation;
  std::vector<Turn> turns;
  Outcome outcome = Outcome::failed;
  double score = 0.0;
  int turns_taken = 0;
};

struct TaskReport {
  TaskId task = TaskId::word_guess;
  int n_episodes = 0;
  double mean_score = 0.0;
  double score_stderr = 0.0;
  std::map<int, int> turn_histogram;  // turns_taken -> episode count
  double mean_turns = 0.0;
};

// JSONL-stable serialization. Field names are part of the transcript format.
Json to_json(const Turn& t);
Json to_json(const EpisodeConfig& c);
Json to_json(const EpisodeRecord& r);
Json to_json(const TaskReport& r);

Turn turn_from_json(const Json& j);
EpisodeConfig config_from_json(const Json& j);
EpisodeRecord record_from_json(const Json& j);
TaskReport report_from_json(const Json& j);

}  // namespace mtp
