#include "mtp/episode.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mtp {

EpisodeRecord run_episode(const EpisodeConfig& config, Environment& env, AgentRoster agents,
                          const RunnerOptions& options) {
  if (!agents.primary) throw std::invalid_argument("run_episode: no primary agent");
  if (config.takeover_turn) {
    if (!agents.secondary)
      throw std::invalid_argument("run_episode: takeover configured without a second agent");
    if (*config.takeover_turn < 1 || *config.takeover_turn > config.effective_max_turns())
      throw std::invalid_argument("run_episode: takeover turn outside [1, max_turns]");
  }

  EpisodeRecord record;
  record.config = config;
  record.initial_observation = env.reset().text;

  const int max_agent_turns = config.effective_max_turns();
  int agent_turns = 0;
  int index = 0;
  bool agent_failed = false;

  while (!env.is_terminal()) {
    if (env.env_turn_pending()) {
      Turn turn = env.take_env_turn();
      turn.index = ++index;
      record.turns.push_back(std::move(turn));
      continue;
    }
    if (agent_turns >= max_agent_turns) break;

    const int turn_number = index + 1;
    Agent* actor = agents.primary;
    if (config.takeover_turn && turn_number >= *config.takeover_turn) actor = agents.secondary;

    std::string text;
    std::uint64_t elapsed_ms = 0;
    try {
      const auto t0 = std::chrono::steady_clock::now();
      text = actor->act(record);
      if (options.record_timing) {
        elapsed_ms = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                  t0)
                .count());
      }
    } catch (const AgentTransportError& e) {
      Turn turn;
      turn.index = ++index;
      turn.actor = Actor::agent;
      turn.agent_id = actor->id();
      turn.raw_text = "";
      turn.observation.text = std::string("Agent failure: ") + e.what();
      record.turns.push_back(std::move(turn));
      ++agent_turns;
      agent_failed = true;
      break;
    }

    StepResult result = env.step(text);
    Turn turn;
    turn.index = ++index;
    turn.actor = Actor::agent;
    turn.agent_id = actor->id();
    turn.raw_text = std::move(text);
    turn.parsed_action = std::move(result.parsed_action);
    turn.observation = std::move(result.obs);
    turn.wall_time_ms = elapsed_ms;
    record.turns.push_back(std::move(turn));
    ++agent_turns;
  }

  if (agent_failed) {
    record.outcome = Outcome::parse_failure;
    record.score = 0.0;
  } else if (env.is_terminal()) {
    record.outcome = env.final_outcome();
    record.score = env.final_score();
  } else {
    // The runner's budget ran out while the environment was mid-game.
    record.outcome = Outcome::turn_limit;
    record.score = env.final_score();
  }
  record.turns_taken = static_cast<int>(record.turns.size());
  return record;
}

TaskReport aggregate(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  TaskReport report;
  report.task = records.front().config.task;
  report.n_episodes = static_cast<int>(records.size());

  double sum = 0.0;
  double turn_sum = 0.0;
  for (const auto& r : records) {
    if (r.config.task != report.task)
      throw std::invalid_argument("aggregate: mixed tasks in record list");
    sum += r.score;
    turn_sum += r.turns_taken;
    ++report.turn_histogram[r.turns_taken];
  }
  report.mean_score = sum / report.n_episodes;
  report.mean_turns = turn_sum / report.n_episodes;

  if (report.n_episodes > 1) {
    double ss = 0.0;
    for (const auto& r : records) ss += (r.score - report.mean_score) * (r.score - report.mean_score);
    const double sample_std = std::sqrt(ss / (report.n_episodes - 1));
    report.score_stderr = sample_std / std::sqrt(static_cast<double>(report.n_episodes));
  }
  return report;
}

double macro_average(const std::vector<TaskReport>& reports) {
  std::set<TaskId> seen;
  for (const auto& r : reports)
    if (!seen.insert(r.task).second)
      throw std::invalid_argument(std::string("macro_average: duplicate task ") +
                                  task_name(r.task));
  for (TaskId t : kAllTasks)
    if (!seen.count(t))
      throw std::invalid_argument(std::string("macro_average: missing task ") + task_name(t));
  double sum = 0.0;
  for (const auto& r : reports) sum += r.mean_score;
  return sum / static_cast<double>(reports.size());
}

void write_jsonl(const std::string& path, const std::vector<EpisodeRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write transcript file: " + path);
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<EpisodeRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transcript file: " + path);
  std::vector<EpisodeRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": transcript schema mismatch (" + e.what() + ")");
    }
  }
  return records;
}

std::string render_report_table(const std::vector<TaskReport>& reports,
                                std::optional<double> macro) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %10s %12s %10s %11s\n", "task", "episodes",
                "mean_score", "stderr", "mean_turns");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-12s %10d %12.4f %10.4f %11.2f\n", task_name(r.task),
                  r.n_episodes, r.mean_score, r.score_stderr, r.mean_turns);
    out << line;
  }
  if (macro) {
    std::snprintf(line, sizeof(line), "%-12s %10s %12.4f\n", "macro_avg", "", *macro);
    out << line;
  }
  return out.str();
}

std::string render_histogram_csv(const std::vector<TaskReport>& reports) {
  std::ostringstream out;
  out << "task,turns,episodes\n";
  for (const auto& r : reports)
    for (const auto& [turns, count] : r.turn_histogram)
      out << task_name(r.task) << ',' << turns << ',' << count << '\n';
  return out.str();
}

}  // namespace mtp
