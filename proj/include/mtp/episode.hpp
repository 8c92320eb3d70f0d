#pragma once

#include <vector>

#include "mtp/agents.hpp"
#include "mtp/env.hpp"
#include "mtp/types.hpp"

namespace mtp {

struct RunnerOptions {
  // Wall time is measured around agent calls only when enabled; the default
  // keeps transcripts byte-identical across runs.
  bool record_timing = false;
};

struct AgentRoster {
  Agent* primary = nullptr;
  Agent* secondary = nullptr;  // acts from config.takeover_turn on
};

// Drives one episode: alternating agent messages and environment replies
// until the environment is terminal or the agent-turn budget is spent.
// Deterministic given (config, instance, deterministic agents).
EpisodeRecord run_episode(const EpisodeConfig& config, Environment& env, AgentRoster agents,
                          const RunnerOptions& options = {});

// Arithmetic over one task's episode records. Throws on an empty list or
// mixed tasks.
TaskReport aggregate(const std::vector<EpisodeRecord>& records);

// Unweighted mean over exactly one report per task, all five tasks present.
double macro_average(const std::vector<TaskReport>& reports);

// ---- transcript and report output ----

void write_jsonl(const std::string& path, const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> read_jsonl(const std::string& path);

std::string render_report_table(const std::vector<TaskReport>& reports,
                                std::optional<double> macro = std::nullopt);
std::string render_histogram_csv(const std::vector<TaskReport>& reports);

}  // namespace mtp
