#pragma once

#include <functional>
#include <vector>

#include "mtp/agents.hpp"
#include "mtp/episode.hpp"
#include "mtp/suite.hpp"

namespace mtp {

// Builds the per-episode agent. Episodes never share an agent instance, so
// factories are the unit of thread safety.
using AgentFactory = std::function<AgentPtr(TaskId, const Json& instance, const EpisodeConfig&)>;

struct SuiteRunOptions {
  int parallel = 1;
  bool record_timing = false;
  std::optional<int> takeover_turn;   // requires a secondary factory
  AgentFactory secondary;             // agent B for the takeover schedule
};

struct TaskRunResult {
  std::vector<EpisodeRecord> records;  // in instance order
  TaskReport report;
  int transport_failures = 0;
};

// Runs every instance of one task. Records come back in instance order
// regardless of parallelism, so transcript files are reproducible.
TaskRunResult run_task_suite(TaskId task, const std::vector<Json>& instances,
                             const AgentFactory& primary, const SuiteRunOptions& options = {});

}  // namespace mtp
