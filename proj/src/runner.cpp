#include "mtp/runner.hpp"

#include <atomic>
#include <thread>

namespace mtp {

TaskRunResult run_task_suite(TaskId task, const std::vector<Json>& instances,
                             const AgentFactory& primary, const SuiteRunOptions& options) {
  if (options.takeover_turn && !options.secondary)
    throw std::invalid_argument("run_task_suite: takeover configured without a secondary agent");

  TaskRunResult result;
  result.records.resize(instances.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= instances.size()) return;
      const Json& instance = instances[i];
      const EpisodeConfig config = config_for_instance(task, instance, options.takeover_turn);
      auto env = make_environment(task, instance);
      AgentPtr agent_a = primary(task, instance, config);
      AgentPtr agent_b;
      if (options.secondary) agent_b = options.secondary(task, instance, config);

      RunnerOptions runner_options;
      runner_options.record_timing = options.record_timing;
      EpisodeRecord record =
          run_episode(config, *env, {agent_a.get(), agent_b.get()}, runner_options);
      record.instance = instance;
      if (!record.turns.empty() &&
          record.turns.back().observation.text.rfind("Agent failure:", 0) == 0)
        failures.fetch_add(1);
      result.records[i] = std::move(record);
    }
  };

  const int threads = std::max(1, options.parallel);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  result.transport_failures = failures.load();
  result.report = aggregate(result.records);
  return result;
}

}  // namespace mtp
