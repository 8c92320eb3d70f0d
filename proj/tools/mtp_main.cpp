#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "mtp/agents.hpp"
#include "mtp/episode.hpp"
#include "mtp/llm_client.hpp"
#include "mtp/runner.hpp"
#include "mtp/suite.hpp"

namespace fs = std::filesystem;
using namespace mtp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartialFailures = 2;
constexpr int kExitAgentUnreachable = 3;

std::vector<TaskId> select_tasks(const std::vector<std::string>& names) {
  if (names.empty()) return {kAllTasks.begin(), kAllTasks.end()};
  std::vector<TaskId> out;
  for (const auto& n : names) {
    const auto t = parse_task(n);
    if (!t) throw ConfigError("unknown task: " + n);
    out.push_back(*t);
  }
  return out;
}

struct AgentOptions {
  std::string kind = "oracle";  // oracle | random | empty | llm | human
  std::string endpoint;
  std::string model;
  std::string api_key_env = "MTP_API_KEY";
  double timeout_s = 120.0;
  int retries = 1;
  int max_inflight = 8;
};

AgentFactory make_factory(const AgentOptions& opt, const std::string& name) {
  if (opt.kind == "oracle") {
    return [](TaskId task, const Json& instance, const EpisodeConfig& config) {
      return make_oracle(task, instance, derive_seed(config.sim_seed, "oracle-secret"));
    };
  }
  if (opt.kind == "random") {
    return [](TaskId task, const Json&, const EpisodeConfig& config) {
      return std::make_unique<RandomAgent>(task, derive_seed(config.sim_seed, "random-agent"));
    };
  }
  if (opt.kind == "empty") {
    return [](TaskId, const Json&, const EpisodeConfig&) { return std::make_unique<EmptyAgent>(); };
  }
  if (opt.kind == "human") {
    return [](TaskId, const Json&, const EpisodeConfig&) { return std::make_unique<HumanAgent>(); };
  }
  if (opt.kind == "llm") {
    EndpointConfig endpoint;
    endpoint.base_url = opt.endpoint;
    endpoint.model = opt.model;
    endpoint.api_key_env = opt.api_key_env;
    endpoint.timeout_s = opt.timeout_s;
    endpoint.max_retries = opt.retries;
    endpoint.max_inflight = opt.max_inflight;
    // Fail on missing credentials or endpoint before any episode starts.
    LlmAgent probe(endpoint, name);
    return [endpoint, name](TaskId, const Json&, const EpisodeConfig&) {
      return std::make_unique<LlmAgent>(endpoint, name);
    };
  }
  throw ConfigError("unknown agent kind: " + opt.kind);
}

int cmd_generate(const std::string& data_dir, std::uint64_t seed, const std::string& out_dir,
                 const std::vector<std::string>& task_names, int count) {
  const DataPaths data = DataPaths::locate(data_dir);
  fs::create_directories(out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  int total = 0;
  for (TaskId task : select_tasks(task_names)) {
    const auto instances = generate_task_instances(task, seed, count, data);
    const std::string path = out_dir + "/" + task_name(task) + ".jsonl";
    write_instances(path, instances);
    total += static_cast<int>(instances.size());
    std::cout << task_name(task) << ": " << instances.size() << " instances -> " << path << "\n";
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  std::cout << "total: " << total << " instances in " << ms << " ms (seed " << seed << ")\n";
  return kExitOk;
}

int cmd_run(const std::string& data_dir, const std::string& suite_dir, const std::string& out_dir,
            const AgentOptions& agent_a, const AgentOptions& agent_b,
            std::optional<int> takeover_turn, const std::vector<std::string>& task_names,
            int limit, int parallel, bool record_timing) {
  (void)data_dir;
  fs::create_directories(out_dir);

  SuiteRunOptions options;
  options.parallel = agent_a.kind == "human" ? 1 : parallel;
  options.record_timing = record_timing;
  options.takeover_turn = takeover_turn;
  auto renamed = [](AgentFactory inner, std::string name) -> AgentFactory {
    return [inner = std::move(inner), name = std::move(name)](
               TaskId task, const Json& instance, const EpisodeConfig& config) -> AgentPtr {
      return std::make_unique<RenamedAgent>(inner(task, instance, config), name);
    };
  };
  AgentFactory primary = make_factory(agent_a, "agent_a");
  if (takeover_turn) {
    primary = renamed(std::move(primary), "agent_a");
    options.secondary = renamed(make_factory(agent_b, "agent_b"), "agent_b");
  }

  std::vector<TaskReport> reports;
  int transport_failures = 0;
  int episodes = 0;
  for (TaskId task : select_tasks(task_names)) {
    const std::string instance_path = suite_dir + "/" + task_name(task) + ".jsonl";
    if (!fs::exists(instance_path))
      throw ConfigError("instance file missing: " + instance_path + " (run `mtp generate`)");
    auto instances = read_instances(instance_path);
    if (limit > 0 && static_cast<int>(instances.size()) > limit)
      instances.resize(static_cast<std::size_t>(limit));

    TaskRunResult result = run_task_suite(task, instances, primary, options);
    const std::string transcript_path = out_dir + "/" + task_name(task) + ".transcripts.jsonl";
    write_jsonl(transcript_path, result.records);

    std::ofstream report_out(out_dir + "/" + task_name(task) + ".report.json");
    report_out << to_json(result.report).dump(2) << "\n";

    std::cout << task_name(task) << ": " << result.records.size() << " episodes, mean score "
              << result.report.mean_score << ", transcripts -> " << transcript_path << "\n";
    if (result.transport_failures > 0)
      std::cout << "  (" << result.transport_failures << " agent transport failures)\n";
    reports.push_back(result.report);
    transport_failures += result.transport_failures;
    episodes += static_cast<int>(result.records.size());
  }

  std::optional<double> macro;
  if (reports.size() == kAllTasks.size()) macro = macro_average(reports);
  std::cout << "\n" << render_report_table(reports, macro);
  {
    std::ofstream csv(out_dir + "/turn_histograms.csv");
    csv << render_histogram_csv(reports);
    Json summary;
    Json rs = Json::array();
    for (const auto& r : reports) rs.push_back(to_json(r));
    summary["reports"] = std::move(rs);
    summary["macro_average"] = macro ? Json(*macro) : Json(nullptr);
    std::ofstream sum(out_dir + "/summary.json");
    sum << summary.dump(2) << "\n";
  }

  if (transport_failures == episodes && episodes > 0) return kExitAgentUnreachable;
  if (transport_failures > 0) return kExitPartialFailures;
  return kExitOk;
}

int cmd_replay(const std::string& transcripts_path, const std::string& out_path) {
  const auto records = read_jsonl(transcripts_path);
  std::vector<EpisodeRecord> rescored;
  int mismatches = 0;
  for (const auto& original : records) {
    std::vector<std::string> lines;
    for (const Turn& t : original.turns)
      if (t.actor == Actor::agent) lines.push_back(t.raw_text);
    auto env = make_environment(original.config.task, original.instance);
    ScriptedAgent agent(std::move(lines), "replay");
    EpisodeRecord replayed = run_episode(original.config, *env, {&agent, nullptr});
    replayed.instance = original.instance;
    if (replayed.score != original.score) {
      ++mismatches;
      std::cout << task_name(original.config.task) << " instance "
                << original.config.instance_id << ": recorded " << original.score
                << " recomputed " << replayed.score << "\n";
    }
    rescored.push_back(std::move(replayed));
  }
  std::cout << records.size() << " episodes replayed, " << mismatches << " score mismatches\n";
  if (!out_path.empty()) write_jsonl(out_path, rescored);
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& transcript_paths, const std::string& out_dir) {
  std::map<TaskId, std::vector<EpisodeRecord>> by_task;
  for (const auto& path : transcript_paths)
    for (auto& r : read_jsonl(path)) by_task[r.config.task].push_back(std::move(r));
  if (by_task.empty()) throw ConfigError("no transcripts found");

  std::vector<TaskReport> reports;
  for (const auto& [task, records] : by_task) reports.push_back(aggregate(records));
  std::optional<double> macro;
  if (reports.size() == kAllTasks.size()) macro = macro_average(reports);
  std::cout << render_report_table(reports, macro);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream csv(out_dir + "/turn_histograms.csv");
    csv << render_histogram_csv(reports);
    Json rs = Json::array();
    for (const auto& r : reports) rs.push_back(to_json(r));
    Json summary;
    summary["reports"] = std::move(rs);
    summary["macro_average"] = macro ? Json(*macro) : Json(nullptr);
    std::ofstream sum(out_dir + "/summary.json");
    sum << summary.dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-turn puzzle suite: seeded environments, agents and reports"};
  app.set_config("--config", "", "Read options from a key=value file");
  app.require_subcommand(1);

  std::string data_dir;
  app.add_option("--data-dir", data_dir, "Directory holding words.txt and lexicons/");

  // generate
  auto* generate = app.add_subcommand("generate", "Write per-task instance files");
  std::uint64_t seed = 1;
  std::string gen_out = "suite";
  std::vector<std::string> gen_tasks;
  int gen_count = 0;
  generate->add_option("--seed", seed, "Master seed");
  generate->add_option("--out", gen_out, "Output directory");
  generate->add_option("--task", gen_tasks, "Tasks to generate (default: all)");
  generate->add_option("--count", gen_count, "Instances per task (default: task-specific)");

  // run
  auto* run = app.add_subcommand("run", "Run an agent over generated instances");
  std::string suite_dir = "suite", run_out = "results";
  std::vector<std::string> run_tasks;
  int limit = 0, parallel = 1;
  bool record_timing = false;
  AgentOptions agent_a, agent_b;
  std::optional<int> takeover_turn;
  run->add_option("--suite", suite_dir, "Directory with instance files");
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--task", run_tasks, "Tasks to run (default: all)");
  run->add_option("--limit", limit, "Run only the first N instances per task");
  run->add_option("--parallel", parallel, "Concurrent episodes");
  run->add_flag("--record-timing", record_timing,
                "Record per-turn agent wall time (breaks byte-for-byte reproducibility)");
  run->add_option("--agent", agent_a.kind, "oracle | random | empty | llm | human");
  run->add_option("--endpoint", agent_a.endpoint, "LLM endpoint base URL");
  run->add_option("--model", agent_a.model, "LLM model name");
  run->add_option("--api-key-env", agent_a.api_key_env,
                  "Environment variable holding the API key ('' disables auth)");
  run->add_option("--timeout", agent_a.timeout_s, "LLM call timeout in seconds");
  run->add_option("--retries", agent_a.retries, "LLM retry count for transport failures");
  run->add_option("--max-inflight", agent_a.max_inflight, "Concurrent LLM calls across episodes");
  int takeover_value = 0;
  auto* takeover_opt = run->add_option("--takeover-turn", takeover_value,
                                       "Turn index at which agent B takes over");
  run->add_option("--agent-b", agent_b.kind, "Agent B kind for --takeover-turn");
  run->add_option("--endpoint-b", agent_b.endpoint, "Agent B endpoint base URL");
  run->add_option("--model-b", agent_b.model, "Agent B model name");

  // replay
  auto* replay = app.add_subcommand("replay", "Re-score a transcript file without any agent");
  std::string replay_in, replay_out;
  replay->add_option("transcripts", replay_in, "Transcript JSONL file")->required();
  replay->add_option("--out", replay_out, "Write re-scored transcripts here");

  // report
  auto* report = app.add_subcommand("report", "Aggregate transcript files into reports");
  std::vector<std::string> report_in;
  std::string report_out;
  report->add_option("transcripts", report_in, "Transcript JSONL files")->required();
  report->add_option("--out", report_out, "Directory for report JSON/CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(data_dir, seed, gen_out, gen_tasks, gen_count);
    if (run->parsed()) {
      if (takeover_opt->count() > 0) takeover_turn = takeover_value;
      agent_b.api_key_env = agent_a.api_key_env;
      agent_b.timeout_s = agent_a.timeout_s;
      agent_b.retries = agent_a.retries;
      return cmd_run(data_dir, suite_dir, run_out, agent_a, agent_b, takeover_turn, run_tasks,
                     limit, parallel, record_timing);
    }
    if (replay->parsed()) return cmd_replay(replay_in, replay_out);
    if (report->parsed()) return cmd_report(report_in, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
