#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mtp/agents.hpp"
#include "mtp/episode.hpp"
#include "mtp/runner.hpp"
#include "mtp/suite.hpp"

using namespace mtp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

AgentFactory oracle_factory() {
  return [](TaskId task, const Json& instance, const EpisodeConfig& config) {
    return make_oracle(task, instance, derive_seed(config.sim_seed, "oracle-secret"));
  };
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MTP_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mtp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("per-task instance payloads rebuild their environments") {
  const DataPaths data = DataPaths::locate();
  for (TaskId task : kAllTasks) {
    const auto instances = generate_task_instances(task, 99, 3, data);
    REQUIRE(instances.size() == 3);
    for (const auto& instance : instances) {
      CHECK(instance.at("task") == task_name(task));
      auto env = make_environment(task, instance);
      CHECK(env->task() == task);
      const Observation obs = env->reset();
      CHECK_FALSE(obs.text.empty());
      CHECK_FALSE(env->is_terminal());
    }
  }
}

TEST_CASE("suite runner: records stay in instance order under parallelism") {
  const DataPaths data = DataPaths::locate();
  const auto instances = generate_task_instances(TaskId::circuit_dec, 5, 8, data);

  SuiteRunOptions serial;
  serial.parallel = 1;
  const TaskRunResult a = run_task_suite(TaskId::circuit_dec, instances, oracle_factory(), serial);

  SuiteRunOptions threaded;
  threaded.parallel = 4;
  const TaskRunResult b =
      run_task_suite(TaskId::circuit_dec, instances, oracle_factory(), threaded);

  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(to_json(a.records[i]).dump() == to_json(b.records[i]).dump());
  CHECK(a.report.mean_score == doctest::Approx(1.0));
  CHECK(a.transport_failures == 0);
}

TEST_CASE("jsonl transcripts round trip through files") {
  const DataPaths data = DataPaths::locate();
  const auto instances = generate_task_instances(TaskId::word_guess, 4, 2, data);
  const TaskRunResult result =
      run_task_suite(TaskId::word_guess, instances, oracle_factory());

  TempDir dir;
  const std::string path = dir.str() + "/t.jsonl";
  write_jsonl(path, result.records);
  const auto back = read_jsonl(path);
  REQUIRE(back.size() == result.records.size());
  for (std::size_t i = 0; i < back.size(); ++i)
    CHECK(to_json(back[i]).dump() == to_json(result.records[i]).dump());

  // report arithmetic recomputed from the transcript file matches exactly
  const TaskReport recomputed = aggregate(back);
  CHECK(std::abs(recomputed.mean_score - result.report.mean_score) <= 1e-12);
  CHECK(recomputed.turn_histogram == result.report.turn_histogram);
}

TEST_CASE("takeover runs attribute the final turn to agent B") {
  const DataPaths data = DataPaths::locate();
  const auto instances = generate_task_instances(TaskId::movie_rec, 6, 5, data);

  auto named = [](const char* name) {
    return [name](TaskId task, const Json& instance, const EpisodeConfig& config) -> AgentPtr {
      return std::make_unique<RenamedAgent>(
          make_oracle(task, instance, derive_seed(config.sim_seed, "oracle-secret")), name);
    };
  };
  SuiteRunOptions options;
  options.takeover_turn = 11;
  options.secondary = named("B");
  const TaskRunResult result =
      run_task_suite(TaskId::movie_rec, instances, named("A"), options);

  for (const auto& record : result.records) {
    REQUIRE(record.turns.size() == 11);
    for (int i = 0; i < 10; ++i) CHECK(record.turns[static_cast<std::size_t>(i)].agent_id == "A");
    CHECK(record.turns[10].agent_id == "B");
  }
  CHECK(result.report.mean_score == doctest::Approx(1.0));
}

TEST_CASE("cli: generate is idempotent, run/replay/report work end to end") {
  TempDir suite, results;
  const std::string gen_args = "generate --seed 5 --count 3 --out " + suite.str();
  REQUIRE(run_cli(gen_args) == 0);
  const std::string first = slurp(suite.str() + "/word_chain.jsonl");
  for (TaskId task : kAllTasks)
    CHECK(fs::exists(suite.path / (std::string(task_name(task)) + ".jsonl")));

  REQUIRE(run_cli(gen_args) == 0);
  CHECK(slurp(suite.str() + "/word_chain.jsonl") == first);

  REQUIRE(run_cli("run --agent oracle --suite " + suite.str() + " --out " + results.str()) == 0);
  CHECK(fs::exists(results.path / "twenty_q.transcripts.jsonl"));
  CHECK(fs::exists(results.path / "summary.json"));
  CHECK(fs::exists(results.path / "turn_histograms.csv"));

  REQUIRE(run_cli("replay " + results.str() + "/circuit_dec.transcripts.jsonl") == 0);
  REQUIRE(run_cli("report " + results.str() + "/circuit_dec.transcripts.jsonl") == 0);
}

TEST_CASE("cli: configuration errors exit with code 1") {
  CHECK(run_cli("run --agent nosuchkind --suite /nonexistent") == 1);
  CHECK(run_cli("run --agent llm --suite /nonexistent") == 1);  // endpoint missing
  CHECK(run_cli("replay /nonexistent/file.jsonl") == 1);
}

TEST_CASE("cli: an unreachable endpoint exits with code 3") {
  TempDir suite, results;
  REQUIRE(run_cli("generate --seed 2 --count 1 --task word_guess --out " + suite.str()) == 0);
  // nothing listens on this port; every episode fails in transport
  const int code = run_cli("run --agent llm --endpoint http://127.0.0.1:9 --model m "
                           "--api-key-env '' --retries 0 --task word_guess --suite " +
                           suite.str() + " --out " + results.str());
  CHECK(code == 3);
}
