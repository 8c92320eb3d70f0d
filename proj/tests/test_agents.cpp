#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "mtp/agents.hpp"
#include "mtp/episode.hpp"
#include "mtp/llm_client.hpp"

using namespace mtp;

namespace {

EpisodeRecord sample_record() {
  EpisodeRecord record;
  record.initial_observation = "SYS";
  Turn t1;
  t1.index = 1;
  t1.actor = Actor::agent;
  t1.agent_id = "a";
  t1.raw_text = "A1";
  t1.observation.text = "O1";
  record.turns.push_back(t1);
  Turn t2;
  t2.index = 2;
  t2.actor = Actor::environment;
  t2.agent_id = "env";
  t2.raw_text = "E1";
  record.turns.push_back(t2);
  Turn t3;
  t3.index = 3;
  t3.actor = Actor::agent;
  t3.agent_id = "a";
  t3.raw_text = "A2";
  t3.observation.text = "O2";
  record.turns.push_back(t3);
  return record;
}

// Serves a canned chat-completion response; can fail the first N calls.
class StubServer {
 public:
  explicit StubServer(std::string reply, int fail_first = 0)
      : reply_(std::move(reply)), fail_remaining_(fail_first) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      last_body_ = req.body;
      ++calls_;
      if (fail_remaining_ > 0) {
        --fail_remaining_;
        res.status = 500;
        res.set_content("boom", "text/plain");
        return;
      }
      Json body;
      body["choices"] = Json::array({Json{{"message", Json{{"role", "assistant"},
                                                           {"content", reply_}}}}});
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int calls() const { return calls_; }
  std::string last_body() const { return last_body_; }

 private:
  httplib::Server server_;
  std::string reply_;
  std::atomic<int> fail_remaining_;
  std::atomic<int> calls_{0};
  std::string last_body_;
  int port_ = 0;
  std::thread thread_;
};

EndpointConfig stub_config(const StubServer& server) {
  EndpointConfig config;
  config.base_url = server.url();
  config.model = "stub-model";
  config.api_key_env = "";  // the stub needs no credential
  config.timeout_s = 5.0;
  return config;
}

}  // namespace

TEST_CASE("prompt assembly maps roles and preserves text byte-for-byte") {
  const EpisodeRecord record = sample_record();
  const auto messages = assemble_messages(record);
  REQUIRE(messages.size() == 6);
  CHECK(messages[0].role == "system");
  CHECK(messages[0].content == "SYS");
  CHECK(messages[1].role == "assistant");
  CHECK(messages[1].content == "A1");
  CHECK(messages[2].role == "user");
  CHECK(messages[2].content == "O1");
  CHECK(messages[3].role == "user");
  CHECK(messages[3].content == "E1");
  CHECK(messages[4].role == "assistant");
  CHECK(messages[5].role == "user");

  // golden file pins the wire format
  std::ifstream golden(std::string(MTP_SOURCE_DIR) + "/tests/data/golden_prompt.json");
  REQUIRE(golden.good());
  std::string expected((std::istreambuf_iterator<char>(golden)),
                       std::istreambuf_iterator<char>());
  while (!expected.empty() && (expected.back() == '\n' || expected.back() == ' '))
    expected.pop_back();
  CHECK(messages_to_json(messages).dump() == expected);
}

TEST_CASE("llm agent round-trips through a stub endpoint") {
  StubServer server("GUESS: crane");
  LlmAgent agent(stub_config(server));
  EpisodeRecord record;
  record.initial_observation = "guess a word";
  CHECK(agent.act(record) == "GUESS: crane");
  CHECK(server.calls() == 1);

  // the request body carries model and messages
  const Json body = Json::parse(server.last_body());
  CHECK(body.at("model") == "stub-model");
  CHECK(body.at("messages").size() == 1);
  CHECK(body.at("messages")[0].at("role") == "system");
}

TEST_CASE("llm agent retries a 500 once, then succeeds") {
  StubServer server("WORD: piano", /*fail_first=*/1);
  EndpointConfig config = stub_config(server);
  config.max_retries = 1;
  LlmAgent agent(config);
  EpisodeRecord record;
  record.initial_observation = "hi";
  CHECK(agent.act(record) == "WORD: piano");
  CHECK(server.calls() == 2);
}

TEST_CASE("llm agent surfaces persistent failures as transport errors") {
  StubServer server("never", /*fail_first=*/10);
  EndpointConfig config = stub_config(server);
  config.max_retries = 1;
  LlmAgent agent(config);
  EpisodeRecord record;
  CHECK_THROWS_AS(agent.act(record), AgentTransportError);
  CHECK(server.calls() == 2);  // initial + one retry
}

TEST_CASE("missing credential fails before any episode starts") {
  EndpointConfig config;
  config.base_url = "http://127.0.0.1:9";
  config.model = "m";
  config.api_key_env = "MTP_TEST_KEY_THAT_DOES_NOT_EXIST";
  CHECK_THROWS_AS(LlmAgent{config}, ConfigError);

  ::setenv("MTP_TEST_KEY_SET", "sk-123", 1);
  config.api_key_env = "MTP_TEST_KEY_SET";
  CHECK_NOTHROW(LlmAgent{config});
}

TEST_CASE("scripted agent replays lines then reports exhaustion") {
  ScriptedAgent agent({"one", "two"});
  EpisodeRecord record;
  CHECK(agent.act(record) == "one");
  CHECK(agent.act(record) == "two");
  CHECK_THROWS_AS(agent.act(record), AgentTransportError);
}
