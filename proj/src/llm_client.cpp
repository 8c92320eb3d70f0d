#include "mtp/llm_client.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

namespace mtp {

namespace {

// Caps concurrent endpoint calls across every episode in the process. One
// outstanding call per episode is the runner's job; this is the global lid.
class InflightGate {
 public:
  void configure(int limit) {
    std::unique_lock lock(mutex_);
    limit_ = std::max(1, limit);
  }
  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return active_ < limit_; });
    ++active_;
  }
  void release() {
    {
      std::unique_lock lock(mutex_);
      --active_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int limit_ = 8;
  int active_ = 0;
};

InflightGate& inflight_gate() {
  static InflightGate gate;
  return gate;
}

struct GateGuard {
  GateGuard() { inflight_gate().acquire(); }
  ~GateGuard() { inflight_gate().release(); }
};

}  // namespace

std::vector<ChatMessage> assemble_messages(const EpisodeRecord& so_far) {
  std::vector<ChatMessage> messages;
  messages.push_back({"system", so_far.initial_observation});
  for (const Turn& t : so_far.turns) {
    if (t.actor == Actor::agent) {
      messages.push_back({"assistant", t.raw_text});
      messages.push_back({"user", t.observation.text});
    } else {
      messages.push_back({"user", t.raw_text});
      if (!t.observation.text.empty()) messages.push_back({"user", t.observation.text});
    }
  }
  return messages;
}

Json messages_to_json(const std::vector<ChatMessage>& messages) {
  Json arr = Json::array();
  for (const auto& m : messages) arr.push_back(Json{{"role", m.role}, {"content", m.content}});
  return arr;
}

LlmAgent::LlmAgent(EndpointConfig config, std::string name)
    : config_(std::move(config)), name_(std::move(name)) {
  if (config_.base_url.empty()) throw ConfigError("llm endpoint base_url is empty");
  if (config_.model.empty()) throw ConfigError("llm endpoint model is empty");
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key)
      throw ConfigError("credential environment variable " + config_.api_key_env + " is not set");
    api_key_ = key;
  }
  inflight_gate().configure(config_.max_inflight);
}

std::string LlmAgent::act(const EpisodeRecord& so_far) {
  GateGuard inflight_slot;
  Json body;
  body["model"] = config_.model;
  body["messages"] = messages_to_json(assemble_messages(so_far));
  const std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(config_.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error: HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw AgentTransportError("endpoint returned HTTP " + std::to_string(res->status) + ": " +
                                res->body);
    try {
      const Json reply = Json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
      throw AgentTransportError(std::string("malformed completion payload: ") + e.what());
    }
  }
  throw AgentTransportError("llm call failed after " + std::to_string(config_.max_retries + 1) +
                            " attempts: " + last_error);
}

}  // namespace mtp
