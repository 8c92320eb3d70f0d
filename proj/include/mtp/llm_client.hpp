#pragma once

#include <string>
#include <vector>

#include "mtp/agents.hpp"
#include "mtp/types.hpp"

namespace mtp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Chat-completion endpoint over HTTP(S): messages array in, assistant text
// out. Provider specifics stay in this struct; sampling parameters are
// intentionally never set (each endpoint's defaults apply).
struct EndpointConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8808 or https://api.example.com
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "MTP_API_KEY";  // empty -> no Authorization header
  double timeout_s = 120.0;
  int max_retries = 1;    // transport failures and 5xx
  int max_inflight = 8;   // concurrent calls across all episodes
};

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

// Deterministic prompt assembly: the initial observation becomes the system
// message, agent turns become assistant messages, every environment output
// becomes a user message, all byte-for-byte.
std::vector<ChatMessage> assemble_messages(const EpisodeRecord& so_far);

Json messages_to_json(const std::vector<ChatMessage>& messages);

class LlmAgent : public Agent {
 public:
  // Validates the credential up front so misconfiguration fails before any
  // episode starts.
  explicit LlmAgent(EndpointConfig config, std::string name = "llm");

  std::string id() const override { return name_; }
  std::string act(const EpisodeRecord& so_far) override;

 private:
  EndpointConfig config_;
  std::string name_;
  std::string api_key_;
};

}  // namespace mtp
