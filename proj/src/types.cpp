#include "mtp/types.hpp"

#include <stdexcept>

namespace mtp {

const char* task_name(TaskId task) {
  switch (task) {
    case TaskId::word_guess: return "word_guess";
    case TaskId::movie_rec: return "movie_rec";
    case TaskId::circuit_dec: return "circuit_dec";
    case TaskId::word_chain: return "word_chain";
    case TaskId::twenty_q: return "twenty_q";
  }
  throw std::logic_error("unknown task id");
}

std::optional<TaskId> parse_task(const std::string& name) {
  for (TaskId t : kAllTasks)
    if (name == task_name(t)) return t;
  return std::nullopt;
}

int default_max_turns(TaskId task) {
  switch (task) {
    case TaskId::word_guess: return 40;
    case TaskId::movie_rec: return 11;   // 10 questions + 1 recommendation
    case TaskId::circuit_dec: return 19; // 18 probes + 1 table
    case TaskId::word_chain: return 20;  // both players' moves combined
    case TaskId::twenty_q: return 21;    // 20 questions + 1 final guess
  }
  throw std::logic_error("unknown task id");
}

int default_num_problems(TaskId task) {
  switch (task) {
    case TaskId::word_guess: return 400;
    case TaskId::movie_rec: return 1000;
    case TaskId::circuit_dec: return 300;
    case TaskId::word_chain: return 400;
    case TaskId::twenty_q: return 400;
  }
  throw std::logic_error("unknown task id");
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::solved: return "solved";
    case Outcome::failed: return "failed";
    case Outcome::rule_violation: return "rule_violation";
    case Outcome::parse_failure: return "parse_failure";
    case Outcome::turn_limit: return "turn_limit";
  }
  throw std::logic_error("unknown outcome");
}

std::optional<Outcome> parse_outcome(const std::string& name) {
  for (Outcome o : {Outcome::solved, Outcome::failed, Outcome::rule_violation,
                    Outcome::parse_failure, Outcome::turn_limit})
    if (name == outcome_name(o)) return o;
  return std::nullopt;
}

Json to_json(const Turn& t) {
  Json j;
  j["index"] = t.index;
  j["actor"] = t.actor == Actor::agent ? "agent" : "environment";
  j["agent"] = t.agent_id;
  j["raw_text"] = t.raw_text;
  j["parsed_action"] = t.parsed_action ? Json(*t.parsed_action) : Json(nullptr);
  j["observation"] = t.observation.text;
  j["final"] = t.observation.final_turn;
  j["violation"] = t.observation.violation ? Json(*t.observation.violation) : Json(nullptr);
  j["wall_time_ms"] = t.wall_time_ms;
  return j;
}

Turn turn_from_json(const Json& j) {
  Turn t;
  t.index = j.at("index").get<int>();
  t.actor = j.at("actor").get<std::string>() == "agent" ? Actor::agent : Actor::environment;
  t.agent_id = j.at("agent").get<std::string>();
  t.raw_text = j.at("raw_text").get<std::string>();
  if (!j.at("parsed_action").is_null()) t.parsed_action = j.at("parsed_action").get<std::string>();
  t.observation.text = j.at("observation").get<std::string>();
  t.observation.final_turn = j.at("final").get<bool>();
  if (!j.at("violation").is_null()) t.observation.violation = j.at("violation").get<std::string>();
  t.wall_time_ms = j.at("wall_time_ms").get<std::uint64_t>();
  return t;
}

Json to_json(const EpisodeConfig& c) {
  Json j;
  j["task"] = task_name(c.task);
  j["instance_id"] = c.instance_id;
  j["instance_seed"] = c.instance_seed;
  j["sim_seed"] = c.sim_seed;
  j["max_turns"] = c.effective_max_turns();
  j["takeover_turn"] = c.takeover_turn ? Json(*c.takeover_turn) : Json(nullptr);
  return j;
}

EpisodeConfig config_from_json(const Json& j) {
  EpisodeConfig c;
  auto task = parse_task(j.at("task").get<std::string>());
  if (!task) throw std::runtime_error("unknown task in config: " + j.at("task").dump());
  c.task = *task;
  c.instance_id = j.at("instance_id").get<std::uint64_t>();
  c.instance_seed = j.at("instance_seed").get<std::uint64_t>();
  c.sim_seed = j.at("sim_seed").get<std::uint64_t>();
  c.max_turns = j.at("max_turns").get<int>();
  if (!j.at("takeover_turn").is_null()) c.takeover_turn = j.at("takeover_turn").get<int>();
  return c;
}

Json to_json(const EpisodeRecord& r) {
  Json j;
  j["config"] = to_json(r.config);
  j["instance"] = r.instance;
  j["initial_observation"] = r.initial_observation;
  Json turns = Json::array();
  for (const auto& t : r.turns) turns.push_back(to_json(t));
  j["turns"] = std::move(turns);
  j["outcome"] = outcome_name(r.outcome);
  j["score"] = r.score;
  j["turns_taken"] = r.turns_taken;
  return j;
}

EpisodeRecord record_from_json(const Json& j) {
  EpisodeRecord r;
  r.config = config_from_json(j.at("config"));
  r.instance = j.at("instance");
  r.initial_observation = j.at("initial_observation").get<std::string>();
  for (const auto& tj : j.at("turns")) r.turns.push_back(turn_from_json(tj));
  auto outcome = parse_outcome(j.at("outcome").get<std::string>());
  if (!outcome) throw std::runtime_error("unknown outcome in record");
  r.outcome = *outcome;
  r.score = j.at("score").get<double>();
  r.turns_taken = j.at("turns_taken").get<int>();
  return r;
}

Json to_json(const TaskReport& r) {
  Json j;
  j["task"] = task_name(r.task);
  j["n_episodes"] = r.n_episodes;
  j["mean_score"] = r.mean_score;
  j["score_stderr"] = r.score_stderr;
  j["mean_turns"] = r.mean_turns;
  Json hist = Json::object();
  for (const auto& [turns, count] : r.turn_histogram) hist[std::to_string(turns)] = count;
  j["turn_histogram"] = std::move(hist);
  return j;
}

TaskReport report_from_json(const Json& j) {
  TaskReport r;
  auto task = parse_task(j.at("task").get<std::string>());
  if (!task) throw std::runtime_error("unknown task in report");
  r.task = *task;
  r.n_episodes = j.at("n_episodes").get<int>();
  r.mean_score = j.at("mean_score").get<double>();
  r.score_stderr = j.at("score_stderr").get<double>();
  r.mean_turns = j.at("mean_turns").get<double>();
  for (const auto& [k, v] : j.at("turn_histogram").items())
    r.turn_histogram[std::stoi(k)] = v.get<int>();
  return r;
}

}  // namespace mtp
