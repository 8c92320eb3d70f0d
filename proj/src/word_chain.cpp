#include "mtp/word_chain.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace mtp::word_chain {

const char* move_check_name(MoveCheck c) {
  switch (c) {
    case MoveCheck::ok: return "ok";
    case MoveCheck::not_in_lexicon: return "not_in_lexicon";
    case MoveCheck::already_used: return "already_used";
    case MoveCheck::wrong_letter: return "wrong_letter";
  }
  throw std::logic_error("unknown move check");
}

bool ChainState::in_lexicon(const std::string& word) const {
  return std::binary_search(lexicon.begin(), lexicon.end(), word);
}

bool ChainState::is_used(const std::string& word) const {
  return std::find(used.begin(), used.end(), word) != used.end();
}

std::vector<std::string> ChainState::valid_moves() const {
  std::vector<std::string> out;
  for (const auto& w : lexicon) {
    if (required_letter && w.front() != *required_letter) continue;
    if (is_used(w)) continue;
    out.push_back(w);
  }
  return out;
}

void ChainState::apply(const std::string& word) {
  used.push_back(word);
  required_letter = word.back();
}

std::vector<std::string> build_lexicon(Rng& rng, const std::vector<std::string>& word_pool) {
  std::vector<std::string> pool(word_pool);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (pool.size() < kLexiconSize)
    throw std::runtime_error("word_chain: word pool smaller than 500 words");
  std::vector<std::string> lex = rng.sample(pool, kLexiconSize);
  std::sort(lex.begin(), lex.end());
  return lex;
}

MoveCheck validate_move(const ChainState& state, const std::string& word) {
  if (!state.in_lexicon(word)) return MoveCheck::not_in_lexicon;
  if (state.is_used(word)) return MoveCheck::already_used;
  if (state.required_letter && word.front() != *state.required_letter)
    return MoveCheck::wrong_letter;
  return MoveCheck::ok;
}

std::optional<std::string> environment_move(const ChainState& state, Rng& rng, EnvPolicy policy) {
  const std::vector<std::string> valid = state.valid_moves();
  if (valid.empty()) return std::nullopt;
  if (policy == EnvPolicy::uniform_random) return rng.pick(valid);

  // minimize_opponent_options: leave the opponent the fewest replies.
  std::size_t best_count = SIZE_MAX;
  const std::string* best = nullptr;
  for (const auto& w : valid) {
    ChainState next = state;
    next.apply(w);
    const std::size_t options = next.valid_moves().size();
    if (options < best_count) {
      best_count = options;
      best = &w;
    }
  }
  return *best;
}

std::vector<Instance> generate_instances(std::uint64_t master_seed, int count,
                                         const std::vector<std::string>& word_pool) {
  const std::uint64_t inst_base = derive_seed(master_seed, "word_chain.instance");
  const std::uint64_t sim_base = derive_seed(master_seed, "word_chain.sim");
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Instance inst;
    inst.id = static_cast<std::uint64_t>(i);
    inst.instance_seed = derive_seed(inst_base, static_cast<std::uint64_t>(i));
    inst.sim_seed = derive_seed(sim_base, static_cast<std::uint64_t>(i));
    Rng rng(inst.instance_seed);
    inst.lexicon = build_lexicon(rng, word_pool);
    out.push_back(std::move(inst));
  }
  return out;
}

double adjudicate(const EpisodeRecord& record) {
  if (record.outcome == Outcome::solved) return 1.0;
  return 0.0;
}

Json Instance::to_json() const {
  Json j;
  j["task"] = task_name(TaskId::word_chain);
  j["id"] = id;
  j["instance_seed"] = instance_seed;
  j["sim_seed"] = sim_seed;
  j["lexicon"] = lexicon;
  return j;
}

Instance Instance::from_json(const Json& j) {
  Instance inst;
  inst.id = j.at("id").get<std::uint64_t>();
  inst.instance_seed = j.at("instance_seed").get<std::uint64_t>();
  inst.sim_seed = j.at("sim_seed").get<std::uint64_t>();
  inst.lexicon = j.at("lexicon").get<std::vector<std::string>>();
  return inst;
}

Env::Env(Instance instance, std::uint64_t sim_seed, EnvPolicy policy)
    : instance_(std::move(instance)), rng_(sim_seed), policy_(policy) {
  state_.lexicon = instance_.lexicon;
  agent_starts_ = rng_.bernoulli(0.5);
}

Observation Env::reset() {
  env_to_move_ = !agent_starts_;
  std::ostringstream out;
  out << "You are playing a word-chaining game against the environment.\n"
      << "Players alternate picking words from the lexicon below. Rules:\n"
      << "  1. after the first word, each word must start with the final letter of the previous "
         "word\n"
      << "  2. no word may be used twice\n"
      << "Breaking a rule loses immediately. The game ends successfully when no valid\n"
      << "word remains for the player to move, or after " << kMaxMoves << " combined moves.\n"
      << "Reply with exactly one line per turn:\n"
      << "  WORD: <word>\n"
      << (agent_starts_ ? "You move first.\n" : "The environment moves first.\n") << "\nLexicon:\n";
  for (std::size_t i = 0; i < state_.lexicon.size(); ++i)
    out << state_.lexicon[i] << ((i + 1) % 10 == 0 ? "\n" : " ");
  Observation obs;
  obs.text = out.str();
  return obs;
}

std::optional<std::string> Env::termination_after_move() {
  if (moves_total_ >= kMaxMoves) return "END: move limit reached without a violation.";
  if (state_.valid_moves().empty()) return "END: no valid words remain.";
  return std::nullopt;
}

Turn Env::take_env_turn() {
  if (!env_turn_pending()) throw std::logic_error("word_chain: environment has no pending turn");
  Turn turn;
  turn.actor = Actor::environment;
  turn.agent_id = "env";

  const auto word = environment_move(state_, rng_, policy_);
  if (!word) {
    // No valid move: a non-loss ending.
    terminal_ = true;
    outcome_ = Outcome::solved;
    score_ = 1.0;
    turn.raw_text = "PASS";
    turn.observation.text = "END: no valid words remain.";
    env_to_move_ = false;
    return turn;
  }
  state_.apply(*word);
  ++moves_total_;
  turn.raw_text = "WORD: " + *word;
  turn.parsed_action = "word:" + *word;
  if (const auto end_text = termination_after_move()) {
    terminal_ = true;
    outcome_ = Outcome::solved;
    score_ = 1.0;
    turn.observation.text = *end_text;
  } else {
    turn.observation.text = "Your move. Required first letter: " + std::string(1, *state_.required_letter);
  }
  env_to_move_ = false;
  return turn;
}

StepResult Env::step(const std::string& agent_text) {
  clear_parsed();
  ++moves_total_;

  const auto word_field = parse::keyword_line(agent_text, "WORD:");
  if (!word_field || word_field->empty() ||
      word_field->find_first_of(" \t") != std::string::npos) {
    // A malformed message burns a move like any other.
    if (moves_total_ >= kMaxMoves) {
      Observation obs;
      obs.text = "Could not parse your message and the move limit is reached.";
      return finish(Outcome::solved, 1.0, std::move(obs));
    }
    return reject_malformed("Reply with one line: WORD: <word>");
  }
  const std::string word = parse::lower(*word_field);
  set_parsed("word:" + word);

  const MoveCheck check = validate_move(state_, word);
  if (check != MoveCheck::ok) {
    Observation obs;
    obs.text = std::string("Rule violation (") + move_check_name(check) +
               "): '" + word + "'. You lose.";
    obs.violation = move_check_name(check);
    return finish(Outcome::rule_violation, 0.0, std::move(obs));
  }
  state_.apply(word);

  Observation obs;
  if (const auto end_text = termination_after_move()) {
    obs.text = *end_text;
    return finish(Outcome::solved, 1.0, std::move(obs));
  }
  env_to_move_ = true;
  obs.text = "Accepted.";
  return proceed(std::move(obs));
}

}  // namespace mtp::word_chain
