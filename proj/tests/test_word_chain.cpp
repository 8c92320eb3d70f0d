#include <doctest.h>

#include <set>

#include "mtp/agents.hpp"
#include "mtp/episode.hpp"
#include "mtp/suite.hpp"
#include "mtp/word_chain.hpp"

using namespace mtp;
using namespace mtp::word_chain;

namespace {

Instance tiny_instance(std::vector<std::string> words) {
  Instance inst;
  std::sort(words.begin(), words.end());
  inst.lexicon = std::move(words);
  return inst;
}

}  // namespace

TEST_CASE("move validation enforces all three rules") {
  ChainState state;
  state.lexicon = {"apple", "elephant", "orange", "piano", "tiger"};

  SUBCASE("any lexicon word opens") {
    CHECK(validate_move(state, "piano") == MoveCheck::ok);
    CHECK(validate_move(state, "zebra") == MoveCheck::not_in_lexicon);
  }
  SUBCASE("chain letter and reuse") {
    state.apply("piano");
    CHECK(validate_move(state, "orange") == MoveCheck::ok);
    CHECK(validate_move(state, "apple") == MoveCheck::wrong_letter);
    state.apply("orange");
    CHECK(validate_move(state, "elephant") == MoveCheck::ok);
    CHECK(validate_move(state, "orange") == MoveCheck::already_used);
  }
}

TEST_CASE("lexicon sampling: 500 distinct seed-deterministic words") {
  const auto pool = load_word_list(DataPaths::locate().words_file());
  Rng rng1(42), rng2(42), rng3(43);
  const auto lex1 = build_lexicon(rng1, pool);
  const auto lex2 = build_lexicon(rng2, pool);
  const auto lex3 = build_lexicon(rng3, pool);
  CHECK(lex1.size() == 500);
  CHECK(std::set<std::string>(lex1.begin(), lex1.end()).size() == 500);
  CHECK(lex1 == lex2);
  CHECK(lex1 != lex3);

  std::vector<std::string> small(pool.begin(), pool.begin() + 100);
  Rng rng4(1);
  CHECK_THROWS_AS(build_lexicon(rng4, small), std::runtime_error);
}

TEST_CASE("environment_move always returns a valid word or passes") {
  const auto pool = load_word_list(DataPaths::locate().words_file());
  Rng lex_rng(7);
  const auto full = build_lexicon(lex_rng, pool);
  Rng rng(8);
  int moves = 0;
  ChainState state;
  while (moves < 10000) {
    if (state.lexicon.empty() || state.valid_moves().empty()) {
      // fresh short game: a small lexicon keeps each game brief
      state = ChainState{};
      state.lexicon = rng.sample(full, 40);
      std::sort(state.lexicon.begin(), state.lexicon.end());
      continue;
    }
    const auto w = environment_move(state, rng);
    REQUIRE(w.has_value());
    REQUIRE(validate_move(state, *w) == MoveCheck::ok);
    state.apply(*w);
    ++moves;
  }
}

TEST_CASE("greedy minimization policy also plays valid words") {
  ChainState state;
  state.lexicon = {"ant", "nest", "tan", "tnt"};
  Rng rng(1);
  const auto w = environment_move(state, rng, EnvPolicy::minimize_opponent_options);
  REQUIRE(w.has_value());
  CHECK(validate_move(state, *w) == MoveCheck::ok);
}

TEST_CASE("starting player is decided by sim_seed at one half") {
  Instance inst = tiny_instance({"aa", "ab", "ba", "bb"});
  int agent_first = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Env env(inst, seed);
    if (env.agent_starts()) ++agent_first;
  }
  CHECK(agent_first > 450);
  CHECK(agent_first < 550);
}

TEST_CASE("episode flow: violations, success endings, chain property") {
  const auto pool = load_word_list(DataPaths::locate().words_file());
  auto instances = generate_instances(21, 5, pool);

  SUBCASE("agent violation loses immediately") {
    Env env(instances[0], /*sim_seed=*/3);
    env.reset();
    while (env.env_turn_pending()) env.take_env_turn();
    const auto r = env.step("WORD: zzzznotaword");
    CHECK(r.terminal);
    CHECK(env.final_outcome() == Outcome::rule_violation);
    CHECK(env.final_score() == 0.0);
    CHECK(r.obs.violation == "not_in_lexicon");
  }

  SUBCASE("greedy oracle always ends without loss") {
    for (const auto& inst : instances) {
      Env env(inst, inst.sim_seed);
      WordChainOracle oracle;
      EpisodeConfig config;
      config.task = TaskId::word_chain;
      const EpisodeRecord record = run_episode(config, env, {&oracle, nullptr});
      REQUIRE(record.outcome == Outcome::solved);
      REQUIRE(record.score == 1.0);
      REQUIRE(adjudicate(record) == 1.0);
      REQUIRE(record.turns_taken <= 20);

      // chain property over the transcript
      std::vector<std::string> played;
      for (const auto& t : record.turns) {
        if (!t.parsed_action || t.parsed_action->rfind("word:", 0) != 0) continue;
        played.push_back(t.parsed_action->substr(5));
      }
      for (std::size_t i = 1; i < played.size(); ++i)
        REQUIRE(played[i].front() == played[i - 1].back());
      std::set<std::string> unique(played.begin(), played.end());
      REQUIRE(unique.size() == played.size());
    }
  }

  SUBCASE("environment play is reproducible under a fixed sim seed") {
    auto run_once = [&] {
      Env env(instances[1], 99);
      WordChainOracle oracle;
      EpisodeConfig config;
      config.task = TaskId::word_chain;
      return to_json(run_episode(config, env, {&oracle, nullptr})).dump();
    };
    CHECK(run_once() == run_once());
  }

  SUBCASE("exhaustion ends the game without loss") {
    // two-word lexicon: the chain dies quickly, nobody loses
    Instance inst = tiny_instance({"ab", "ba", "ca", "dd"});
    Env env(inst, 5);
    WordChainOracle oracle;
    EpisodeConfig config;
    config.task = TaskId::word_chain;
    const EpisodeRecord record = run_episode(config, env, {&oracle, nullptr});
    CHECK(record.outcome == Outcome::solved);
    CHECK(record.score == 1.0);
    CHECK(record.turns_taken < 20);
  }

  SUBCASE("turn limit ending scores 1") {
    // a dense lexicon that cannot run out within 20 moves
    std::vector<std::string> words;
    for (char a = 'a'; a <= 'e'; ++a)
      for (char b = 'a'; b <= 'e'; ++b)
        words.push_back(std::string(1, a) + "x" + std::string(1, b));
    Instance inst = tiny_instance(words);
    Env env(inst, 17);
    WordChainOracle oracle;
    EpisodeConfig config;
    config.task = TaskId::word_chain;
    const EpisodeRecord record = run_episode(config, env, {&oracle, nullptr});
    CHECK(record.outcome == Outcome::solved);
    CHECK(record.turns_taken == 20);
  }
}
