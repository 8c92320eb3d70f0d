#include <doctest.h>

#include "mtp/agents.hpp"
#include "mtp/episode.hpp"
#include "mtp/suite.hpp"
#include "mtp/word_guess.hpp"
#include "oracles.hpp"

using namespace mtp;
using namespace mtp::word_guess;

TEST_CASE("feedback marking follows the two-pass rule") {
  CHECK(compute_feedback("crane", "crane").to_string() == "GGGGG");
  CHECK(compute_feedback("crane", "crane").all_correct());
  // secret multiset {s,t,e,e,l}
  CHECK(compute_feedback("eagle", "steel").to_string() == "YBBYY");
  // the CORRECT pass consumes the single trailing 'e' first
  CHECK(compute_feedback("eerie", "crane").to_string() == "BBYBG");

  CHECK_THROWS_AS(compute_feedback("abc", "crane"), std::invalid_argument);
  CHECK_THROWS_AS(compute_feedback("cran3", "crane"), std::invalid_argument);
}

TEST_CASE("feedback matches the counting oracle on random pairs") {
  Rng rng(2024);
  const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  // biased to few letters so duplicate-letter cases are dense
  const std::string narrow = "abcde";
  for (int trial = 0; trial < 10000; ++trial) {
    const std::string& alphabet = trial % 2 == 0 ? narrow : letters;
    auto random_word = [&] {
      std::string w;
      for (int i = 0; i < 5; ++i)
        w.push_back(alphabet[static_cast<std::size_t>(rng.below(alphabet.size()))]);
      return w;
    };
    const std::string guess = random_word(), secret = random_word();
    REQUIRE(compute_feedback(guess, secret).to_string() ==
            oracles::counting_feedback(guess, secret));
  }
}

TEST_CASE("feedback is all-absent exactly when the words share no letters") {
  Rng rng(314);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string guess, secret;
    for (int i = 0; i < 5; ++i) {
      guess.push_back(static_cast<char>('a' + rng.below(8)));
      secret.push_back(static_cast<char>('a' + rng.below(8)));
    }
    bool share = false;
    for (char g : guess)
      if (secret.find(g) != std::string::npos) share = true;
    const auto fb = compute_feedback(guess, secret).to_string();
    REQUIRE((fb == "BBBBB") == !share);
  }
}

TEST_CASE("letter conservation holds against the secret multiset") {
  Rng rng(99);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string guess, secret;
    for (int i = 0; i < 5; ++i) {
      guess.push_back(static_cast<char>('a' + rng.below(6)));
      secret.push_back(static_cast<char>('a' + rng.below(6)));
    }
    const auto fb = compute_feedback(guess, secret);
    for (char ch = 'a'; ch < 'g'; ++ch) {
      int marked = 0, in_secret = 0;
      for (int i = 0; i < 5; ++i) {
        if (guess[i] == ch && fb.marks[static_cast<std::size_t>(i)] != Mark::absent) ++marked;
        if (secret[i] == ch) ++in_secret;
      }
      REQUIRE(marked <= in_secret);
    }
  }
}

TEST_CASE("episode score rewards fewer attempts") {
  CHECK(score_episode(1, true) == doctest::Approx(1.0));
  CHECK(score_episode(40, false) == doctest::Approx(0.0));
  CHECK(score_episode(40, true) == doctest::Approx(0.025));
  for (int a = 2; a <= 40; ++a) CHECK(score_episode(a, true) < score_episode(a - 1, true));
  CHECK_THROWS_AS(score_episode(0, true), std::invalid_argument);
  CHECK_THROWS_AS(score_episode(41, true), std::invalid_argument);
}

TEST_CASE("instance generation: 10 vocabularies x 40 secrets") {
  const auto words = load_word_list(DataPaths::locate().words_file());
  const auto instances = generate_instances(77, words);
  REQUIRE(instances.size() == 400);

  for (int v = 0; v < 10; ++v) {
    std::set<std::string> secrets;
    for (int s = 0; s < 40; ++s) {
      const Instance& inst = instances[static_cast<std::size_t>(v * 40 + s)];
      CHECK(inst.vocabulary_id == v);
      REQUIRE(inst.vocabulary.size() == 40);
      std::set<std::string> unique(inst.vocabulary.begin(), inst.vocabulary.end());
      CHECK(unique.size() == 40);
      for (const auto& w : inst.vocabulary) CHECK(w.size() == 5);
      CHECK(unique.count(inst.secret) == 1);
      secrets.insert(inst.secret);
    }
    // each vocabulary word serves as the secret exactly once
    CHECK(secrets.size() == 40);
  }

  const auto again = generate_instances(77, words);
  CHECK(again[123].vocabulary == instances[123].vocabulary);
  CHECK(again[123].secret == instances[123].secret);
  const auto other = generate_instances(78, words);
  CHECK(other[0].vocabulary != instances[0].vocabulary);

  const std::vector<std::string> tiny(words.begin(), words.begin() + 100);
  CHECK_THROWS_AS(generate_instances(1, tiny), std::runtime_error);
}

TEST_CASE("environment scores a played episode") {
  Instance inst;
  inst.vocabulary = {"crane", "steel", "eagle", "eerie", "about"};
  while (inst.vocabulary.size() < 40) {
    const auto n = inst.vocabulary.size();
    inst.vocabulary.push_back("w" + std::string(1, static_cast<char>('a' + n % 26)) +
                              std::string(1, static_cast<char>('a' + n / 26)) + "xy");
  }
  inst.secret = "steel";

  SUBCASE("solve in three guesses") {
    Env env(inst);
    env.reset();
    auto r = env.step("GUESS: crane");
    CHECK(r.obs.text.find("FEEDBACK:") == 0);
    CHECK_FALSE(r.terminal);
    r = env.step("GUESS: eagle");
    CHECK_FALSE(r.terminal);
    r = env.step("GUESS: steel");
    CHECK(r.terminal);
    CHECK(env.final_outcome() == Outcome::solved);
    CHECK(env.final_score() == doctest::Approx((40.0 - 3 + 1) / 40.0));
  }

  SUBCASE("malformed guesses: one reprompt then parse failure") {
    Env env(inst);
    env.reset();
    auto r = env.step("GUESS: abcdef");
    CHECK_FALSE(r.terminal);
    CHECK(r.obs.text.find("Could not parse") == 0);
    r = env.step("no guess here");
    CHECK(r.terminal);
    CHECK(env.final_outcome() == Outcome::parse_failure);
    CHECK(env.final_score() == 0.0);
  }

  SUBCASE("out-of-vocabulary guesses get normal feedback and cost attempts") {
    Env env(inst);
    env.reset();
    auto r = env.step("GUESS: zzzzz");
    CHECK_FALSE(r.terminal);
    CHECK(r.obs.text.find("FEEDBACK: BBBBB") == 0);
  }

  SUBCASE("running out of attempts") {
    Env env(inst);
    env.reset();
    for (int i = 0; i < 39; ++i) {
      auto r = env.step("GUESS: crane");
      REQUIRE_FALSE(r.terminal);
    }
    auto r = env.step("GUESS: eagle");
    CHECK(r.terminal);
    CHECK(env.final_outcome() == Outcome::turn_limit);
    CHECK(env.final_score() == 0.0);
  }
}

TEST_CASE("filtering oracle solves sampled instances within budget") {
  const auto words = load_word_list(DataPaths::locate().words_file());
  const auto instances = generate_instances(5, words);
  for (std::size_t i = 0; i < instances.size(); i += 37) {
    const Instance& inst = instances[i];
    Env env(inst);
    WordGuessOracle oracle;
    EpisodeConfig config;
    config.task = TaskId::word_guess;
    const EpisodeRecord record = run_episode(config, env, {&oracle, nullptr});
    REQUIRE(record.outcome == Outcome::solved);
    REQUIRE(record.turns_taken <= 40);
  }
}
