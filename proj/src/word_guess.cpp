#include "mtp/word_guess.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace mtp::word_guess {

bool GuessFeedback::all_correct() const {
  return std::all_of(marks.begin(), marks.end(), [](Mark m) { return m == Mark::correct; });
}

std::string GuessFeedback::to_string() const {
  std::string s;
  for (Mark m : marks) s.push_back(static_cast<char>(m));
  return s;
}

namespace {

bool is_playable_word(const std::string& w) {
  if (w.size() != kWordLength) return false;
  return std::all_of(w.begin(), w.end(),
                     [](unsigned char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

GuessFeedback compute_feedback(const std::string& guess, const std::string& secret) {
  if (!is_playable_word(guess) || !is_playable_word(secret))
    throw std::invalid_argument("compute_feedback: words must be 5 lowercase letters");

  GuessFeedback fb;
  std::array<bool, kWordLength> consumed{};  // secret positions already matched

  for (int i = 0; i < kWordLength; ++i) {
    if (guess[i] == secret[i]) {
      fb.marks[i] = Mark::correct;
      consumed[i] = true;
    } else {
      fb.marks[i] = Mark::absent;
    }
  }
  for (int i = 0; i < kWordLength; ++i) {
    if (fb.marks[i] == Mark::correct) continue;
    for (int j = 0; j < kWordLength; ++j) {
      if (!consumed[j] && secret[j] == guess[i]) {
        fb.marks[i] = Mark::present;
        consumed[j] = true;
        break;
      }
    }
  }
  return fb;
}

double score_episode(int attempts, bool solved, int max_turns) {
  if (attempts < 1 || attempts > max_turns)
    throw std::invalid_argument("score_episode: attempts out of range");
  if (!solved) return 0.0;
  return static_cast<double>(max_turns - attempts + 1) / static_cast<double>(max_turns);
}

std::vector<Instance> generate_instances(std::uint64_t master_seed,
                                         const std::vector<std::string>& word_pool) {
  std::vector<std::string> five;
  for (const auto& w : word_pool)
    if (is_playable_word(w)) five.push_back(w);
  std::sort(five.begin(), five.end());
  five.erase(std::unique(five.begin(), five.end()), five.end());
  if (five.size() < static_cast<std::size_t>(kVocabularySize * kNumVocabularies))
    throw std::runtime_error("word_guess: word pool has fewer than 400 distinct 5-letter words");

  const std::uint64_t vocab_base = derive_seed(master_seed, "word_guess.vocab");
  const std::uint64_t sim_base = derive_seed(master_seed, "word_guess.sim");

  std::vector<Instance> out;
  out.reserve(kVocabularySize * kNumVocabularies);
  for (int v = 0; v < kNumVocabularies; ++v) {
    Rng rng(derive_seed(vocab_base, static_cast<std::uint64_t>(v)));
    std::vector<std::string> vocab = rng.sample(five, kVocabularySize);
    for (int s = 0; s < kVocabularySize; ++s) {
      Instance inst;
      inst.id = static_cast<std::uint64_t>(v) * kVocabularySize + s;
      inst.instance_seed = derive_seed(vocab_base, static_cast<std::uint64_t>(v));
      inst.sim_seed = derive_seed(sim_base, inst.id);
      inst.vocabulary_id = v;
      inst.vocabulary = vocab;
      inst.secret = vocab[static_cast<std::size_t>(s)];
      out.push_back(std::move(inst));
    }
  }
  return out;
}

Json Instance::to_json() const {
  Json j;
  j["task"] = task_name(TaskId::word_guess);
  j["id"] = id;
  j["instance_seed"] = instance_seed;
  j["sim_seed"] = sim_seed;
  j["vocabulary_id"] = vocabulary_id;
  j["vocabulary"] = vocabulary;
  j["secret"] = secret;
  return j;
}

Instance Instance::from_json(const Json& j) {
  Instance inst;
  inst.id = j.at("id").get<std::uint64_t>();
  inst.instance_seed = j.at("instance_seed").get<std::uint64_t>();
  inst.sim_seed = j.at("sim_seed").get<std::uint64_t>();
  inst.vocabulary_id = j.at("vocabulary_id").get<int>();
  inst.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  inst.secret = j.at("secret").get<std::string>();
  return inst;
}

Env::Env(Instance instance) : instance_(std::move(instance)) {}

Observation Env::reset() {
  std::ostringstream out;
  out << "You are playing a secret-word guessing game.\n"
      << "One word from the vocabulary below has been chosen as the secret word. "
      << "Guess it in as few attempts as possible (at most " << kMaxAttempts << ").\n"
      << "After each guess you receive feedback, one letter per position:\n"
      << "  G = right letter, right position\n"
      << "  Y = letter occurs elsewhere in the secret word\n"
      << "  B = letter does not occur (beyond matched copies)\n"
      << "Reply with exactly one line per turn, of the form:\n"
      << "  GUESS: <5-letter word>\n"
      << "Any 5-letter word is accepted; every message costs one attempt.\n\n"
      << "Vocabulary:\n";
  for (std::size_t i = 0; i < instance_.vocabulary.size(); ++i)
    out << instance_.vocabulary[i] << ((i + 1) % 8 == 0 ? "\n" : " ");
  Observation obs;
  obs.text = out.str();
  return obs;
}

StepResult Env::step(const std::string& agent_text) {
  clear_parsed();
  ++attempts_used_;

  const auto word_field = parse::keyword_line(agent_text, "GUESS:");
  std::string guess = word_field ? parse::lower(*word_field) : std::string();
  if (!word_field || !is_playable_word(guess)) {
    // A malformed message still costs the attempt it consumed.
    if (attempts_used_ >= kMaxAttempts) {
      Observation obs;
      obs.text = "Could not parse your message and no attempts remain.";
      return finish(Outcome::turn_limit, 0.0, std::move(obs));
    }
    return reject_malformed("Reply with one line: GUESS: <5-letter word>");
  }

  set_parsed("guess:" + guess);
  const GuessFeedback fb = compute_feedback(guess, instance_.secret);

  Observation obs;
  if (fb.all_correct()) {
    obs.text = "FEEDBACK: " + fb.to_string() + "\nCorrect! The secret word was '" +
               instance_.secret + "'.";
    return finish(Outcome::solved, score_episode(attempts_used_, true), std::move(obs));
  }
  if (attempts_used_ >= kMaxAttempts) {
    obs.text = "FEEDBACK: " + fb.to_string() + "\nOut of attempts.";
    return finish(Outcome::turn_limit, 0.0, std::move(obs));
  }
  obs.text = "FEEDBACK: " + fb.to_string() + "\nAttempts remaining: " +
             std::to_string(kMaxAttempts - attempts_used_);
  return proceed(std::move(obs));
}

}  // namespace mtp::word_guess
