#include "mtp/agents.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <sstream>

#include "mtp/env.hpp"
#include "mtp/word_guess.hpp"

namespace mtp {

namespace transcript {

std::vector<std::string> word_block(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  bool in_block = false;
  std::vector<std::string> words;
  while (std::getline(in, line)) {
    const std::string t = parse::trim(line);
    if (!in_block) {
      if (t == header) in_block = true;
      continue;
    }
    if (t.empty() || t.find(':') != std::string::npos) break;
    std::istringstream ws(t);
    std::string w;
    while (ws >> w) words.push_back(w);
  }
  return words;
}

std::string last_view(const EpisodeRecord& so_far) {
  if (so_far.turns.empty()) return so_far.initial_observation;
  const Turn& last = so_far.turns.back();
  if (last.actor == Actor::environment)
    return last.raw_text + "\n" + last.observation.text;
  return last.observation.text;
}

std::optional<std::string> find_field(const std::string& text, const std::string& prefix) {
  return parse::keyword_line(text, prefix);
}

}  // namespace transcript

std::string ScriptedAgent::act(const EpisodeRecord&) {
  if (next_ >= lines_.size())
    throw AgentTransportError("scripted agent has no more lines to play");
  return lines_[next_++];
}

std::string HumanAgent::act(const EpisodeRecord& so_far) {
  std::cout << "\n=== observation ===\n" << transcript::last_view(so_far) << "\n> " << std::flush;
  std::string line;
  if (!std::getline(std::cin, line)) throw AgentTransportError("stdin closed");
  return line;
}

// ---- word guess ----

std::string WordGuessOracle::act(const EpisodeRecord& so_far) {
  std::vector<std::string> vocab =
      transcript::word_block(so_far.initial_observation, "Vocabulary:");
  std::sort(vocab.begin(), vocab.end());

  std::vector<std::string> candidates = vocab;
  for (const Turn& t : so_far.turns) {
    if (t.actor != Actor::agent) continue;
    const auto guess = transcript::find_field(t.raw_text, "GUESS:");
    const auto fb = transcript::find_field(t.observation.text, "FEEDBACK:");
    if (!guess || !fb) continue;
    const std::string g = parse::lower(parse::trim(*guess));
    std::vector<std::string> next;
    for (const auto& c : candidates)
      if (word_guess::compute_feedback(g, c).to_string() == parse::trim(*fb)) next.push_back(c);
    candidates = std::move(next);
  }
  if (candidates.empty())
    throw AgentTransportError("word-guess oracle eliminated every candidate");
  return "GUESS: " + candidates.front();
}

// ---- movie recommendation ----

namespace {

// "U07: 4.25 1.00 ..." lines following a `header` line.
std::vector<std::pair<std::string, std::vector<double>>> parse_movie_table(
    const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  bool in_block = false;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    const std::string t = parse::trim(line);
    if (!in_block) {
      if (t == header) in_block = true;
      continue;
    }
    const auto colon = t.find(':');
    if (t.empty() || colon == std::string::npos) break;
    std::pair<std::string, std::vector<double>> row;
    row.first = t.substr(0, colon);
    if (row.first.find_first_of(" \t") != std::string::npos) break;  // prose, not a row
    std::istringstream vs(t.substr(colon + 1));
    double v;
    while (vs >> v) row.second.push_back(v);
    if (row.second.empty()) break;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string MovieRecOracle::act(const EpisodeRecord& so_far) {
  const std::string view = transcript::last_view(so_far);
  const auto pos = view.find("UNSEEN movies:");
  if (pos == std::string::npos) return "ASK: S01 VS S02";

  const auto rows = parse_movie_table(view.substr(pos), "UNSEEN movies:");
  if (rows.empty()) throw AgentTransportError("movie oracle found no unseen table");
  const std::string* best_id = nullptr;
  double best = 0.0;
  for (const auto& [id, attrs] : rows) {
    if (attrs.size() != weights_.size())
      throw AgentTransportError("movie oracle: attribute count mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < attrs.size(); ++i) s += attrs[i] * weights_[i];
    if (!best_id || s > best) {
      best = s;
      best_id = &id;
    }
  }
  return "RECOMMEND: " + *best_id;
}

// ---- circuit decoding ----

std::string CircuitOracle::act(const EpisodeRecord& so_far) {
  const auto k_field = transcript::find_field(so_far.initial_observation, "INPUTS:");
  if (!k_field) throw AgentTransportError("circuit oracle: INPUTS header missing");
  const int k = std::stoi(*k_field);
  const int rows = 1 << k;

  // Outputs already collected, keyed by probed input bits.
  std::map<std::string, std::string> seen;
  for (const Turn& t : so_far.turns) {
    const auto probe = transcript::find_field(t.raw_text, "PROBE:");
    const auto outputs = transcript::find_field(t.observation.text, "OUTPUTS:");
    if (probe && outputs) seen[parse::trim(*probe)] = parse::trim(*outputs);
  }

  auto bits_of = [k](int r) {
    std::string s;
    for (int i = 0; i < k; ++i) s.push_back(((r >> (k - 1 - i)) & 1) ? '1' : '0');
    return s;
  };
  for (int r = 0; r < rows; ++r)
    if (!seen.count(bits_of(r))) return "PROBE: " + bits_of(r);

  std::ostringstream out;
  out << "TABLE:";
  for (int r = 0; r < rows; ++r) out << "\nROW " << bits_of(r) << ": " << seen.at(bits_of(r));
  return out.str();
}

// ---- word chaining ----

namespace {

struct ChainView {
  std::vector<std::string> lexicon;  // sorted
  std::vector<std::string> used;     // in play order
};

ChainView parse_chain(const EpisodeRecord& so_far) {
  ChainView view;
  view.lexicon = transcript::word_block(so_far.initial_observation, "Lexicon:");
  std::sort(view.lexicon.begin(), view.lexicon.end());
  for (const Turn& t : so_far.turns) {
    const auto word = transcript::find_field(t.raw_text, "WORD:");
    if (!word) continue;
    std::istringstream in(*word);
    std::string w;
    in >> w;
    if (!w.empty()) view.used.push_back(parse::lower(w));
  }
  return view;
}

}  // namespace

std::string WordChainOracle::act(const EpisodeRecord& so_far) {
  const ChainView view = parse_chain(so_far);
  for (const auto& w : view.lexicon) {
    if (!view.used.empty() && w.front() != view.used.back().back()) continue;
    if (std::find(view.used.begin(), view.used.end(), w) != view.used.end()) continue;
    return "WORD: " + w;
  }
  throw AgentTransportError("word-chain oracle found no valid word");
}

// ---- twenty questions ----

namespace {

// "word: h1, h2, ..." table lines following the header.
std::map<std::string, std::vector<std::string>> parse_hypernym_table(const std::string& text) {
  std::map<std::string, std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  bool in_block = false;
  while (std::getline(in, line)) {
    const std::string t = parse::trim(line);
    if (!in_block) {
      if (t == "Words and hypernyms:") in_block = true;
      continue;
    }
    const auto colon = t.find(':');
    if (t.empty() || colon == std::string::npos) break;
    const std::string word = parse::trim(t.substr(0, colon));
    std::vector<std::string> hypernyms;
    std::istringstream hs(t.substr(colon + 1));
    std::string h;
    while (std::getline(hs, h, ',')) hypernyms.push_back(parse::trim(h));
    out[word] = std::move(hypernyms);
  }
  return out;
}

struct ParsedQuestion {
  bool is_guess = false;
  std::string value;
};

std::optional<ParsedQuestion> parse_last_question(const std::string& view) {
  // Questions quote their subject: ... hypernym "mammal"? / word "dog"?
  std::istringstream in(view);
  std::string line;
  std::optional<ParsedQuestion> q;
  while (std::getline(in, line)) {
    const auto qpos = line.find("Question ");
    if (qpos == std::string::npos) continue;
    const auto open = line.find('"', qpos);
    const auto close = line.find('"', open + 1);
    if (open == std::string::npos || close == std::string::npos) continue;
    ParsedQuestion parsed;
    parsed.value = line.substr(open + 1, close - open - 1);
    parsed.is_guess = line.find("hypernym") == std::string::npos;
    q = parsed;
  }
  return q;
}

}  // namespace

std::string TwentyQOracle::act(const EpisodeRecord& so_far) {
  const auto table = parse_hypernym_table(so_far.initial_observation);
  if (table.empty()) throw AgentTransportError("twenty-q oracle found no word table");
  std::vector<std::string> words;
  for (const auto& [w, _] : table) words.push_back(w);
  const std::string secret = words[seed_ % words.size()];
  const auto& secret_hypernyms = table.at(secret);

  const auto q = parse_last_question(transcript::last_view(so_far));
  if (!q) throw AgentTransportError("twenty-q oracle found no question to answer");

  bool yes;
  if (q->is_guess) {
    yes = q->value == secret;
  } else {
    yes = std::find(secret_hypernyms.begin(), secret_hypernyms.end(), q->value) !=
          secret_hypernyms.end();
  }
  std::string reply;
  if (so_far.turns.empty()) reply = "SECRET: " + secret + "\n";
  reply += std::string("ANSWER: ") + (yes ? "yes" : "no");
  return reply;
}

// ---- random stress agent ----

std::string RandomAgent::act(const EpisodeRecord& so_far) {
  switch (task_) {
    case TaskId::word_guess: {
      auto vocab = transcript::word_block(so_far.initial_observation, "Vocabulary:");
      std::sort(vocab.begin(), vocab.end());
      return "GUESS: " + rng_.pick(vocab);
    }
    case TaskId::movie_rec: {
      const std::string view = transcript::last_view(so_far);
      if (view.find("UNSEEN movies:") != std::string::npos) {
        char id[8];
        std::snprintf(id, sizeof(id), "U%02d", static_cast<int>(rng_.below(40)) + 1);
        return std::string("RECOMMEND: ") + id;
      }
      char a[8], b[8];
      std::snprintf(a, sizeof(a), "S%02d", static_cast<int>(rng_.below(20)) + 1);
      std::snprintf(b, sizeof(b), "S%02d", static_cast<int>(rng_.below(20)) + 1);
      return std::string("ASK: ") + a + " VS " + b;
    }
    case TaskId::circuit_dec: {
      const auto k_field = transcript::find_field(so_far.initial_observation, "INPUTS:");
      const auto c_field = transcript::find_field(so_far.initial_observation, "CIRCUITS:");
      const int k = k_field ? std::stoi(*k_field) : 3;
      const int c = c_field ? std::stoi(*c_field) : 3;
      int probes = 0;
      for (const Turn& t : so_far.turns)
        if (t.parsed_action && t.parsed_action->rfind("probe:", 0) == 0) ++probes;
      auto random_bits = [&](int n) {
        std::string s;
        for (int i = 0; i < n; ++i) s.push_back(rng_.below(2) ? '1' : '0');
        return s;
      };
      if (probes >= 17 || rng_.bernoulli(0.1)) {
        std::ostringstream out;
        out << "TABLE:";
        for (int r = 0; r < (1 << k); ++r) {
          std::string bits;
          for (int i = 0; i < k; ++i) bits.push_back(((r >> (k - 1 - i)) & 1) ? '1' : '0');
          out << "\nROW " << bits << ": " << random_bits(c);
        }
        return out.str();
      }
      return "PROBE: " + random_bits(k);
    }
    case TaskId::word_chain: {
      const ChainView view = parse_chain(so_far);
      if (rng_.bernoulli(0.8)) {
        std::vector<std::string> valid;
        for (const auto& w : view.lexicon) {
          if (!view.used.empty() && w.front() != view.used.back().back()) continue;
          if (std::find(view.used.begin(), view.used.end(), w) != view.used.end()) continue;
          valid.push_back(w);
        }
        if (!valid.empty()) return "WORD: " + rng_.pick(valid);
      }
      return "WORD: " + rng_.pick(view.lexicon);
    }
    case TaskId::twenty_q: {
      std::string reply;
      if (so_far.turns.empty()) {
        const auto table = parse_hypernym_table(so_far.initial_observation);
        std::vector<std::string> words;
        for (const auto& [w, _] : table) words.push_back(w);
        reply = "SECRET: " + (words.empty() ? std::string("unknown") : rng_.pick(words)) + "\n";
      }
      reply += std::string("ANSWER: ") + (rng_.bernoulli(0.5) ? "yes" : "no");
      return reply;
    }
  }
  throw std::logic_error("RandomAgent: unknown task");
}

AgentPtr make_oracle(TaskId task, const Json& instance, std::uint64_t seed) {
  switch (task) {
    case TaskId::word_guess: return std::make_unique<WordGuessOracle>();
    case TaskId::movie_rec:
      return std::make_unique<MovieRecOracle>(instance.at("weights").get<std::vector<double>>());
    case TaskId::circuit_dec: return std::make_unique<CircuitOracle>();
    case TaskId::word_chain: return std::make_unique<WordChainOracle>();
    case TaskId::twenty_q: return std::make_unique<TwentyQOracle>(seed);
  }
  throw std::logic_error("make_oracle: unknown task");
}

}  // namespace mtp
