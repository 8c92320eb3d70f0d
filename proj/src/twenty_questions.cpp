#include "mtp/twenty_questions.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mtp::twenty_q {

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> subtract(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const LexiconEntry& a, const LexiconEntry& b) { return a.word < b.word; });
  for (auto& e : entries_) std::sort(e.hypernyms.begin(), e.hypernyms.end());
  for (int i = 0; i < size(); ++i) {
    word_index_[entries_[static_cast<std::size_t>(i)].word] = i;
    for (const auto& h : entries_[static_cast<std::size_t>(i)].hypernyms)
      holders_[h].push_back(i);
  }
  for (const auto& [h, _] : holders_) hypernym_union_.push_back(h);
}

std::optional<int> Lexicon::index_of(const std::string& word) const {
  const auto it = word_index_.find(word);
  if (it == word_index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<int>& Lexicon::holders(const std::string& hypernym) const {
  static const std::vector<int> kEmpty;
  const auto it = holders_.find(hypernym);
  return it == holders_.end() ? kEmpty : it->second;
}

bool Lexicon::word_has(int word_idx, const std::string& hypernym) const {
  const auto& hs = entry(word_idx).hypernyms;
  return std::binary_search(hs.begin(), hs.end(), hypernym);
}

std::vector<int> Lexicon::all_indices() const {
  std::vector<int> out(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

std::string UserQuestion::render() const {
  if (kind == Kind::word_guess) return "Is your secret word \"" + value + "\"?";
  return "Does your secret word have the hypernym \"" + value + "\"?";
}

UserQuestion user_next_question(const Lexicon& lex, const ConsistencyState& st,
                                int questions_asked, Rng& rng, SimStats* stats,
                                int max_questions) {
  SimStats scratch;
  SimStats& s = stats ? *stats : scratch;
  const std::vector<int>& S = st.consistent;
  if (S.empty()) throw std::logic_error("user_next_question: no consistent words left");

  const bool forced_final = questions_asked >= max_questions;
  bool guessing = forced_final || S.size() == 1;
  if (!guessing) {
    ++s.spontaneous_draws;
    if (rng.bernoulli(0.02)) {
      ++s.spontaneous_fires;
      guessing = true;
    }
  }

  if (guessing) {
    std::vector<int> excluded = subtract(lex.all_indices(), S);
    ++s.trap_guess_draws;
    const bool trap = rng.bernoulli(0.15);
    if (trap) ++s.trap_guess_fires;
    int chosen;
    if (trap && !excluded.empty())
      chosen = rng.pick(excluded);
    else
      chosen = rng.pick(S);
    return {UserQuestion::Kind::word_guess, lex.entry(chosen).word, forced_final};
  }

  ++s.hypernym_draws;
  const double u = rng.uniform();
  enum Branch { excluded_only, all_consistent, proper_subset };
  Branch branch = u < 0.1 ? excluded_only : u < 0.2 ? all_consistent : proper_subset;
  if (branch == excluded_only) ++s.excluded_only_fires;
  if (branch == all_consistent) ++s.all_consistent_fires;
  if (branch == proper_subset) ++s.proper_subset_fires;

  std::vector<std::string> candidates;
  auto collect = [&](Branch b) {
    candidates.clear();
    for (const auto& h : lex.all_hypernyms()) {
      const std::vector<int> hs = intersect(lex.holders(h), S);
      switch (b) {
        case excluded_only:
          if (hs.empty()) candidates.push_back(h);
          break;
        case all_consistent:
          if (hs.size() == S.size()) candidates.push_back(h);
          break;
        case proper_subset:
          if (!hs.empty() && hs.size() < S.size()) candidates.push_back(h);
          break;
      }
    }
  };

  // Infeasible branches fall through: excluded-only -> proper-subset ->
  // all-of-S. The last is always satisfiable ("physical entity").
  for (Branch b : branch == excluded_only
                      ? std::vector<Branch>{excluded_only, proper_subset, all_consistent}
                  : branch == proper_subset
                      ? std::vector<Branch>{proper_subset, all_consistent}
                      : std::vector<Branch>{all_consistent}) {
    collect(b);
    if (!candidates.empty()) break;
  }
  if (candidates.empty())
    throw std::logic_error("user_next_question: no hypernym question available");
  return {UserQuestion::Kind::hypernym, rng.pick(candidates), false};
}

Adjudication adjudicate_answer(const Lexicon& lex, const ConsistencyState& st,
                               const UserQuestion& q, bool yes) {
  const std::vector<int>& S = st.consistent;
  Adjudication out;

  if (q.kind == UserQuestion::Kind::hypernym) {
    const std::vector<int>& holders = lex.holders(q.value);
    const std::vector<int> holders_in_s = intersect(holders, S);
    if (yes) {
      if (holders_in_s.empty()) {
        out.verdict = Adjudication::Verdict::contradiction;
        out.rule = "R1";
        return out;
      }
      out.next_consistent = holders_in_s;
    } else {
      if (holders_in_s.size() == S.size()) {
        out.verdict = Adjudication::Verdict::contradiction;
        out.rule = "R2";
        return out;
      }
      out.next_consistent = subtract(S, holders);
    }
  } else {
    const auto idx = lex.index_of(q.value);
    if (!idx) throw std::logic_error("adjudicate_answer: guessed word not in lexicon");
    const bool in_s = std::binary_search(S.begin(), S.end(), *idx);
    if (yes) {
      if (!in_s) {
        out.verdict = Adjudication::Verdict::contradiction;
        out.rule = "R4";
        return out;
      }
      out.verdict = Adjudication::Verdict::win;
      out.next_consistent = {*idx};
      return out;
    }
    if (S.size() == 1 && in_s) {
      out.verdict = Adjudication::Verdict::contradiction;
      out.rule = "R3";
      return out;
    }
    out.next_consistent = subtract(S, {*idx});
  }

  if (out.next_consistent.empty()) {
    out.verdict = Adjudication::Verdict::contradiction;
    out.rule = "R5";
    return out;
  }
  out.verdict = Adjudication::Verdict::continue_game;
  return out;
}

double score_episode(const EpisodeRecord& record) {
  return record.outcome == Outcome::solved ? 1.0 : 0.0;
}

Json Instance::to_json() const {
  Json j;
  j["task"] = task_name(TaskId::twenty_q);
  j["id"] = id;
  j["instance_seed"] = instance_seed;
  j["sim_seed"] = sim_seed;
  j["lexicon_id"] = lexicon_id;
  Json words = Json::array();
  for (const auto& e : entries)
    words.push_back(Json{{"word", e.word}, {"hypernyms", e.hypernyms}});
  j["words"] = std::move(words);
  return j;
}

Instance Instance::from_json(const Json& j) {
  Instance inst;
  inst.id = j.at("id").get<std::uint64_t>();
  inst.instance_seed = j.at("instance_seed").get<std::uint64_t>();
  inst.sim_seed = j.at("sim_seed").get<std::uint64_t>();
  inst.lexicon_id = j.at("lexicon_id").get<int>();
  for (const auto& wj : j.at("words"))
    inst.entries.push_back({wj.at("word").get<std::string>(),
                            wj.at("hypernyms").get<std::vector<std::string>>()});
  return inst;
}

TaxonomyEdges load_taxonomy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open taxonomy file: " + path);
  TaxonomyEdges edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("taxonomy line missing tab: " + line);
    edges[line.substr(0, tab)].insert(line.substr(tab + 1));
  }
  return edges;
}

std::map<std::string, std::vector<std::string>> hypernym_closures(const TaxonomyEdges& edges) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [node, _] : edges) {
    std::set<std::string> closure;
    std::vector<std::string> stack{node};
    while (!stack.empty()) {
      const std::string cur = stack.back();
      stack.pop_back();
      const auto it = edges.find(cur);
      if (it == edges.end()) continue;
      for (const auto& parent : it->second)
        if (closure.insert(parent).second) stack.push_back(parent);
    }
    out[node].assign(closure.begin(), closure.end());
  }
  return out;
}

std::vector<std::vector<LexiconEntry>> build_lexicons(const TaxonomyEdges& edges,
                                                      const std::set<std::string>& word_list,
                                                      std::uint64_t seed, int target_size,
                                                      int min_size, int max_size) {
  const auto closures = hypernym_closures(edges);

  // Candidate words: single tokens present in the word list.
  std::vector<std::string> candidates;
  for (const auto& [node, closure] : closures) {
    if (node.find(' ') != std::string::npos) continue;
    if (!word_list.count(node)) continue;
    if (closure.size() < 7) continue;
    if (!std::binary_search(closure.begin(), closure.end(), std::string("physical entity")))
      continue;
    if (std::binary_search(closure.begin(), closure.end(), std::string("abstraction"))) continue;
    candidates.push_back(node);
  }
  std::sort(candidates.begin(), candidates.end());

  // No word may be a hypernym of another word in the set.
  std::set<std::string> hypernym_side;
  for (const auto& w : candidates)
    for (const auto& h : closures.at(w)) hypernym_side.insert(h);
  std::vector<std::string> no_internal;
  for (const auto& w : candidates)
    if (!hypernym_side.count(w)) no_internal.push_back(w);

  // Identical hypernym sets: keep the alphabetically first.
  std::set<std::vector<std::string>> seen_sets;
  std::vector<std::string> final_words;
  for (const auto& w : no_internal)
    if (seen_sets.insert(closures.at(w)).second) final_words.push_back(w);

  const int n = static_cast<int>(final_words.size());
  if (n < min_size)
    throw std::runtime_error("build_lexicons: only " + std::to_string(n) +
                             " words survive the filters (need at least " +
                             std::to_string(min_size) + ")");

  int num_files = std::max(1, (n + target_size / 2) / target_size);
  while (num_files > 1 && n / num_files < min_size) --num_files;
  const int base = n / num_files;
  if (base < min_size || base + 1 > max_size)
    throw std::runtime_error("build_lexicons: cannot partition " + std::to_string(n) +
                             " words into lexicons of " + std::to_string(min_size) + ".." +
                             std::to_string(max_size));

  Rng rng(derive_seed(seed, "twenty_q.lexicons"));
  std::vector<std::string> shuffled = final_words;
  rng.shuffle(shuffled);

  std::vector<std::vector<LexiconEntry>> out(static_cast<std::size_t>(num_files));
  int rem = n % num_files;
  std::size_t pos = 0;
  for (int f = 0; f < num_files; ++f) {
    const int take = base + (f < rem ? 1 : 0);
    std::vector<std::string> words(shuffled.begin() + static_cast<std::ptrdiff_t>(pos),
                                   shuffled.begin() + static_cast<std::ptrdiff_t>(pos + take));
    pos += static_cast<std::size_t>(take);
    std::sort(words.begin(), words.end());
    for (const auto& w : words) out[static_cast<std::size_t>(f)].push_back({w, closures.at(w)});
  }
  return out;
}

void write_lexicon_file(const std::string& path, const std::vector<LexiconEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write lexicon file: " + path);
  for (const auto& e : entries) {
    out << e.word << '\t';
    for (std::size_t i = 0; i < e.hypernyms.size(); ++i)
      out << e.hypernyms[i] << (i + 1 < e.hypernyms.size() ? "," : "");
    out << '\n';
  }
}

std::vector<LexiconEntry> read_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
  std::vector<LexiconEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw std::runtime_error("lexicon line missing tab: " + line);
    LexiconEntry e;
    e.word = line.substr(0, tab);
    std::istringstream hs(line.substr(tab + 1));
    std::string h;
    while (std::getline(hs, h, ',')) e.hypernyms.push_back(h);
    std::sort(e.hypernyms.begin(), e.hypernyms.end());
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Instance> generate_instances(std::uint64_t master_seed, int count,
                                         const std::vector<std::vector<LexiconEntry>>& lexicons) {
  if (lexicons.empty()) throw std::invalid_argument("twenty_q: no lexicons provided");
  const std::uint64_t inst_base = derive_seed(master_seed, "twenty_q.instance");
  const std::uint64_t sim_base = derive_seed(master_seed, "twenty_q.sim");
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Instance inst;
    inst.id = static_cast<std::uint64_t>(i);
    inst.instance_seed = derive_seed(inst_base, static_cast<std::uint64_t>(i));
    inst.sim_seed = derive_seed(sim_base, static_cast<std::uint64_t>(i));
    inst.lexicon_id = i % static_cast<int>(lexicons.size());
    inst.entries = lexicons[static_cast<std::size_t>(inst.lexicon_id)];
    out.push_back(std::move(inst));
  }
  return out;
}

Env::Env(Instance instance, std::uint64_t sim_seed)
    : instance_(std::move(instance)), lexicon_(instance_.entries), rng_(sim_seed) {
  state_.consistent = lexicon_.all_indices();
}

std::string Env::issue_next_question() {
  pending_ = user_next_question(lexicon_, state_, questions_issued_, rng_, &stats_);
  ++questions_issued_;
  std::string text = "Question " + std::to_string(questions_issued_) + ": " + pending_.render();
  if (pending_.forced_final) text += "\nThis is the final question.";
  return text;
}

Observation Env::reset() {
  std::ostringstream out;
  out << "We are playing twenty questions with roles reversed: you answer, I ask.\n"
      << "Pick a secret word from the table below (each word is listed with all of\n"
      << "its hypernyms). I will ask yes/no questions about the secret word's\n"
      << "hypernyms, and sometimes guess the word itself. You lose if and only if an\n"
      << "answer logically contradicts your previous answers; you win if you stay\n"
      << "consistent through my final guess.\n"
      << "On your FIRST reply include both lines:\n"
      << "  SECRET: <word>      (recorded for analysis; it does not affect my questions)\n"
      << "  ANSWER: yes|no      (answering the question below)\n"
      << "Every later reply needs only the ANSWER line.\n\n"
      << "Words and hypernyms:\n";
  for (int i = 0; i < lexicon_.size(); ++i) {
    const auto& e = lexicon_.entry(i);
    out << e.word << ": ";
    for (std::size_t h = 0; h < e.hypernyms.size(); ++h)
      out << e.hypernyms[h] << (h + 1 < e.hypernyms.size() ? ", " : "");
    out << "\n";
  }
  out << "\n" << issue_next_question();
  Observation obs;
  obs.text = out.str();
  return obs;
}

StepResult Env::step(const std::string& agent_text) {
  clear_parsed();

  const auto answer_field = parse::keyword_line(agent_text, "ANSWER:");
  std::optional<bool> yes;
  if (answer_field) {
    std::istringstream in(*answer_field);
    std::string tok;
    in >> tok;
    tok = parse::lower(tok);
    if (tok == "yes") yes = true;
    if (tok == "no") yes = false;
  }
  if (secret_.empty()) {
    if (const auto secret_field = parse::keyword_line(agent_text, "SECRET:")) {
      std::istringstream in(*secret_field);
      in >> secret_;
      secret_ = parse::lower(secret_);
    }
  }

  const bool needs_secret = state_.answered.empty();
  if (!yes || (needs_secret && secret_.empty())) {
    // One reprompt per episode; the unanswered question is dropped and a
    // fresh one is asked so the turn budget stays intact.
    if (pending_.forced_final || reprompt_used_) {
      Observation obs;
      obs.text = "Could not parse your reply; the episode ends.";
      return finish(Outcome::parse_failure, 0.0, std::move(obs));
    }
    reprompt_used_ = true;
    Observation obs;
    obs.text = std::string("Could not parse your reply. ") +
               (needs_secret ? "Include SECRET: <word> and ANSWER: yes|no.\n"
                             : "Reply with ANSWER: yes or ANSWER: no.\n") +
               issue_next_question();
    obs.final_turn = pending_.forced_final;
    return proceed(std::move(obs));
  }

  set_parsed(std::string(needs_secret ? "secret:" + secret_ + " " : "") +
             "answer:" + (*yes ? "yes" : "no"));

  const Adjudication adj = adjudicate_answer(lexicon_, state_, pending_, *yes);
  state_.answered.emplace_back(pending_, *yes);

  if (adj.verdict == Adjudication::Verdict::contradiction) {
    Observation obs;
    obs.text = "Logical contradiction (" + adj.rule + "): the game ends. You lose.";
    obs.violation = adj.rule;
    return finish(Outcome::rule_violation, 0.0, std::move(obs));
  }
  if (adj.verdict == Adjudication::Verdict::win) {
    Observation obs;
    obs.text = "I found it! Your answers stayed consistent. You win.";
    return finish(Outcome::solved, 1.0, std::move(obs));
  }
  state_.consistent = adj.next_consistent;
  if (pending_.forced_final) {
    Observation obs;
    obs.text = "That was my final question and your answers stayed consistent. You win.";
    return finish(Outcome::solved, 1.0, std::move(obs));
  }
  Observation obs;
  obs.text = issue_next_question();
  obs.final_turn = pending_.forced_final;
  return proceed(std::move(obs));
}

}  // namespace mtp::twenty_q
