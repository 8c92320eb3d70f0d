#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtp/env.hpp"
#include "mtp/rng.hpp"
#include "mtp/types.hpp"

namespace mtp::twenty_q {

inline constexpr int kMaxQuestions = 20;  // regular questions before the forced final guess

struct LexiconEntry {
  std::string word;
  std::vector<std::string> hypernyms;  // transitive closure, sorted
};

// Immutable word set shared by a game; precomputes hypernym -> holders.
class Lexicon {
 public:
  explicit Lexicon(std::vector<LexiconEntry> entries);

  int size() const { return static_cast<int>(entries_.size()); }
  const LexiconEntry& entry(int i) const { return entries_[static_cast<std::size_t>(i)]; }
  std::optional<int> index_of(const std::string& word) const;
  const std::vector<std::string>& all_hypernyms() const { return hypernym_union_; }
  const std::vector<int>& holders(const std::string& hypernym) const;
  bool word_has(int word_idx, const std::string& hypernym) const;
  std::vector<int> all_indices() const;

 private:
  std::vector<LexiconEntry> entries_;
  std::vector<std::string> hypernym_union_;
  std::map<std::string, std::vector<int>> holders_;
  std::map<std::string, int> word_index_;
};

struct UserQuestion {
  enum class Kind { hypernym, word_guess };
  Kind kind = Kind::hypernym;
  std::string value;          // hypernym text or guessed word
  bool forced_final = false;  // the budget-exhausted final guess

  std::string render() const;
};

struct ConsistencyState {
  std::vector<int> consistent;  // sorted indices of words still consistent
  std::vector<std::pair<UserQuestion, bool>> answered;
};

// Draw counters for the questioner's probabilistic branches.
struct SimStats {
  int spontaneous_draws = 0, spontaneous_fires = 0;   // p = 0.02
  int trap_guess_draws = 0, trap_guess_fires = 0;     // p = 0.15
  int hypernym_draws = 0;
  int excluded_only_fires = 0;    // p = 0.10
  int all_consistent_fires = 0;   // p = 0.10
  int proper_subset_fires = 0;    // remainder
};

// The questioner. Guesses are forced by a single surviving word or an
// exhausted budget and drawn spontaneously with p=0.02 otherwise; guessed
// words come from the excluded set with p=0.15 (a trap), else from S.
// Hypernym questions pick an excluded-only hypernym with p=0.1, an
// all-of-S hypernym with p=0.1, else one covering a proper subset of S.
// Infeasible branches fall through in the order: excluded-only ->
// proper-subset -> all-of-S (always feasible), and trap -> real guess.
UserQuestion user_next_question(const Lexicon& lex, const ConsistencyState& st,
                                int questions_asked, Rng& rng, SimStats* stats = nullptr,
                                int max_questions = kMaxQuestions);

struct Adjudication {
  enum class Verdict { continue_game, win, contradiction };
  Verdict verdict = Verdict::continue_game;
  std::string rule;  // "R1".."R5" when contradiction
  std::vector<int> next_consistent;
};

// The five contradiction rules:
//   R1  "yes" to a hypernym whose holders are all excluded
//   R2  "no" to a hypernym held by every consistent word
//   R3  "no" to a guess of the single remaining consistent word
//   R4  "yes" to a guess of an excluded word
//   R5  no consistent word remains (catch-all)
// A "yes" to a guess of a consistent word wins; otherwise S is filtered.
Adjudication adjudicate_answer(const Lexicon& lex, const ConsistencyState& st,
                               const UserQuestion& q, bool yes);

// 1 iff the trajectory stayed consistent through the final answer.
double score_episode(const EpisodeRecord& record);

struct Instance {
  std::uint64_t id = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t sim_seed = 0;
  int lexicon_id = 0;
  std::vector<LexiconEntry> entries;

  Json to_json() const;
  static Instance from_json(const Json& j);
};

// ---- offline lexicon construction ----

// Noun is-a edges: node -> direct hypernyms.
using TaxonomyEdges = std::map<std::string, std::set<std::string>>;

TaxonomyEdges load_taxonomy(const std::string& path);

// Transitive closure of every node's hypernyms (the node itself excluded).
std::map<std::string, std::vector<std::string>> hypernym_closures(const TaxonomyEdges& edges);

// Applies the word-set filters and partitions the survivors into lexicons of
// min_size..max_size words (seeded shuffle decides membership). Filters, in
// order: single-token word present in `word_list`; at least 7 hypernyms;
// "physical entity" present; "abstraction" absent; not a hypernym of another
// candidate; hypernym sets pairwise distinct (first alphabetically kept).
std::vector<std::vector<LexiconEntry>> build_lexicons(const TaxonomyEdges& edges,
                                                      const std::set<std::string>& word_list,
                                                      std::uint64_t seed, int target_size = 90,
                                                      int min_size = 80, int max_size = 100);

void write_lexicon_file(const std::string& path, const std::vector<LexiconEntry>& entries);
std::vector<LexiconEntry> read_lexicon_file(const std::string& path);

std::vector<Instance> generate_instances(std::uint64_t master_seed, int count,
                                         const std::vector<std::vector<LexiconEntry>>& lexicons);

class Env : public EnvBase {
 public:
  Env(Instance instance, std::uint64_t sim_seed);

  TaskId task() const override { return TaskId::twenty_q; }
  Observation reset() override;
  StepResult step(const std::string& agent_text) override;

  const SimStats& sim_stats() const { return stats_; }
  const std::string& declared_secret() const { return secret_; }

 private:
  std::string issue_next_question();  // advances the questioner

  Instance instance_;
  Lexicon lexicon_;
  Rng rng_;
  ConsistencyState state_;
  SimStats stats_;
  UserQuestion pending_;
  int questions_issued_ = 0;
  std::string secret_;  // analysis only; never shown to the questioner
};

}  // namespace mtp::twenty_q
