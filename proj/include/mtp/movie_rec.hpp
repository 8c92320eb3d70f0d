#pragma once

#include <string>
#include <vector>

#include "mtp/env.hpp"
#include "mtp/rng.hpp"
#include "mtp/types.hpp"

namespace mtp::movie_rec {

inline constexpr int kNumUsers = 20;
inline constexpr int kNumSetVariations = 50;
inline constexpr int kSeenCount = 20;
inline constexpr int kUnseenCount = 40;
inline constexpr int kQuestionTurns = 10;

// Attribute schema. Values live on a [min_credit, max_value] scale and each
// movie's attribute total is confined to a budget window, which forces
// trade-offs instead of all-around-great movies.
struct Params {
  std::vector<std::string> attribute_names = {
      "Intellectual Depth", "Pace",           "Dialogue Focus",  "Soundtrack Presence",
      "Realism Level",      "Emotional Intensity", "Visual Details", "Character Complexity"};
  double min_credit = 1.0;
  double max_value = 10.0;
  double base_budget = 30.0;
  double budget_delta = 10.0;
  double seen_sparsity = 0.25;  // fraction of seen-set attributes pinned to min_value
  double min_value_for_sparse = 1.0;
  int seen_decimals = 1;
  int unseen_decimals = 2;

  int k() const { return static_cast<int>(attribute_names.size()); }
};

enum class SetKind { seen, unseen };

struct Movie {
  std::string id;
  std::vector<double> attributes;
  SetKind set_kind = SetKind::seen;
};

struct Instance {
  std::uint64_t id = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t sim_seed = 0;
  int user_id = 0;
  int variation_id = 0;
  std::vector<double> weights;  // one per attribute, on the 0.1 grid
  std::vector<Movie> seen;
  std::vector<Movie> unseen;

  Json to_json() const;
  static Instance from_json(const Json& j);
};

enum class Comparison { a, b, equal };

// Splits `budget` as min_credit + proportional share of the remainder, with
// values capped at max_value (excess reflows to the uncapped attributes).
// `sparse` entries are pinned to min_value_for_sparse and receive no share.
// Proportions need not be normalized.
std::vector<double> distribute_budget(const Params& p, double budget,
                                      const std::vector<double>& proportions,
                                      const std::vector<bool>& sparse);

Movie generate_movie(Rng& rng, const Params& p, SetKind kind, std::string id);

// Linear utility: dot(weights, attributes).
double preference_score(const std::vector<double>& weights, const Movie& movie);

Comparison answer_comparison(const std::vector<double>& weights, const Movie& a, const Movie& b);

// 1-based rank of `chosen` among `unseen` by descending true score; ties
// share the best rank.
int recommendation_rank(const std::vector<double>& weights, const std::vector<Movie>& unseen,
                        const std::string& chosen_id);

// 1 - (rank-1)/(N-1); unknown id scores 0.
double score_recommendation(const std::vector<double>& weights, const std::vector<Movie>& unseen,
                            const std::string& chosen_id);

// 20 users x 50 movie-set variations = 1000 instances.
std::vector<Instance> generate_instances(std::uint64_t master_seed, const Params& p = {});

class Env : public EnvBase {
 public:
  explicit Env(Instance instance, Params params = {});

  TaskId task() const override { return TaskId::movie_rec; }
  Observation reset() override;
  StepResult step(const std::string& agent_text) override;

 private:
  StepResult step_inner(const std::string& agent_text);
  std::string seen_table() const;
  std::string unseen_table() const;
  const Movie* find_seen(const std::string& id) const;

  Instance instance_;
  Params params_;
  int turns_used_ = 0;
};

}  // namespace mtp::movie_rec
