#include "mtp/movie_rec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mtp::movie_rec {

namespace {

double round_to(double x, int decimals) {
  const double p = std::pow(10.0, decimals);
  return std::round(x * p) / p;
}

std::string format_value(double x, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

}  // namespace

std::vector<double> distribute_budget(const Params& p, double budget,
                                      const std::vector<double>& proportions,
                                      const std::vector<bool>& sparse) {
  const int k = p.k();
  if (static_cast<int>(proportions.size()) != k || static_cast<int>(sparse.size()) != k)
    throw std::invalid_argument("distribute_budget: dimension mismatch");
  if (budget < p.min_credit * k)
    throw std::invalid_argument("distribute_budget: budget below total minimum credit");

  std::vector<double> values(k, p.min_credit);
  double remainder = budget - p.min_credit * k;
  std::vector<int> open;
  for (int i = 0; i < k; ++i) {
    if (sparse[i]) {
      values[i] = p.min_value_for_sparse;
      remainder -= p.min_value_for_sparse - p.min_credit;
    } else {
      open.push_back(i);
    }
  }

  const double cap_room = p.max_value - p.min_credit;
  while (!open.empty() && remainder > 0.0) {
    double total = 0.0;
    for (int i : open) total += proportions[i];
    bool capped = false;
    std::vector<int> still_open;
    for (int i : open) {
      const double share = total > 0.0 ? remainder * proportions[i] / total
                                       : remainder / static_cast<double>(open.size());
      if (share > cap_room) {
        values[i] = p.max_value;
        capped = true;
      } else {
        still_open.push_back(i);
      }
    }
    if (!capped) {
      for (int i : open) {
        const double share = total > 0.0 ? remainder * proportions[i] / total
                                         : remainder / static_cast<double>(open.size());
        values[i] = p.min_credit + share;
      }
      break;
    }
    remainder -= cap_room * static_cast<double>(open.size() - still_open.size());
    open = std::move(still_open);
  }
  return values;
}

Movie generate_movie(Rng& rng, const Params& p, SetKind kind, std::string id) {
  const int k = p.k();
  if (p.base_budget < p.min_credit * k)
    throw std::invalid_argument("generate_movie: base_budget below k * min_credit");

  // Half-unit margin keeps rounded attribute totals inside the open window.
  const double budget = rng.uniform(p.base_budget + 0.5, p.base_budget + p.budget_delta - 0.5);

  std::vector<bool> sparse(k, false);
  if (kind == SetKind::seen && p.seen_sparsity > 0.0) {
    const int n_sparse = static_cast<int>(std::floor(p.seen_sparsity * k));
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    for (int i : rng.sample(idx, n_sparse)) sparse[i] = true;
  }

  std::vector<double> proportions(k, 0.0);
  for (int i = 0; i < k; ++i)
    if (!sparse[i]) proportions[i] = rng.uniform();

  std::vector<double> values = distribute_budget(p, budget, proportions, sparse);
  const int decimals = kind == SetKind::seen ? p.seen_decimals : p.unseen_decimals;
  for (double& v : values) v = round_to(v, decimals);

  Movie m;
  m.id = std::move(id);
  m.attributes = std::move(values);
  m.set_kind = kind;
  return m;
}

double preference_score(const std::vector<double>& weights, const Movie& movie) {
  if (weights.size() != movie.attributes.size())
    throw std::invalid_argument("preference_score: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * movie.attributes[i];
  return s;
}

Comparison answer_comparison(const std::vector<double>& weights, const Movie& a, const Movie& b) {
  const double sa = preference_score(weights, a);
  const double sb = preference_score(weights, b);
  if (sa > sb) return Comparison::a;
  if (sb > sa) return Comparison::b;
  return Comparison::equal;
}

int recommendation_rank(const std::vector<double>& weights, const std::vector<Movie>& unseen,
                        const std::string& chosen_id) {
  const Movie* chosen = nullptr;
  for (const auto& m : unseen)
    if (m.id == chosen_id) chosen = &m;
  if (!chosen) return 0;
  const double chosen_score = preference_score(weights, *chosen);
  int better = 0;
  for (const auto& m : unseen)
    if (preference_score(weights, m) > chosen_score) ++better;
  return better + 1;
}

double score_recommendation(const std::vector<double>& weights, const std::vector<Movie>& unseen,
                            const std::string& chosen_id) {
  const int rank = recommendation_rank(weights, unseen, chosen_id);
  if (rank == 0) return 0.0;
  const auto n = static_cast<double>(unseen.size());
  return 1.0 - static_cast<double>(rank - 1) / (n - 1.0);
}

std::vector<Instance> generate_instances(std::uint64_t master_seed, const Params& p) {
  const std::uint64_t user_base = derive_seed(master_seed, "movie_rec.user");
  const std::uint64_t set_base = derive_seed(master_seed, "movie_rec.set");
  const std::uint64_t sim_base = derive_seed(master_seed, "movie_rec.sim");

  std::vector<std::vector<double>> users;
  users.reserve(kNumUsers);
  for (int u = 0; u < kNumUsers; ++u) {
    Rng rng(derive_seed(user_base, static_cast<std::uint64_t>(u)));
    std::vector<double> w(p.k());
    for (double& wi : w) wi = std::round(rng.uniform() * 10.0) / 10.0;
    users.push_back(std::move(w));
  }

  struct MovieSets {
    std::vector<Movie> seen, unseen;
  };
  std::vector<MovieSets> sets;
  sets.reserve(kNumSetVariations);
  for (int v = 0; v < kNumSetVariations; ++v) {
    Rng rng(derive_seed(set_base, static_cast<std::uint64_t>(v)));
    MovieSets ms;
    char id[8];
    for (int i = 0; i < kSeenCount; ++i) {
      std::snprintf(id, sizeof(id), "S%02d", i + 1);
      ms.seen.push_back(generate_movie(rng, p, SetKind::seen, id));
    }
    for (int i = 0; i < kUnseenCount; ++i) {
      std::snprintf(id, sizeof(id), "U%02d", i + 1);
      ms.unseen.push_back(generate_movie(rng, p, SetKind::unseen, id));
    }
    sets.push_back(std::move(ms));
  }

  std::vector<Instance> out;
  out.reserve(kNumUsers * kNumSetVariations);
  for (int u = 0; u < kNumUsers; ++u) {
    for (int v = 0; v < kNumSetVariations; ++v) {
      Instance inst;
      inst.id = static_cast<std::uint64_t>(u) * kNumSetVariations + v;
      inst.instance_seed = derive_seed(set_base, static_cast<std::uint64_t>(v));
      inst.sim_seed = derive_seed(sim_base, inst.id);
      inst.user_id = u;
      inst.variation_id = v;
      inst.weights = users[static_cast<std::size_t>(u)];
      inst.seen = sets[static_cast<std::size_t>(v)].seen;
      inst.unseen = sets[static_cast<std::size_t>(v)].unseen;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

namespace {

Json movies_to_json(const std::vector<Movie>& movies) {
  Json arr = Json::array();
  for (const auto& m : movies) {
    Json j;
    j["id"] = m.id;
    j["attributes"] = m.attributes;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<Movie> movies_from_json(const Json& arr, SetKind kind) {
  std::vector<Movie> out;
  for (const auto& j : arr) {
    Movie m;
    m.id = j.at("id").get<std::string>();
    m.attributes = j.at("attributes").get<std::vector<double>>();
    m.set_kind = kind;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

Json Instance::to_json() const {
  Json j;
  j["task"] = task_name(TaskId::movie_rec);
  j["id"] = id;
  j["instance_seed"] = instance_seed;
  j["sim_seed"] = sim_seed;
  j["user_id"] = user_id;
  j["variation_id"] = variation_id;
  j["weights"] = weights;
  j["seen"] = movies_to_json(seen);
  j["unseen"] = movies_to_json(unseen);
  return j;
}

Instance Instance::from_json(const Json& j) {
  Instance inst;
  inst.id = j.at("id").get<std::uint64_t>();
  inst.instance_seed = j.at("instance_seed").get<std::uint64_t>();
  inst.sim_seed = j.at("sim_seed").get<std::uint64_t>();
  inst.user_id = j.at("user_id").get<int>();
  inst.variation_id = j.at("variation_id").get<int>();
  inst.weights = j.at("weights").get<std::vector<double>>();
  inst.seen = movies_from_json(j.at("seen"), SetKind::seen);
  inst.unseen = movies_from_json(j.at("unseen"), SetKind::unseen);
  return inst;
}

Env::Env(Instance instance, Params params)
    : instance_(std::move(instance)), params_(std::move(params)) {}

std::string Env::seen_table() const {
  std::ostringstream out;
  for (const auto& m : instance_.seen) {
    out << m.id << ":";
    for (double v : m.attributes) out << " " << format_value(v, params_.seen_decimals);
    out << "\n";
  }
  return out.str();
}

std::string Env::unseen_table() const {
  std::ostringstream out;
  for (const auto& m : instance_.unseen) {
    out << m.id << ":";
    for (double v : m.attributes) out << " " << format_value(v, params_.unseen_decimals);
    out << "\n";
  }
  return out.str();
}

const Movie* Env::find_seen(const std::string& id) const {
  for (const auto& m : instance_.seen)
    if (m.id == id) return &m;
  return nullptr;
}

Observation Env::reset() {
  std::ostringstream out;
  out << "You must figure out a user's movie taste and then recommend a movie.\n"
      << "The user scores movies as a fixed weighted sum of the " << params_.k()
      << " attributes below; the weights are hidden from you.\n"
      << "Phase 1 - questioning (" << kQuestionTurns << " turns): each turn, compare two movies\n"
      << "from the SEEN table with a line of the form\n"
      << "  ASK: <id_a> VS <id_b>\n"
      << "The user answers PREFER: <id> (or PREFER: EQUAL on an exact tie).\n"
      << "Phase 2 - recommendation (1 turn): a table of UNSEEN movies is revealed\n"
      << "and you must answer with\n"
      << "  RECOMMEND: <id>\n"
      << "naming the unseen movie this user would score highest. Every message\n"
      << "costs one turn; recommendations are refused during phase 1 and\n"
      << "questions are refused in phase 2.\n\n"
      << "Attributes (in table order): ";
  for (int i = 0; i < params_.k(); ++i)
    out << params_.attribute_names[static_cast<std::size_t>(i)]
        << (i + 1 < params_.k() ? ", " : "\n\n");
  out << "SEEN movies:\n" << seen_table();
  Observation obs;
  obs.text = out.str();
  return obs;
}

StepResult Env::step(const std::string& agent_text) {
  clear_parsed();
  ++turns_used_;
  StepResult r = step_inner(agent_text);
  // The unseen table is revealed only once the questioning budget is spent.
  if (!r.terminal && turns_used_ == kQuestionTurns) {
    r.obs.text += "\n\nQuestioning is over. UNSEEN movies:\n" + unseen_table() +
                  "Answer now with RECOMMEND: <id>.";
    r.obs.final_turn = true;
  }
  return r;
}

StepResult Env::step_inner(const std::string& agent_text) {
  const auto ask = parse::keyword_line(agent_text, "ASK:");
  const auto rec = parse::keyword_line(agent_text, "RECOMMEND:");

  if (turns_used_ <= kQuestionTurns) {
    if (rec) {
      Observation obs;
      obs.text = "Recommendations are refused until the questioning phase is over. The turn is "
                 "spent.";
      set_parsed("recommend(refused)");
      return proceed(std::move(obs));
    }
    if (!ask) return reject_malformed("Ask with one line: ASK: <id_a> VS <id_b>");
    // grammar: <id_a> VS <id_b>
    std::istringstream fields(*ask);
    std::string id_a, vs, id_b, extra;
    fields >> id_a >> vs >> id_b;
    if (id_a.empty() || id_b.empty() || parse::lower(vs) != "vs" || (fields >> extra))
      return reject_malformed("Ask with one line: ASK: <id_a> VS <id_b>");
    const Movie* a = find_seen(id_a);
    const Movie* b = find_seen(id_b);
    if (!a || !b) {
      Observation obs;
      obs.text = "Unknown movie id in question; both ids must come from the SEEN table. "
                 "The turn is spent.";
      set_parsed("ask(invalid):" + id_a + ":" + id_b);
      return proceed(std::move(obs));
    }
    set_parsed("ask:" + id_a + ":" + id_b);
    const Comparison c = answer_comparison(instance_.weights, *a, *b);
    Observation obs;
    obs.text = c == Comparison::a   ? "PREFER: " + id_a
               : c == Comparison::b ? "PREFER: " + id_b
                                    : "PREFER: EQUAL";
    return proceed(std::move(obs));
  }

  // Final turn: only a recommendation is accepted, and the turn budget is
  // exhausted afterwards either way.
  if (!rec) {
    Observation obs;
    if (ask) {
      obs.text = "Questions are refused now; a recommendation was required. The episode ends.";
      set_parsed("ask(refused)");
      return finish(Outcome::turn_limit, 0.0, std::move(obs));
    }
    obs.text = "Could not parse a recommendation; the episode ends.";
    return finish(Outcome::parse_failure, 0.0, std::move(obs));
  }
  std::istringstream fields(*rec);
  std::string id;
  fields >> id;
  set_parsed("recommend:" + id);
  const int rank = recommendation_rank(instance_.weights, instance_.unseen, id);
  if (rank == 0) {
    Observation obs;
    obs.text = "Movie '" + id + "' is not in the UNSEEN table.";
    obs.violation = "unknown_recommendation";
    return finish(Outcome::rule_violation, 0.0, std::move(obs));
  }
  const double score = score_recommendation(instance_.weights, instance_.unseen, id);
  Observation obs;
  obs.text = "You recommended " + id + ", which ranks " + std::to_string(rank) + " of " +
             std::to_string(instance_.unseen.size()) + " for this user.";
  return finish(Outcome::solved, score, std::move(obs));
}

}  // namespace mtp::movie_rec
