// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria mirror the suite's fixed quantities: instance counts,
// turn budgets, oracle ceilings, evaluator equivalences, adjudicator
// completeness, simulator branch frequencies, determinism, score edges and
// the takeover protocol shape.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "mtp/agents.hpp"
#include "mtp/circuit.hpp"
#include "mtp/episode.hpp"
#include "mtp/movie_rec.hpp"
#include "mtp/runner.hpp"
#include "mtp/suite.hpp"
#include "mtp/twenty_questions.hpp"
#include "mtp/word_chain.hpp"
#include "mtp/word_guess.hpp"
#include "../tests/oracles.hpp"

using namespace mtp;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail = "") {
  std::printf("[%s] %2d %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++failures;
}

AgentFactory oracle_factory() {
  return [](TaskId task, const Json& instance, const EpisodeConfig& config) {
    return make_oracle(task, instance, derive_seed(config.sim_seed, "oracle-secret"));
  };
}

AgentFactory named_oracle(const char* name) {
  return [name](TaskId task, const Json& instance, const EpisodeConfig& config) -> AgentPtr {
    return std::make_unique<RenamedAgent>(
        make_oracle(task, instance, derive_seed(config.sim_seed, "oracle-secret")), name);
  };
}

AgentFactory random_factory() {
  return [](TaskId task, const Json&, const EpisodeConfig& config) -> AgentPtr {
    return std::make_unique<RandomAgent>(task, derive_seed(config.sim_seed, "random-agent"));
  };
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

int main() {
  const std::uint64_t kSeed = 20250810;
  const DataPaths data = DataPaths::locate();

  // --- 1: suite shape -----------------------------------------------------
  std::map<TaskId, std::vector<Json>> instances;
  {
    const auto t0 = std::chrono::steady_clock::now();
    bool counts_ok = true;
    std::ostringstream detail;
    for (TaskId task : kAllTasks) {
      instances[task] = generate_task_instances(task, kSeed, 0, data);
      const int expected = default_num_problems(task);
      if (static_cast<int>(instances[task].size()) != expected) counts_ok = false;
      detail << task_name(task) << "=" << instances[task].size() << " ";
    }
    const double secs = elapsed_s(t0);
    detail << "in " << fmt(secs) << "s";
    report(1, "suite shape 400/1000/300/400/400 under 60s", counts_ok && secs < 60.0,
           detail.str());
  }

  // --- 3 (run first; transcripts feed 2 and 8): oracle ceilings -----------
  std::map<TaskId, TaskRunResult> oracle_runs;
  {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteRunOptions options;
    options.parallel = 2;
    for (TaskId task : kAllTasks)
      oracle_runs[task] = run_task_suite(task, instances[task], oracle_factory(), options);
    const double secs = elapsed_s(t0);

    const auto& wg = oracle_runs[TaskId::word_guess];
    int solved = 0;
    for (const auto& r : wg.records)
      if (r.outcome == Outcome::solved) ++solved;

    const bool ceilings =
        oracle_runs[TaskId::circuit_dec].report.mean_score == 1.0 &&
        oracle_runs[TaskId::twenty_q].report.mean_score == 1.0 &&
        oracle_runs[TaskId::word_chain].report.mean_score == 1.0 &&
        oracle_runs[TaskId::movie_rec].report.mean_score == 1.0 &&
        solved == static_cast<int>(wg.records.size());
    std::ostringstream detail;
    detail << "circuit=" << fmt(oracle_runs[TaskId::circuit_dec].report.mean_score)
           << " twenty_q=" << fmt(oracle_runs[TaskId::twenty_q].report.mean_score)
           << " word_chain=" << fmt(oracle_runs[TaskId::word_chain].report.mean_score)
           << " movie_rec=" << fmt(oracle_runs[TaskId::movie_rec].report.mean_score)
           << " word_guess_solved=" << solved << "/" << wg.records.size() << " in " << fmt(secs)
           << "s";
    report(3, "oracle ceilings across all 2500 instances under 5min", ceilings && secs < 300.0,
           detail.str());
  }

  // --- 2: turn budgets over a 50-episode mixed smoke run -------------------
  {
    bool ok = true;
    std::ostringstream detail;
    for (TaskId task : kAllTasks) {
      std::vector<Json> subset(instances[task].begin(), instances[task].begin() + 5);
      const TaskRunResult with_oracle = run_task_suite(task, subset, oracle_factory());
      const TaskRunResult with_random = run_task_suite(task, subset, random_factory());
      int worst = 0;
      for (const auto& r : with_oracle.records) worst = std::max(worst, r.turns_taken);
      for (const auto& r : with_random.records) worst = std::max(worst, r.turns_taken);
      if (worst > default_max_turns(task)) ok = false;
      detail << task_name(task) << "<=" << worst << "/" << default_max_turns(task) << " ";
    }
    report(2, "turn budgets hold on a 50-episode smoke run", ok, detail.str());
  }

  // --- 4: brute-force equivalences -----------------------------------------
  {
    Rng rng(555);
    int circuit_mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      circuit::GateTotals alloc{static_cast<int>(rng.below(4) + 2),
                                static_cast<int>(rng.below(3)),
                                static_cast<int>(rng.below(3))};
      const circuit::Circuit c = circuit::build_circuit(rng, alloc, 3);
      for (int r = 0; r < 8; ++r) {
        const std::vector<int> input{(r >> 2) & 1, (r >> 1) & 1, r & 1};
        if (c.evaluate(input) != oracles::recursive_eval(c, input)) ++circuit_mismatches;
      }
    }
    int feedback_mismatches = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      std::string guess, secret;
      const int span = trial % 2 == 0 ? 5 : 26;
      for (int i = 0; i < 5; ++i) {
        guess.push_back(static_cast<char>('a' + rng.below(span)));
        secret.push_back(static_cast<char>('a' + rng.below(span)));
      }
      if (word_guess::compute_feedback(guess, secret).to_string() !=
          oracles::counting_feedback(guess, secret))
        ++feedback_mismatches;
    }
    report(4, "evaluator equivalence: 1000 circuits x 8 inputs, 10000 feedback pairs",
           circuit_mismatches == 0 && feedback_mismatches == 0,
           "mismatches=" + std::to_string(circuit_mismatches + feedback_mismatches));
  }

  // --- 5: adjudicator completeness over randomized episodes ----------------
  {
    const auto files = list_lexicon_files(data.lexicon_dir());
    std::vector<std::vector<twenty_q::LexiconEntry>> lexicons;
    for (const auto& f : files) lexicons.push_back(twenty_q::read_lexicon_file(f));
    int false_results = 0;
    int episodes_run = 0, contradictions_seen = 0;
    Rng rng(777);
    for (int episode = 0; episode < 10000; ++episode) {
      const auto& entries = lexicons[episode % lexicons.size()];
      const twenty_q::Lexicon lex(entries);
      twenty_q::ConsistencyState st;
      st.consistent = lex.all_indices();
      std::vector<std::pair<twenty_q::UserQuestion, bool>> history;
      int asked = 0;
      ++episodes_run;
      for (;;) {
        const auto q = twenty_q::user_next_question(lex, st, asked, rng);
        ++asked;
        const bool yes = rng.bernoulli(0.5);  // the random yes/no agent
        history.emplace_back(q, yes);
        const auto adj = twenty_q::adjudicate_answer(lex, st, q, yes);
        const auto derived = oracles::rederive(entries, history);
        const bool adj_contra = adj.verdict == twenty_q::Adjudication::Verdict::contradiction;
        const bool oracle_contra = !derived.rule.empty();
        if (adj_contra != oracle_contra || (adj_contra && derived.rule != adj.rule))
          ++false_results;
        if (adj_contra) {
          ++contradictions_seen;
          break;
        }
        if (adj.verdict == twenty_q::Adjudication::Verdict::win || q.forced_final) break;
        st.answered.emplace_back(q, yes);
        st.consistent = adj.next_consistent;
      }
    }
    report(5, "adjudicator completeness vs brute-force re-derivation", false_results == 0,
           std::to_string(episodes_run) + " episodes, " + std::to_string(contradictions_seen) +
               " contradictions, " + std::to_string(false_results) + " disagreements");
  }

  // --- 6: simulator branch frequencies -------------------------------------
  {
    const auto files = list_lexicon_files(data.lexicon_dir());
    const twenty_q::Lexicon lex(twenty_q::read_lexicon_file(files.front()));
    twenty_q::SimStats stats;
    Rng rng(2025);
    int turns = 0;
    // Keep playing whole games (including the single-survivor guess phases)
    // until every branch has enough draws for a tight estimate.
    while (turns < 10000 || stats.trap_guess_draws < 5000 || stats.spontaneous_draws < 10000) {
      twenty_q::ConsistencyState st;
      st.consistent = lex.all_indices();
      int asked = 0;
      while (asked <= twenty_q::kMaxQuestions) {
        const auto q = twenty_q::user_next_question(lex, st, asked, rng, &stats);
        ++asked;
        ++turns;
        bool yes = rng.bernoulli(0.5);
        auto adj = twenty_q::adjudicate_answer(lex, st, q, yes);
        if (adj.verdict != twenty_q::Adjudication::Verdict::continue_game) {
          adj = twenty_q::adjudicate_answer(lex, st, q, !yes);
          if (adj.verdict != twenty_q::Adjudication::Verdict::continue_game) break;
        }
        if (adj.verdict != twenty_q::Adjudication::Verdict::continue_game) break;
        st.consistent = adj.next_consistent;
      }
    }
    const double spont = static_cast<double>(stats.spontaneous_fires) / stats.spontaneous_draws;
    const double trap = static_cast<double>(stats.trap_guess_fires) / stats.trap_guess_draws;
    const double excl = static_cast<double>(stats.excluded_only_fires) / stats.hypernym_draws;
    const double alls = static_cast<double>(stats.all_consistent_fires) / stats.hypernym_draws;
    const bool ok = std::abs(spont - 0.02) < 0.02 && std::abs(trap - 0.15) < 0.02 &&
                    std::abs(excl - 0.10) < 0.02 && std::abs(alls - 0.10) < 0.02;
    report(6, "questioner branch frequencies within +/-0.02",
           ok,
           "p_spontaneous=" + fmt(spont) + " p_trap=" + fmt(trap) + " p_excluded=" + fmt(excl) +
               " p_all_of_s=" + fmt(alls) + " over " + std::to_string(turns) + " turns");
  }

  // --- 7: byte-identical oracle runs ---------------------------------------
  {
    const fs::path dir = fs::temp_directory_path() / "mtp_acceptance";
    fs::create_directories(dir);
    bool identical = true;
    SuiteRunOptions options;
    options.parallel = 2;
    for (TaskId task : kAllTasks) {
      std::vector<Json> subset(instances[task].begin(), instances[task].begin() + 30);
      std::string dumps[2];
      for (int run = 0; run < 2; ++run) {
        const TaskRunResult result = run_task_suite(task, subset, oracle_factory(), options);
        const fs::path path = dir / (std::string(task_name(task)) + "." + std::to_string(run));
        write_jsonl(path.string(), result.records);
        std::ifstream in(path, std::ios::binary);
        dumps[run].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
      }
      if (dumps[0] != dumps[1] || dumps[0].empty()) identical = false;
    }
    fs::remove_all(dir);
    report(7, "two oracle runs from one master seed are byte-identical", identical);
  }

  // --- 8: score normalization edges + transcript audit ----------------------
  {
    const auto& movie_instance = instances[TaskId::movie_rec][0];
    const auto inst = movie_rec::Instance::from_json(movie_instance);

    // best and worst unseen movies by the true utility
    std::size_t best = 0, worst = 0;
    for (std::size_t i = 1; i < inst.unseen.size(); ++i) {
      const double s = movie_rec::preference_score(inst.weights, inst.unseen[i]);
      if (s > movie_rec::preference_score(inst.weights, inst.unseen[best])) best = i;
      if (s < movie_rec::preference_score(inst.weights, inst.unseen[worst])) worst = i;
    }
    auto run_with_recommendation = [&](const std::string& id) {
      auto env = make_environment(TaskId::movie_rec, movie_instance);
      std::vector<std::string> lines(10, "ASK: S01 VS S02");
      lines.push_back("RECOMMEND: " + id);
      ScriptedAgent agent(lines, "scripted");
      return run_episode(config_for_instance(TaskId::movie_rec, movie_instance), *env,
                         {&agent, nullptr});
    };
    const double best_score = run_with_recommendation(inst.unseen[best].id).score;
    const double worst_score = run_with_recommendation(inst.unseen[worst].id).score;

    // first-guess word-guess solve
    const auto wg_instance = instances[TaskId::word_guess][0];
    auto env = make_environment(TaskId::word_guess, wg_instance);
    ScriptedAgent lucky({"GUESS: " + wg_instance.at("secret").get<std::string>()}, "lucky");
    const double lucky_score =
        run_episode(config_for_instance(TaskId::word_guess, wg_instance), *env, {&lucky, nullptr})
            .score;

    // audit every transcript produced so far
    bool in_range = true;
    for (const auto& [task, result] : oracle_runs)
      for (const auto& r : result.records)
        if (r.score < 0.0 || r.score > 1.0) in_range = false;

    const bool ok = best_score == 1.0 && worst_score == 0.0 && lucky_score == 1.0 && in_range;
    report(8, "score edges: rank-1 -> 1.0, rank-40 -> 0.0, first-guess solve -> 1.0, all in [0,1]",
           ok,
           "best=" + fmt(best_score) + " worst=" + fmt(worst_score) +
               " lucky=" + fmt(lucky_score));
  }

  // --- 9: takeover protocol shape -------------------------------------------
  {
    std::vector<Json> subset(instances[TaskId::movie_rec].begin(),
                             instances[TaskId::movie_rec].begin() + 100);
    SuiteRunOptions options;
    options.parallel = 2;
    options.takeover_turn = 11;
    options.secondary = named_oracle("agent_b");
    const TaskRunResult result =
        run_task_suite(TaskId::movie_rec, subset, named_oracle("agent_a"), options);
    int correct = 0;
    for (const auto& r : result.records) {
      bool good = r.turns.size() == 11;
      if (good)
        for (std::size_t i = 0; i < r.turns.size(); ++i) {
          const bool expect_b = r.turns[i].index >= 11;
          if (r.turns[i].agent_id != (expect_b ? "agent_b" : "agent_a")) good = false;
        }
      if (good) ++correct;
    }
    report(9, "takeover: turns 1-10 by agent A, turn 11 by agent B on 100% of episodes",
           correct == static_cast<int>(result.records.size()),
           std::to_string(correct) + "/" + std::to_string(result.records.size()));
  }

  std::printf("%s (%d criterion failures)\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              failures);
  return failures == 0 ? 0 : 1;
}
