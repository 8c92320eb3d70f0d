#include "mtp/suite.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "mtp/circuit.hpp"
#include "mtp/movie_rec.hpp"
#include "mtp/twenty_questions.hpp"
#include "mtp/word_chain.hpp"
#include "mtp/word_guess.hpp"

#ifndef MTP_DEFAULT_DATA_DIR
#define MTP_DEFAULT_DATA_DIR "data"
#endif

namespace mtp {

namespace fs = std::filesystem;

DataPaths DataPaths::locate(const std::string& override_dir) {
  if (!override_dir.empty()) return {override_dir};
  if (const char* env = std::getenv("MTP_DATA_DIR"); env && *env) return {env};
  return {MTP_DEFAULT_DATA_DIR};
}

std::vector<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open word list: " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string w = line;
    if (!w.empty()) words.push_back(w);
  }
  return words;
}

std::vector<std::string> list_lexicon_files(const std::string& dir) {
  std::vector<std::string> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("lexicon_", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".tsv")
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<Json> generate_task_instances(TaskId task, std::uint64_t master_seed, int count,
                                          const DataPaths& data) {
  if (count <= 0) count = default_num_problems(task);
  std::vector<Json> out;

  switch (task) {
    case TaskId::word_guess: {
      const auto words = load_word_list(data.words_file());
      auto instances = word_guess::generate_instances(master_seed, words);
      if (count < static_cast<int>(instances.size()))
        instances.resize(static_cast<std::size_t>(count));
      for (const auto& inst : instances) out.push_back(inst.to_json());
      break;
    }
    case TaskId::movie_rec: {
      auto instances = movie_rec::generate_instances(master_seed);
      if (count < static_cast<int>(instances.size()))
        instances.resize(static_cast<std::size_t>(count));
      for (const auto& inst : instances) out.push_back(inst.to_json());
      break;
    }
    case TaskId::circuit_dec: {
      for (const auto& inst : circuit::generate_instances(master_seed, count))
        out.push_back(inst.to_json());
      break;
    }
    case TaskId::word_chain: {
      const auto words = load_word_list(data.words_file());
      for (const auto& inst : word_chain::generate_instances(master_seed, count, words))
        out.push_back(inst.to_json());
      break;
    }
    case TaskId::twenty_q: {
      const auto files = list_lexicon_files(data.lexicon_dir());
      if (files.empty())
        throw std::runtime_error("no lexicon files under " + data.lexicon_dir() +
                                 "; run mtp-build-lexicons first");
      std::vector<std::vector<twenty_q::LexiconEntry>> lexicons;
      for (const auto& f : files) lexicons.push_back(twenty_q::read_lexicon_file(f));
      for (const auto& inst : twenty_q::generate_instances(master_seed, count, lexicons))
        out.push_back(inst.to_json());
      break;
    }
  }
  return out;
}

std::unique_ptr<Environment> make_environment(TaskId task, const Json& instance) {
  switch (task) {
    case TaskId::word_guess:
      return std::make_unique<word_guess::Env>(word_guess::Instance::from_json(instance));
    case TaskId::movie_rec:
      return std::make_unique<movie_rec::Env>(movie_rec::Instance::from_json(instance));
    case TaskId::circuit_dec:
      return std::make_unique<circuit::Env>(circuit::Instance::from_json(instance));
    case TaskId::word_chain: {
      auto inst = word_chain::Instance::from_json(instance);
      const std::uint64_t sim_seed = inst.sim_seed;
      return std::make_unique<word_chain::Env>(std::move(inst), sim_seed);
    }
    case TaskId::twenty_q: {
      auto inst = twenty_q::Instance::from_json(instance);
      const std::uint64_t sim_seed = inst.sim_seed;
      return std::make_unique<twenty_q::Env>(std::move(inst), sim_seed);
    }
  }
  throw std::logic_error("make_environment: unknown task");
}

EpisodeConfig config_for_instance(TaskId task, const Json& instance,
                                  std::optional<int> takeover) {
  EpisodeConfig config;
  config.task = task;
  config.instance_id = instance.at("id").get<std::uint64_t>();
  config.instance_seed = instance.at("instance_seed").get<std::uint64_t>();
  config.sim_seed = instance.at("sim_seed").get<std::uint64_t>();
  config.max_turns = default_max_turns(task);
  config.takeover_turn = takeover;
  return config;
}

void write_instances(const std::string& path, const std::vector<Json>& instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  for (const auto& j : instances) out << j.dump() << '\n';
}

std::vector<Json> read_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::vector<Json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(Json::parse(line));
  }
  return out;
}

}  // namespace mtp
