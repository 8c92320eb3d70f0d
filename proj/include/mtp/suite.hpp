#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mtp/env.hpp"
#include "mtp/types.hpp"

namespace mtp {

// Bundled data files. Resolution order: explicit argument, MTP_DATA_DIR
// environment variable, compiled-in default.
struct DataPaths {
  std::string data_dir;

  std::string words_file() const { return data_dir + "/words.txt"; }
  std::string taxonomy_file() const { return data_dir + "/wordnet_nouns.tsv"; }
  std::string lexicon_dir() const { return data_dir + "/lexicons"; }

  static DataPaths locate(const std::string& override_dir = "");
};

std::vector<std::string> load_word_list(const std::string& path);

// Paths of the twenty-questions lexicon files, sorted.
std::vector<std::string> list_lexicon_files(const std::string& dir);

// All instances for one task as JSONL payloads (count 0 = the task default).
std::vector<Json> generate_task_instances(TaskId task, std::uint64_t master_seed, int count,
                                          const DataPaths& data);

// Environment for one instance payload; the simulator stream comes from the
// instance's sim_seed.
std::unique_ptr<Environment> make_environment(TaskId task, const Json& instance);

EpisodeConfig config_for_instance(TaskId task, const Json& instance,
                                  std::optional<int> takeover = std::nullopt);

void write_instances(const std::string& path, const std::vector<Json>& instances);
std::vector<Json> read_instances(const std::string& path);

}  // namespace mtp
