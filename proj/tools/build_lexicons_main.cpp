#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <set>

#include "mtp/suite.hpp"
#include "mtp/twenty_questions.hpp"

// Offline tool: turns the noun taxonomy dump plus the bundled word list into
// the twenty-questions lexicon files the runtime loads.

int main(int argc, char** argv) {
  CLI::App app{"Build twenty-questions lexicon files from the noun taxonomy dump"};
  std::string dump = "data/wordnet_nouns.tsv";
  std::string words = "data/words.txt";
  std::string out_dir = "data/lexicons";
  std::uint64_t seed = 7;
  int target_size = 90;
  app.add_option("--dump", dump, "Noun is-a edge file");
  app.add_option("--words", words, "Bundled word list");
  app.add_option("--out", out_dir, "Output directory for lexicon_<i>.tsv");
  app.add_option("--seed", seed, "Partition seed");
  app.add_option("--target-size", target_size, "Preferred words per lexicon");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto edges = mtp::twenty_q::load_taxonomy(dump);
    const auto word_vec = mtp::load_word_list(words);
    const std::set<std::string> word_set(word_vec.begin(), word_vec.end());
    const auto lexicons = mtp::twenty_q::build_lexicons(edges, word_set, seed, target_size);

    std::filesystem::create_directories(out_dir);
    for (std::size_t i = 0; i < lexicons.size(); ++i) {
      const std::string path = out_dir + "/lexicon_" + std::to_string(i) + ".tsv";
      mtp::twenty_q::write_lexicon_file(path, lexicons[i]);
      std::cout << path << ": " << lexicons[i].size() << " words\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
