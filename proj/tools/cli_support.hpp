#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emotesent/classify.hpp"
#include "emotesent/corpus.hpp"
#include "emotesent/embed.hpp"
#include "emotesent/manifest.hpp"
#include "emotesent/pipeline.hpp"
#include "emotesent/pseudodict.hpp"

namespace cli {

namespace fs = std::filesystem;
using namespace emotesent;

struct Globals {
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Leaf subcommands and the work they run once parsing has finished.
class Registry {
 public:
  explicit Registry(Globals& globals) : globals_(globals) {}
  const Globals& globals() const { return globals_; }
  void add(CLI::App* app, std::function<void()> action) { actions_.emplace_back(app, std::move(action)); }
  /// Runs the action of the parsed leaf. Returns false when none was parsed.
  bool run() const;

 private:
  Globals& globals_;
  std::vector<std::pair<CLI::App*, std::function<void()>>> actions_;
};

/// Collects the files a command writes and seals them with manifest.json.
class OutputDir {
 public:
  OutputDir(fs::path dir, const CLI::App* leaf, const Globals& globals);
  fs::path file(const std::string& name);
  void input(const fs::path& path);
  void inputs(const std::vector<std::string>& paths);
  void finish();
  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
  Manifest manifest_;
  std::vector<std::string> outputs_;
};

/// Space-joined names of nested subcommands, e.g. "embed train".
std::string command_path(const CLI::App* leaf);
/// Every option of the leaf with its parsed or default value.
nlohmann::json options_json(const CLI::App* leaf);

// Shared option groups --------------------------------------------------------

struct ProcessingOptions {
  std::string level = "P1";
  std::string stopwords;
  std::string lemmas;
  bool no_suffix_lemmas = false;
};
void add_processing(CLI::App* app, ProcessingOptions& o);
ProcessingConfig processing_config(const ProcessingOptions& o);

void add_hyper(CLI::App* app, Hyperparams& h);

struct TextModelOptions {
  ProcessingOptions processing;
  std::string algorithm = "RF";
  int order = 2;
  std::size_t min_count = 1;
  bool binary = false;
  std::string tag;
  Hyperparams hyper;
};
void add_text_model(CLI::App* app, TextModelOptions& o);
TextTrainingOptions text_training_options(const TextModelOptions& o, int threads);

struct LexiconOptions {
  std::vector<std::string> paths;
  double scale = 4.0;
};
void add_lexicon(CLI::App* app, LexiconOptions& o, bool required);
/// `.json` files are read as JSON (scale 1), anything else as VADER TSV.
SentimentLexicon load_lexicons(const LexiconOptions& o);

EmoteDictionary load_emotes(const std::vector<std::string>& paths);
Algorithm algorithm_from(const std::string& name);
ProcessingLevel level_from(const std::string& name);
NgramOrder order_from(int order);
KindSet kinds_from(const std::string& list);
std::vector<std::string> split_list(const std::string& list);

/// One message per line. JSON-lines chat logs are read when the file ends in
/// .jsonl or .json, otherwise plain text.
std::vector<std::string> load_messages(const fs::path& path);

TextClassifier load_classifier(const fs::path& path);
void write_json_file(const fs::path& path, const nlohmann::json& doc);
void write_text_file(const fs::path& path, const std::string& text);

// Subcommand registration -----------------------------------------------------

void register_corpus(CLI::App& app, Registry& registry);
void register_tokenize(CLI::App& app, Registry& registry);
void register_features(CLI::App& app, Registry& registry);
void register_train(CLI::App& app, Registry& registry);
void register_eval(CLI::App& app, Registry& registry);
void register_loove(CLI::App& app, Registry& registry);
void register_grid(CLI::App& app, Registry& registry);
void register_embed(CLI::App& app, Registry& registry);
void register_pseudodict(CLI::App& app, Registry& registry);
void register_analyze(CLI::App& app, Registry& registry);
void register_verify(CLI::App& app, Registry& registry);

}  // namespace cli
