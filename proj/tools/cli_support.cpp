#include "cli_support.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emotesent/error.hpp"

namespace cli {

bool Registry::run() const {
  for (const auto& [app, action] : actions_) {
    if (app->parsed()) {
      action();
      return true;
    }
  }
  return false;
}

std::string command_path(const CLI::App* leaf) {
  std::vector<std::string> names;
  for (auto* a = leaf; a != nullptr && a->get_parent() != nullptr; a = a->get_parent()) {
    names.push_back(a->get_name());
  }
  std::string out;
  for (auto it = names.rbegin(); it != names.rend(); ++it) out += (out.empty() ? "" : " ") + *it;
  return out;
}

nlohmann::json options_json(const CLI::App* leaf) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto* opt : leaf->get_options()) {
    const auto name = opt->get_single_name();
    // The output location is not part of the run's configuration, so reruns
    // into another directory produce identical manifests.
    if (name == "help" || name == "out" || name.empty()) continue;
    if (opt->count() == 0) {
      doc[name] = opt->get_default_str();
    } else if (opt->get_expected_max() > 1 || opt->results().size() > 1) {
      doc[name] = opt->results();
    } else {
      doc[name] = opt->results().front();
    }
  }
  return doc;
}

OutputDir::OutputDir(fs::path dir, const CLI::App* leaf, const Globals& globals)
    : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  manifest_.command = command_path(leaf);
  manifest_.seed = globals.seed;
  manifest_.config = {{"options", options_json(leaf)}, {"threads", globals.threads}};
}

fs::path OutputDir::file(const std::string& name) {
  outputs_.push_back(name);
  return dir_ / name;
}

void OutputDir::input(const fs::path& path) {
  if (!path.empty()) manifest_.add_input(path);
}

void OutputDir::inputs(const std::vector<std::string>& paths) {
  for (const auto& p : paths) input(p);
}

void OutputDir::finish() {
  for (const auto& name : outputs_) manifest_.add_output(dir_, name);
  write_manifest(manifest_, dir_ / "manifest.json");
}

// -----------------------------------------------------------------------------

void add_processing(CLI::App* app, ProcessingOptions& o) {
  app->add_option("--level", o.level, "Processing level")
      ->check(CLI::IsMember({"P1", "P2", "P3"}))
      ->capture_default_str();
  app->add_option("--stopwords", o.stopwords, "Stop word list (default: bundled list)")
      ->check(CLI::ExistingFile);
  app->add_option("--lemmas", o.lemmas, "Lemma table, surface<TAB>lemma")->check(CLI::ExistingFile);
  app->add_flag("--no-suffix-lemmas", o.no_suffix_lemmas, "Disable the P3 suffix-rule fallback");
}

ProcessingConfig processing_config(const ProcessingOptions& o) {
  ProcessingConfig cfg;
  cfg.level = level_from(o.level);
  cfg.stopwords = o.stopwords.empty() ? default_stopwords() : load_stopwords(o.stopwords);
  if (!o.lemmas.empty()) cfg.lemmas = load_lemmas(o.lemmas);
  return cfg;
}

void add_hyper(CLI::App* app, Hyperparams& h) {
  auto* g = app->add_option_group("hyperparameters");
  g->add_option("--nb-alpha", h.nb.alpha, "Naive Bayes smoothing")->capture_default_str();
  g->add_option("--me-l2", h.me.l2, "Maximum entropy L2 penalty")->capture_default_str();
  g->add_option("--me-epochs", h.me.max_epochs, "Maximum entropy epoch cap")->capture_default_str();
  g->add_option("--svm-c", h.svm.c, "SVM C")->capture_default_str();
  g->add_option("--svm-epochs", h.svm.epochs, "SVM epochs")->capture_default_str();
  g->add_option("--rf-trees", h.rf.trees, "Trees per forest head")->capture_default_str();
  g->add_option("--rf-mtry", h.rf.features_per_split, "Features tried per split");
  g->add_option("--rf-min-leaf", h.rf.min_leaf, "Minimum leaf size")->capture_default_str();
  g->add_option("--rf-max-depth", h.rf.max_depth, "Maximum tree depth");
  g->add_flag("!--no-bootstrap", h.rf.bootstrap, "Grow trees on the full sample");
}

void add_text_model(CLI::App* app, TextModelOptions& o) {
  add_processing(app, o.processing);
  app->add_option("--algorithm", o.algorithm, "NB, ME, SVM or RF")
      ->check(CLI::IsMember({"NB", "ME", "SVM", "RF"}))
      ->capture_default_str();
  app->add_option("--order", o.order, "1 = unigrams, 2 = unigrams and bigrams")
      ->check(CLI::Range(1, 2))
      ->capture_default_str();
  app->add_option("--min-count", o.min_count, "Minimum n-gram count")->capture_default_str();
  app->add_flag("--binary", o.binary, "Binary instead of count features");
  app->add_option("--tag", o.tag, "Dataset tag stored with the model");
  add_hyper(app, o.hyper);
}

TextTrainingOptions text_training_options(const TextModelOptions& o, int threads) {
  TextTrainingOptions t;
  t.processing = processing_config(o.processing);
  t.order = order_from(o.order);
  t.min_count = o.min_count;
  t.weighting = o.binary ? FeatureWeighting::Binary : FeatureWeighting::Counts;
  t.algorithm = algorithm_from(o.algorithm);
  t.hyper = o.hyper;
  t.hyper.rf.threads = threads;
  t.suffix_lemma_fallback = !o.processing.no_suffix_lemmas;
  t.dataset_tag = o.tag;
  return t;
}

void add_lexicon(CLI::App* app, LexiconOptions& o, bool required) {
  auto* opt = app->add_option("--lexicon", o.paths,
                              "Sentiment lexicon (VADER TSV, or JSON when the name ends in .json); "
                              "repeat to merge")
                  ->check(CLI::ExistingFile);
  if (required) opt->required();
  app->add_option("--lexicon-scale", o.scale, "Native valence magnitude of TSV lexicons")
      ->capture_default_str();
}

SentimentLexicon load_lexicons(const LexiconOptions& o) {
  SentimentLexicon merged;
  for (const auto& p : o.paths) {
    LexiconLoadOptions lo;
    if (fs::path(p).extension() == ".json") {
      lo.format = LexiconFormat::Json;
      lo.scale = 1.0;
      lo.source = LexiconSource::User;
    } else {
      lo.scale = o.scale;
    }
    merged.merge(load_lexicon(p, lo));
  }
  return merged;
}

EmoteDictionary load_emotes(const std::vector<std::string>& paths) {
  std::vector<fs::path> files(paths.begin(), paths.end());
  return load_emote_dictionary(files);
}

Algorithm algorithm_from(const std::string& name) {
  const auto a = parse_algorithm(name);
  if (!a) throw ConfigError("unknown algorithm '" + name + "'");
  return *a;
}

ProcessingLevel level_from(const std::string& name) {
  const auto l = parse_processing_level(name);
  if (!l) throw ConfigError("unknown processing level '" + name + "'");
  return *l;
}

NgramOrder order_from(int order) {
  return order == 1 ? NgramOrder::Unigram : NgramOrder::UnigramBigram;
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

KindSet kinds_from(const std::string& list) {
  if (list.empty() || list == "all") return KindSet::all();
  std::vector<TokenKind> kinds;
  for (const auto& name : split_list(list)) {
    const auto k = parse_token_kind(name);
    if (!k) throw ConfigError("unknown token kind '" + name + "'");
    kinds.push_back(*k);
  }
  KindSet set;
  for (auto k : kinds) set = set.with(k);
  return set;
}

std::vector<std::string> load_messages(const fs::path& path) {
  std::vector<std::string> out;
  const auto ext = path.extension();
  if (ext == ".jsonl" || ext == ".json") {
    for (auto& m : load_chat_log(path).messages) out.push_back(std::move(m.text));
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
  }
  return out;
}

TextClassifier load_classifier(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return TextClassifier::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed classifier '" + path.string() + "': " + e.what());
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(1) + "\n");
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace cli
