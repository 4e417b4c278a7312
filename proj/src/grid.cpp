#include "emotesent/grid.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "emotesent/error.hpp"

namespace emotesent {

namespace {

std::string percent(double accuracy) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * accuracy);
  return buf;
}

}  // namespace

std::vector<BaselineCell> run_baseline_grid(std::span<const LabeledExample> train,
                                            std::span<const LabeledExample> test,
                                            const EmoteDictionary& emotes,
                                            const BaselineGridConfig& config,
                                            std::uint64_t seed) {
  if (train.empty() || test.empty()) throw ConfigError("baseline grid needs train and test data");
  std::vector<BaselineCell> cells;
  for (const auto level : config.levels) {
    for (const auto algorithm : config.algorithms) {
      for (const auto order : config.orders) {
        TextTrainingOptions options;
        options.processing = {level, config.stopwords, config.lemmas};
        options.order = order;
        options.min_count = config.min_count;
        options.weighting = config.weighting;
        options.algorithm = algorithm;
        options.hyper = config.hyper;
        const auto clf = train_text_classifier(train, emotes, options, seed);
        cells.push_back({level, algorithm, order, evaluate(clf, test, emotes).accuracy});
      }
    }
  }
  return cells;
}

std::string baseline_grid_csv(std::span<const BaselineCell> cells) {
  std::vector<ProcessingLevel> levels;
  std::vector<std::string> rows;
  std::map<std::pair<std::string, ProcessingLevel>, double> table;
  for (const auto& c : cells) {
    if (std::find(levels.begin(), levels.end(), c.level) == levels.end()) levels.push_back(c.level);
    const auto row = std::string(to_string(c.algorithm)) + "." + std::to_string(static_cast<int>(c.order));
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    table[{row, c.level}] = c.accuracy;
  }
  std::ostringstream out;
  out << "model";
  for (const auto l : levels) out << ',' << to_string(l);
  out << '\n';
  for (const auto& r : rows) {
    out << r;
    for (const auto l : levels) {
      const auto it = table.find({r, l});
      out << ',' << (it == table.end() ? std::string() : percent(it->second));
    }
    out << '\n';
  }
  return out.str();
}

std::string LooveGrid::to_csv() const {
  std::ostringstream out;
  out << "clf1_dataset";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << rows[r];
    for (const auto& cell : accuracy[r]) out << ',' << (cell ? percent(*cell) : std::string());
    out << '\n';
  }
  return out.str();
}

LooveGrid run_loove_grid(std::span<const ExternalDataset> datasets,
                         std::span<const LabeledExample> twitch_train,
                         std::span<const LabeledExample> twitch_test,
                         const PseudoDictionary& pseudodict, const EmoteDictionary& emotes,
                         const LooveGridConfig& config, std::uint64_t seed) {
  if (twitch_train.empty() || twitch_test.empty()) {
    throw ConfigError("LOOVE grid needs Twitch train and test data");
  }
  LooveGrid grid;
  for (const auto& d : datasets) grid.rows.push_back(d.tag);
  grid.rows.emplace_back("none");
  for (const auto a : config.clf1_algorithms) grid.columns.emplace_back(to_string(a));
  grid.columns.emplace_back("no_stats");
  grid.accuracy.assign(grid.rows.size(),
                       std::vector<std::optional<double>>(grid.columns.size()));

  auto clf1_for = [&](const ExternalDataset& d, Algorithm a) {
    auto options = config.clf1_options;
    options.algorithm = a;
    options.dataset_tag = d.tag;
    return std::make_shared<const TextClassifier>(
        train_text_classifier(d.train, emotes, options, seed));
  };

  for (std::size_t r = 0; r < datasets.size(); ++r) {
    std::map<Algorithm, std::shared_ptr<const TextClassifier>> trained;
    for (std::size_t c = 0; c < config.clf1_algorithms.size(); ++c) {
      const auto a = config.clf1_algorithms[c];
      auto clf1 = trained[a] = clf1_for(datasets[r], a);
      auto options = config.loove;
      options.use_clf1 = options.use_stats = true;
      const auto model = train_loove(twitch_train, clf1, pseudodict, emotes, options, seed);
      grid.accuracy[r][c] = evaluate_loove(model, twitch_test, emotes).accuracy;
    }
    auto& clf1 = trained[config.no_stats_algorithm];
    if (!clf1) clf1 = clf1_for(datasets[r], config.no_stats_algorithm);
    auto options = config.loove;
    options.use_clf1 = true;
    options.use_stats = false;
    const auto model = train_loove(twitch_train, clf1, pseudodict, emotes, options, seed);
    grid.accuracy[r].back() = evaluate_loove(model, twitch_test, emotes).accuracy;
  }

  const auto none = datasets.size();
  for (std::size_t c = 0; c < config.clf1_algorithms.size(); ++c) {
    auto options = config.loove;
    options.use_clf1 = false;
    options.use_stats = true;
    options.clf2_algorithm = config.clf1_algorithms[c];
    const auto model = train_loove(twitch_train, nullptr, pseudodict, emotes, options, seed);
    grid.accuracy[none][c] = evaluate_loove(model, twitch_test, emotes).accuracy;
  }
  return grid;
}

}  // namespace emotesent
