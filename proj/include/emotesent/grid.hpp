#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emotesent/loove.hpp"
#include "emotesent/pipeline.hpp"

namespace emotesent {

struct BaselineGridConfig {
  std::vector<ProcessingLevel> levels = {ProcessingLevel::P1, ProcessingLevel::P2,
                                         ProcessingLevel::P3};
  std::vector<Algorithm> algorithms = {Algorithm::NaiveBayes, Algorithm::MaxEnt,
                                       Algorithm::LinearSvm, Algorithm::RandomForest};
  std::vector<NgramOrder> orders = {NgramOrder::Unigram, NgramOrder::UnigramBigram};
  StopWords stopwords = default_stopwords();
  LemmaTable lemmas;
  std::size_t min_count = 1;
  FeatureWeighting weighting = FeatureWeighting::Counts;
  Hyperparams hyper;
};

struct BaselineCell {
  ProcessingLevel level;
  Algorithm algorithm;
  NgramOrder order;
  double accuracy = 0.0;
};

/// Accuracy of every level x algorithm x order combination on a fixed split.
std::vector<BaselineCell> run_baseline_grid(std::span<const LabeledExample> train,
                                            std::span<const LabeledExample> test,
                                            const EmoteDictionary& emotes,
                                            const BaselineGridConfig& config,
                                            std::uint64_t seed);

/// Rows "NB.1", "NB.2", ... and one column per processing level, accuracies
/// in percent.
std::string baseline_grid_csv(std::span<const BaselineCell> cells);

struct ExternalDataset {
  std::string tag;  // row label, e.g. "T"
  std::vector<LabeledExample> train;
};

struct LooveGridConfig {
  std::vector<Algorithm> clf1_algorithms = {Algorithm::MaxEnt, Algorithm::LinearSvm,
                                            Algorithm::RandomForest};
  /// CLF1 algorithm of the stats-disabled column.
  Algorithm no_stats_algorithm = Algorithm::RandomForest;
  TextTrainingOptions clf1_options;  // algorithm field is overridden per cell
  LooveOptions loove;
};

/// Rows: one per external dataset, then "none" (no CLF1). Columns: one per
/// CLF1 algorithm, then "no_stats" (CLF1 alone). Cell (dataset, algorithm)
/// is full LOOVE; ("none", algorithm) is the stats-only model with CLF2 of
/// that algorithm; (dataset, "no_stats") is CLF1 alone; ("none",
/// "no_stats") would disable both inputs and stays empty.
struct LooveGrid {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> accuracy;

  std::size_t cell_count() const { return rows.size() * columns.size(); }
  std::string to_csv() const;
};

LooveGrid run_loove_grid(std::span<const ExternalDataset> datasets,
                         std::span<const LabeledExample> twitch_train,
                         std::span<const LabeledExample> twitch_test,
                         const PseudoDictionary& pseudodict, const EmoteDictionary& emotes,
                         const LooveGridConfig& config, std::uint64_t seed);

}  // namespace emotesent
