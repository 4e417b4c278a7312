#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "emotesent/classify.hpp"
#include "emotesent/pipeline.hpp"
#include "emotesent/pseudodict.hpp"

namespace emotesent {

/// Pooled pseudo-dictionary valences of the emotes in one message.
struct EmoteStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  bool present = false;

  friend bool operator==(const EmoteStats&, const EmoteStats&) = default;
};

EmoteStats extract_emote_stats(std::span<const Token> tokens, const PseudoDictionary& dict);

/// How CLF1's output enters the fusion vector.
enum class Clf1Encoding { OneHot, Scores };

struct LooveOptions {
  bool use_clf1 = true;
  bool use_stats = true;
  Clf1Encoding encoding = Clf1Encoding::OneHot;
  Algorithm clf2_algorithm = Algorithm::RandomForest;
  Hyperparams hyper;
};

inline constexpr int kFusionLayoutVersion = 1;

/// Frozen CLF1, pseudo-dictionary and the fusion classifier CLF2.
///
/// Fusion layout (version 1):
///   [clf1_negative, clf1_neutral, clf1_positive | mean, min, max, count, present]
/// The CLF1 block is absent when use_clf1 is false (5 features). With
/// use_stats false there is no CLF2 and the prediction is CLF1's own.
struct LooveModel {
  std::shared_ptr<const TextClassifier> clf1;
  PseudoDictionary pseudodict;
  std::optional<TrainedModel> clf2;
  LooveOptions options;
  std::uint64_t seed = 0;

  std::vector<std::string> fusion_feature_names() const;
  std::size_t fusion_size() const { return fusion_feature_names().size(); }
};

/// Fusion features for an already-tokenized (raw, unprocessed) message.
Eigen::VectorXd fusion_vector(const LooveModel& model, std::span<const Token> tokens,
                              EmoteStats* stats_out = nullptr);

/// Trains CLF2 on fusion vectors of `train`; CLF1 is shared and never
/// modified. Throws ConfigError when both CLF1 and the stats are disabled
/// or CLF1 is required but missing, TrainingError on degenerate labels.
LooveModel train_loove(std::span<const LabeledExample> train,
                       std::shared_ptr<const TextClassifier> clf1, PseudoDictionary pseudodict,
                       const EmoteDictionary& emotes, const LooveOptions& options,
                       std::uint64_t seed);

struct LoovePrediction {
  SentimentLabel label = SentimentLabel::Neutral;
  Eigen::VectorXd fusion;
  EmoteStats stats;
};

LoovePrediction predict_loove(const LooveModel& model, std::string_view text,
                              const EmoteDictionary& emotes);

EvalReport evaluate_loove(const LooveModel& model, std::span<const LabeledExample> test,
                          const EmoteDictionary& emotes);

/// Gini importances of CLF2's fusion features grouped into "clf1_label" and
/// "emote_stats". Throws UnsupportedError unless CLF2 is a random forest.
ImportanceReport feature_importance_loove(const LooveModel& model);

/// Bundle directory: clf1.json, pseudodict.tsv, clf2.json, manifest.json.
void save_loove_bundle(const LooveModel& model, const std::filesystem::path& dir);
LooveModel load_loove_bundle(const std::filesystem::path& dir);

}  // namespace emotesent
