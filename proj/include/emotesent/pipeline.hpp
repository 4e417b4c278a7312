#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "emotesent/classify.hpp"
#include "emotesent/corpus.hpp"
#include "emotesent/features.hpp"
#include "emotesent/tokenize.hpp"

namespace emotesent {

/// Text-in, label-out classifier: processing settings, n-gram vocabulary and
/// a trained model. This is what CLF1 is in the two-stage classifier.
struct TextClassifier {
  ProcessingConfig processing;
  NgramVocab vocab;
  FeatureWeighting weighting = FeatureWeighting::Counts;
  TrainedModel model;
  std::string dataset_tag;  // e.g. "EC", "T"; free-form

  FeatureVector features(std::span<const Token> raw_tokens) const;
  Prediction predict(std::span<const Token> raw_tokens) const;
  Prediction predict(std::string_view text, const EmoteDictionary& emotes) const;

  nlohmann::json to_json() const;
  static TextClassifier from_json(const nlohmann::json& doc);
};

struct TextTrainingOptions {
  ProcessingConfig processing;
  NgramOrder order = NgramOrder::UnigramBigram;
  std::size_t min_count = 1;
  FeatureWeighting weighting = FeatureWeighting::Counts;
  Algorithm algorithm = Algorithm::RandomForest;
  Hyperparams hyper;
  /// P3 only: add suffix-rule lemmas derived from the training vocabulary.
  bool suffix_lemma_fallback = true;
  std::string dataset_tag;
};

TextClassifier train_text_classifier(std::span<const LabeledExample> data,
                                     const EmoteDictionary& emotes,
                                     const TextTrainingOptions& options, std::uint64_t seed);

EvalReport evaluate(const TextClassifier& classifier, std::span<const LabeledExample> test,
                    const EmoteDictionary& emotes);

}  // namespace emotesent
