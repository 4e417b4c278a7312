#include "emotesent/pipeline.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "emotesent/error.hpp"

namespace emotesent {

FeatureVector TextClassifier::features(std::span<const Token> raw_tokens) const {
  const auto processed = process(raw_tokens, processing);
  return vectorize(processed, vocab, weighting);
}

Prediction TextClassifier::predict(std::span<const Token> raw_tokens) const {
  return emotesent::predict(model, features(raw_tokens));
}

Prediction TextClassifier::predict(std::string_view text, const EmoteDictionary& emotes) const {
  return predict(tokenize(text, emotes));
}

nlohmann::json TextClassifier::to_json() const {
  std::vector<std::string> stop(processing.stopwords.begin(), processing.stopwords.end());
  std::sort(stop.begin(), stop.end());
  const std::map<std::string, std::string> lemmas(processing.lemmas.begin(),
                                                  processing.lemmas.end());
  return {{"format", "emotesent-text-classifier"},
          {"version", 1},
          {"dataset", dataset_tag},
          {"processing",
           {{"level", to_string(processing.level)}, {"stopwords", stop}, {"lemmas", lemmas}}},
          {"weighting", weighting == FeatureWeighting::Binary ? "binary" : "counts"},
          {"vocab", vocab.to_json()},
          {"model", model.to_json()}};
}

TextClassifier TextClassifier::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "emotesent-text-classifier" || doc.at("version") != 1) {
      throw FormatError("unsupported classifier format/version");
    }
    TextClassifier c;
    c.dataset_tag = doc.value("dataset", "");
    const auto& p = doc.at("processing");
    const auto level = parse_processing_level(p.at("level").get<std::string>());
    if (!level) throw FormatError("unknown processing level");
    c.processing.level = *level;
    for (const auto& w : p.at("stopwords")) c.processing.stopwords.insert(w.get<std::string>());
    for (const auto& [k, v] : p.at("lemmas").items()) c.processing.lemmas[k] = v.get<std::string>();
    c.weighting = doc.at("weighting") == "binary" ? FeatureWeighting::Binary
                                                  : FeatureWeighting::Counts;
    c.vocab = NgramVocab::from_json(doc.at("vocab"));
    c.model = TrainedModel::from_json(doc.at("model"));
    if (c.model.n_features != c.vocab.size()) {
      throw FormatError("model width does not match its vocabulary");
    }
    if (!c.model.vocab_hash.empty() && c.model.vocab_hash != c.vocab.hash()) {
      throw FormatError("model was trained on a different vocabulary");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed classifier JSON: ") + e.what());
  }
}

TextClassifier train_text_classifier(std::span<const LabeledExample> data,
                                     const EmoteDictionary& emotes,
                                     const TextTrainingOptions& options, std::uint64_t seed) {
  if (data.empty()) throw TrainingError("training set is empty");
  TextClassifier c;
  c.processing = options.processing;
  c.weighting = options.weighting;
  c.dataset_tag = options.dataset_tag;

  std::vector<TokenSequence> raw;
  raw.reserve(data.size());
  for (const auto& ex : data) raw.push_back(tokenize(ex.text, emotes));

  if (c.processing.level == ProcessingLevel::P3 && options.suffix_lemma_fallback) {
    std::unordered_set<std::string> words;
    for (const auto& seq : raw) {
      for (const auto& t : process(seq, ProcessingLevel::P2, c.processing.stopwords)) {
        if (t.kind == TokenKind::Word) words.insert(t.text);
      }
    }
    c.processing.lemmas = merge_lemmas(c.processing.lemmas, suffix_lemmas(words));
  }

  std::vector<TokenSequence> processed;
  processed.reserve(raw.size());
  for (const auto& seq : raw) processed.push_back(process(seq, c.processing));
  c.vocab = build_vocab(processed, options.order, options.min_count);

  std::vector<FeatureVector> rows;
  std::vector<SentimentLabel> labels;
  rows.reserve(processed.size());
  for (std::size_t i = 0; i < processed.size(); ++i) {
    rows.push_back(vectorize(processed[i], c.vocab, c.weighting));
    labels.push_back(data[i].label);
  }
  const FeatureMatrix x = stack_rows(rows, static_cast<Eigen::Index>(c.vocab.size()));
  c.model = train(options.algorithm, x, labels, options.hyper, seed);
  c.model.vocab_hash = c.vocab.hash();
  return c;
}

EvalReport evaluate(const TextClassifier& classifier, std::span<const LabeledExample> test,
                    const EmoteDictionary& emotes) {
  std::vector<SentimentLabel> truth, predicted;
  for (const auto& ex : test) {
    truth.push_back(ex.label);
    predicted.push_back(classifier.predict(ex.text, emotes).label);
  }
  return score_predictions(truth, predicted);
}

}  // namespace emotesent
