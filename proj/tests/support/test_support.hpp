#pragma once

// Shared fixtures and brute-force reference implementations for the tests.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "emotesent/classify.hpp"
#include "emotesent/corpus.hpp"
#include "emotesent/embed.hpp"
#include "emotesent/features.hpp"
#include "emotesent/pseudodict.hpp"
#include "emotesent/tokenize.hpp"

namespace testing {

using namespace emotesent;

FeatureMatrix to_sparse(const Eigen::MatrixXd& dense);
EmoteDictionary emote_dict(std::initializer_list<std::string> codes);
std::filesystem::path scratch_dir(const std::string& name);

EmbeddingStore make_store(const std::vector<std::string>& tokens,
                          const std::vector<TokenKind>& kinds, const Eigen::MatrixXf& vectors);

/// Random store with small-integer components (many exact ties) and some
/// verbatim duplicate rows.
EmbeddingStore random_store(std::mt19937_64& rng, std::size_t n, int dim);

namespace oracle {

/// Bayes rule evaluated directly in probability space: prior times the
/// product of Laplace-smoothed multinomial parameters, normalized.
Eigen::Vector3d nb_posterior(const Eigen::MatrixXd& docs, const std::vector<SentimentLabel>& labels,
                             const Eigen::VectorXd& x, double alpha);

/// Full sort of every candidate by (cosine desc, token asc).
NeighborResult knn(const EmbeddingStore& store, const Eigen::VectorXd& query,
                   std::size_t k, KindSet filter, const std::vector<std::size_t>& exclude);
NeighborResult knn(const EmbeddingStore& store, std::size_t query, std::size_t k,
                   KindSet filter = KindSet::all());

/// Full ranking, truncate to the cap, keep non-emote lexicon tokens, first k, mean.
std::optional<PseudoDictEntry> pseudodict_entry(const EmbeddingStore& store,
                                                const SentimentLexicon& lexicon,
                                                std::size_t index, std::size_t k,
                                                std::size_t cap);
PseudoDictionary pseudodict(const EmbeddingStore& store, const SentimentLexicon& lexicon,
                            std::size_t k, std::size_t cap);

}  // namespace oracle

// Synthetic corpora ---------------------------------------------------------

/// "emoA" only ever appears with {good, great, nice}, "emoB" only with
/// {bad, awful, sad}; the rest is neutral filler with a few neutral emotes.
struct PlantedCorpus {
  std::vector<TokenSequence> sentences;
  SentimentLexicon lexicon;
};
PlantedCorpus planted_corpus(std::size_t sentences, std::uint64_t seed);

/// Messages of random filler words plus one emote whose planted valence
/// decides the label. `paraphrases` carry the same labels with the emote
/// removed (so their words hold no signal).
struct EmoteSignalData {
  EmoteDictionary emotes;
  PseudoDictionary pseudodict;
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  std::vector<LabeledExample> paraphrases;
};
EmoteSignalData emote_signal_data(std::size_t train, std::size_t test, std::uint64_t seed);

/// Three well separated 2-D blobs (one per class), n points in total.
struct Blobs {
  FeatureMatrix x;
  std::vector<SentimentLabel> y;
};
Blobs separable_blobs(std::size_t n, std::uint64_t seed);

}  // namespace testing
