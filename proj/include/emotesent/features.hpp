#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>
#include <nlohmann/json_fwd.hpp>

#include "emotesent/tokenize.hpp"

namespace emotesent {

enum class NgramOrder { Unigram = 1, UnigramBigram = 2 };
std::optional<NgramOrder> parse_ngram_order(std::string_view text);

/// Emote involvement of an n-gram feature.
enum class FeatureKind { EmoteOnly, EmotePlus, Other };
std::string_view to_string(FeatureKind kind);
std::optional<FeatureKind> parse_feature_kind(std::string_view text);

enum class FeatureWeighting { Counts, Binary };

struct Ngram {
  std::vector<std::string> tokens;  // one or two token texts
  FeatureKind kind = FeatureKind::Other;
};

/// Sparse bag-of-ngrams vector indexed by NgramVocab positions.
using FeatureVector = Eigen::SparseVector<double>;
/// Row-per-example design matrix.
using FeatureMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class NgramVocab {
 public:
  NgramVocab() = default;
  NgramVocab(NgramOrder order, std::size_t min_count, std::vector<Ngram> ngrams);

  std::size_t size() const { return ngrams_.size(); }
  NgramOrder order() const { return order_; }
  std::size_t min_count() const { return min_count_; }
  const Ngram& ngram(std::size_t index) const { return ngrams_.at(index); }
  FeatureKind kind(std::size_t index) const { return ngrams_.at(index).kind; }
  const std::vector<Ngram>& ngrams() const { return ngrams_; }

  std::optional<std::size_t> index_of(std::string_view unigram) const;
  std::optional<std::size_t> index_of(std::string_view first, std::string_view second) const;

  /// Space-joined display form, e.g. "hi Kappa".
  std::string label(std::size_t index) const;

  nlohmann::json to_json() const;
  static NgramVocab from_json(const nlohmann::json& doc);

  /// SHA-256 of the serialized vocabulary; models record it.
  std::string hash() const;

 private:
  NgramOrder order_ = NgramOrder::Unigram;
  std::size_t min_count_ = 1;
  std::vector<Ngram> ngrams_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Indices follow first occurrence over the corpus (unigram before the
/// bigram it starts). Bigrams never span messages. An n-gram's kind comes
/// from the token kinds at its first occurrence. Throws ConfigError when no
/// n-gram reaches `min_count`.
NgramVocab build_vocab(std::span<const TokenSequence> corpus, NgramOrder order,
                       std::size_t min_count = 1);

/// Counts of in-vocabulary n-grams; out-of-vocabulary n-grams are ignored.
FeatureVector vectorize(std::span<const Token> tokens, const NgramVocab& vocab,
                        FeatureWeighting weighting = FeatureWeighting::Counts);

FeatureMatrix stack_rows(std::span<const FeatureVector> rows, Eigen::Index cols);

/// Group name per feature index ("emote_only", "emote_plus", "other"), for
/// importance aggregation.
std::vector<std::string> feature_groups(const NgramVocab& vocab);

}  // namespace emotesent
