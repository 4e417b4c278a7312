#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "emotesent/classify.hpp"
#include "emotesent/embed.hpp"
#include "emotesent/features.hpp"
#include "emotesent/pseudodict.hpp"
#include "emotesent/tokenize.hpp"

namespace emotesent {

// ---------------------------------------------------------------------------
// Token statistics

struct KindCounts {
  std::uint64_t unique = 0;
  std::uint64_t occurrences = 0;
  double unique_fraction = 0.0;
  double occurrence_fraction = 0.0;
};

struct TokenTypeStats {
  std::array<KindCounts, kNumTokenKinds> kinds;  // indexed by TokenKind
  std::uint64_t unique_total = 0;
  std::uint64_t occurrence_total = 0;

  const KindCounts& operator[](TokenKind k) const { return kinds[static_cast<std::size_t>(k)]; }
  std::string to_csv() const;
};

/// Unique-token and occurrence counts per kind. A token text counts under
/// the kind it first appeared with.
TokenTypeStats token_type_stats(std::span<const TokenSequence> corpus);

/// Frequencies per kind, sorted descending (ties by token asc), for rank plots.
std::map<TokenKind, std::vector<std::pair<std::string, std::uint64_t>>> rank_frequency(
    std::span<const TokenSequence> corpus);

// ---------------------------------------------------------------------------
// Zipf fit

struct RankFrequencyFit {
  double exponent = 0.0;  // -slope of log f against log r
  double intercept = 0.0;  // log C
  std::size_t first_rank = 1;
  std::size_t last_rank = 1;
  std::optional<double> r_squared;  // nullopt when frequencies are constant
  bool degenerate = false;
};

/// Least squares on (log rank, log frequency) over ranks [first_rank,
/// last_rank] (1-based, clipped to the table). `frequencies` is in rank
/// order. Throws FitError with fewer than 10 ranks or non-positive values.
RankFrequencyFit zipf_fit(std::span<const double> frequencies, std::size_t first_rank = 1,
                          std::size_t last_rank = 100000);

// ---------------------------------------------------------------------------
// Embedding-space analyses

/// The `per_kind` most frequent store tokens of each kind (frequency desc,
/// token asc).
std::vector<std::size_t> top_tokens_per_kind(const EmbeddingStore& store, std::size_t per_kind);

struct NeighborTypeDistribution {
  /// Row = query kind, column = neighbor kind; rows without samples are zero
  /// and flagged in `sampled`.
  Eigen::Matrix4d fractions = Eigen::Matrix4d::Zero();
  std::array<std::size_t, kNumTokenKinds> sampled{};

  std::string to_csv() const;
};

/// For every sample token, fractions of each kind among its k nearest
/// neighbors, averaged per query kind.
NeighborTypeDistribution neighbor_type_distribution(const EmbeddingStore& store,
                                                    std::span<const std::size_t> sample,
                                                    std::size_t k = 100, int threads = 0);

/// Class of a valence under an even split of [-1, 1] into thirds.
SentimentLabel valence_class(double valence);

struct SentimentHistogram {
  std::size_t bins = 20;
  /// Per source class (kClassOrder), counts of tagged-neighbor valences over
  /// equal-width bins of [-1, 1].
  std::array<std::vector<std::uint64_t>, kNumClasses> counts;
  std::array<std::size_t, kNumClasses> sources{};
  std::uint64_t total() const;
  std::string to_csv() const;
};

/// For every store token with a valence in `valences`, bins the valences of
/// the tagged tokens among its `neighbors` nearest neighbors.
SentimentHistogram sentiment_neighborhood_histogram(const EmbeddingStore& store,
                                                    const SentimentLexicon& valences,
                                                    std::size_t bins = 20,
                                                    std::size_t neighbors = 1000,
                                                    int threads = 0);
/// Lexicon view of a pseudo-dictionary (source User).
SentimentLexicon as_lexicon(const PseudoDictionary& dict);

struct RankHistogram {
  std::vector<std::uint64_t> counts;  // positions bucketed by bin_width
  double mean = 0.0;
  double median = 0.0;
  std::size_t n = 0;
};

struct FeatureRankHistograms {
  std::size_t top_n = 100;
  std::size_t bin_width = 10;
  RankHistogram emote;  // EmoteOnly and EmotePlus features
  RankHistogram other;
  std::string to_csv() const;
};

/// 0-based positions of emote vs other features among each head's top_n
/// ranked features, pooled over the three heads. `groups` uses the
/// feature_groups() names.
FeatureRankHistograms top_feature_rank_histogram(const ImportanceReport& report,
                                                 std::size_t top_n = 100,
                                                 std::size_t bin_width = 10);

/// TSV rows `token<TAB>kind<TAB>frequency<TAB>v1...vd` for external projection.
void export_vectors(const EmbeddingStore& store, std::span<const std::size_t> sample,
                    const std::filesystem::path& path);

}  // namespace emotesent
