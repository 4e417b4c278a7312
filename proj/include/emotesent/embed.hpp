#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "emotesent/string_map.hpp"
#include "emotesent/tokenize.hpp"

namespace emotesent {

/// Skip-gram with negative sampling settings.
struct EmbeddingConfig {
  int dimension = 100;
  int window = 5;
  std::uint64_t min_count = 30;
  int negatives = 5;
  int epochs = 5;
  double initial_lr = 0.025;  // decays linearly to initial_lr * 1e-4
  double subsample = 1e-4;  // 0 disables frequent-token subsampling
  std::uint64_t seed = 1;
  int workers = 1;  // > 1 runs lock-free shared updates and is not deterministic
};

/// Small set of token kinds.
class KindSet {
 public:
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<TokenKind> kinds) {
    for (auto k : kinds) bits_ |= bit(k);
  }
  static constexpr KindSet all() {
    return {TokenKind::Word, TokenKind::Emote, TokenKind::Emoji, TokenKind::Emoticon};
  }
  constexpr KindSet with(TokenKind k) const {
    KindSet s = *this;
    s.bits_ |= bit(k);
    return s;
  }
  constexpr bool contains(TokenKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }

 private:
  static constexpr std::uint8_t bit(TokenKind k) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k));
  }
  std::uint8_t bits_ = 0;
};

/// Immutable token -> vector store with cosine k-NN queries.
class EmbeddingStore {
 public:
  using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  EmbeddingStore() = default;
  /// Throws ConfigError on size mismatches, duplicate tokens or non-finite values.
  EmbeddingStore(std::vector<std::string> tokens, std::vector<TokenKind> kinds,
                 std::vector<std::uint64_t> frequencies, Matrix vectors,
                 EmbeddingConfig config = {});

  std::size_t size() const { return tokens_.size(); }
  int dimension() const { return static_cast<int>(vectors_.cols()); }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  TokenKind kind(std::size_t i) const { return kinds_[i]; }
  std::uint64_t frequency(std::size_t i) const { return frequencies_[i]; }
  auto vector(std::size_t i) const { return vectors_.row(static_cast<Eigen::Index>(i)); }
  const Matrix& vectors() const { return vectors_; }
  double norm(std::size_t i) const { return norms_[static_cast<Eigen::Index>(i)]; }
  const EmbeddingConfig& config() const { return config_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::optional<std::size_t> index_of(std::string_view token) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<TokenKind> kinds_;
  std::vector<std::uint64_t> frequencies_;
  Matrix vectors_;
  Eigen::VectorXd norms_;
  EmbeddingConfig config_;
  StringMap<std::size_t> index_;
};

/// Trains SGNS vectors over token sequences. Only the input (center) matrix
/// is kept. Vocabulary order is frequency desc, token asc. Throws
/// TrainingError when fewer than two tokens reach min_count.
EmbeddingStore train_embeddings(std::span<const TokenSequence> corpus,
                                const EmbeddingConfig& config);

struct Neighbor {
  std::size_t index = 0;
  std::string token;
  double similarity = 0.0;
  TokenKind kind = TokenKind::Word;
};

using NeighborResult = std::vector<Neighbor>;

/// Dot product accumulated left to right in double. nearest() uses this
/// exact summation order so brute-force oracles reproduce its ties.
template <class A, class B>
double ordered_dot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a.derived().coeff(i)) * static_cast<double>(b.derived().coeff(i));
  }
  return sum;
}

/// Cosine similarity as the nearest() scan computes it; 0 when either norm is 0.
template <class A, class B>
double cosine_similarity(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double na = std::sqrt(ordered_dot(a, a));
  const double nb = std::sqrt(ordered_dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return ordered_dot(a, b) / (na * nb);
}

/// Top-k tokens by cosine similarity (desc, ties by token string asc),
/// restricted to `filter`, excluding the query token. Throws NotFoundError
/// for unknown tokens.
NeighborResult nearest(const EmbeddingStore& store, std::string_view query, std::size_t k,
                       KindSet filter = KindSet::all(), int threads = 0);

/// Raw-vector query; `exclude` lists store indices never returned. Throws
/// ConfigError when the dimension differs from the store's.
NeighborResult nearest(const EmbeddingStore& store, const Eigen::VectorXd& query, std::size_t k,
                       KindSet filter = KindSet::all(), std::span<const std::size_t> exclude = {},
                       int threads = 0);

/// k-NN of (sum of positive vectors - sum of negative vectors), excluding
/// every argument token.
NeighborResult analogy(const EmbeddingStore& store, std::span<const std::string> positive,
                       std::span<const std::string> negative, std::size_t k,
                       KindSet filter = KindSet::all(), int threads = 0);

/// Writes `<prefix>.txt` (word2vec text: header `count dim`, then
/// `token v1 ... vd`) and `<prefix>.json` (kinds, frequencies, config).
void save_embeddings(const EmbeddingStore& store, const std::filesystem::path& prefix);
/// Loads the pair written by save_embeddings. Without the sidecar, kinds
/// default to Word and frequencies to 0.
EmbeddingStore load_embeddings(const std::filesystem::path& prefix);

}  // namespace emotesent
