#include <doctest.h>

#include <random>

#include "emotesent/embed.hpp"
#include "emotesent/error.hpp"
#include "test_support.hpp"

using namespace emotesent;

namespace {

EmbeddingStore triangle() {
  Eigen::MatrixXf v(3, 2);
  v << 1, 0, 0.9f, 0.1f, 0, 1;
  return testing::make_store({"a", "b", "c"}, {TokenKind::Word, TokenKind::Emote, TokenKind::Word},
                             v);
}

std::vector<std::string> tokens_of(const NeighborResult& r) {
  std::vector<std::string> out;
  for (const auto& n : r) out.push_back(n.token);
  return out;
}

}  // namespace

TEST_CASE("nearest neighbors of a hand-built store") {
  const auto store = triangle();
  const auto r = nearest(store, "a", 2);
  REQUIRE(r.size() == 2);
  CHECK(r[0].token == "b");
  CHECK(r[1].token == "c");
  CHECK(r[0].similarity == doctest::Approx(0.9 / std::sqrt(0.82)).epsilon(1e-6));
  CHECK(r[1].similarity == 0.0);
  CHECK(r[0].kind == TokenKind::Emote);

  CHECK(nearest(store, "a", 10).size() == 2);
  CHECK(nearest(store, "a", 0).empty());
  CHECK(tokens_of(nearest(store, "a", 5, {TokenKind::Word})) == std::vector<std::string>{"c"});
  CHECK(nearest(store, "a", 5, KindSet{}).empty());
  CHECK_THROWS_AS(nearest(store, "missing", 1), NotFoundError);
  CHECK_THROWS_AS(nearest(store, Eigen::VectorXd::Ones(3), 1), ConfigError);
}

TEST_CASE("store construction validates its input") {
  Eigen::MatrixXf v(2, 2);
  v << 1, 0, 0, 1;
  CHECK_THROWS_AS(testing::make_store({"a", "a"}, {TokenKind::Word, TokenKind::Word}, v),
                  ConfigError);
  CHECK_THROWS_AS(testing::make_store({"a"}, {TokenKind::Word}, v), ConfigError);
  v(0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(testing::make_store({"a", "b"}, {TokenKind::Word, TokenKind::Word}, v),
                  ConfigError);
}

TEST_CASE("equal similarities are ordered by token") {
  Eigen::MatrixXf v(4, 2);
  v << 1, 0, 2, 0, 3, 0, 0, 1;
  const auto store = testing::make_store({"q", "zeta", "alpha", "beta"},
                                         std::vector<TokenKind>(4, TokenKind::Word), v);
  CHECK(tokens_of(nearest(store, "q", 3)) == std::vector<std::string>{"alpha", "zeta", "beta"});
}

TEST_CASE("analogy recovers a planted parallelogram") {
  Eigen::MatrixXf v(6, 3);
  v << 1, 0, 0,   // king
      1, 1, 0,    // queen
      0, 0, 1,    // man
      0, 1, 1,    // woman
      1, 0.1f, 0, // prince
      0.2f, 0.2f, 0.2f;
  const auto store = testing::make_store({"king", "queen", "man", "woman", "prince", "thing"},
                                         std::vector<TokenKind>(6, TokenKind::Word), v);
  const std::vector<std::string> pos = {"king", "woman"};
  const std::vector<std::string> neg = {"man"};
  const auto r = analogy(store, pos, neg, 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0].token == "queen");
  CHECK(r[0].similarity == doctest::Approx(1.0));
  const std::vector<std::string> bad = {"nobody"};
  CHECK_THROWS_AS(analogy(store, bad, neg, 1), NotFoundError);
}

TEST_CASE("nearest agrees with an exhaustive scan") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> size(2, 400);
  std::uniform_int_distribution<int> dim(1, 6), kpick(0, 30), kindpick(1, 15);
  for (int trial = 0; trial < 150; ++trial) {
    const auto store = testing::random_store(rng, size(rng), dim(rng));
    const int bits = kindpick(rng);
    std::vector<TokenKind> kinds;
    for (int b = 0; b < 4; ++b) {
      if (bits & (1 << b)) kinds.push_back(static_cast<TokenKind>(b));
    }
    KindSet filter;
    switch (kinds.size()) {
      case 1: filter = {kinds[0]}; break;
      case 2: filter = {kinds[0], kinds[1]}; break;
      case 3: filter = {kinds[0], kinds[1], kinds[2]}; break;
      default: filter = KindSet::all(); break;
    }
    std::uniform_int_distribution<std::size_t> q(0, store.size() - 1);
    for (int rep = 0; rep < 4; ++rep) {
      const auto index = q(rng);
      const auto k = static_cast<std::size_t>(kpick(rng));
      for (int threads : {1, 3}) {
        const auto got = nearest(store, store.token(index), k, filter, threads);
        const auto want = testing::oracle::knn(store, index, k, filter);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
          REQUIRE(got[i].token == want[i].token);
          REQUIRE(got[i].similarity == want[i].similarity);
        }
      }
    }
  }
}

TEST_CASE("embeddings round-trip through text and sidecar") {
  const auto store = triangle();
  const auto dir = testing::scratch_dir("embed_roundtrip");
  save_embeddings(store, dir / "vec");
  const auto back = load_embeddings(dir / "vec");
  REQUIRE(back.size() == store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    CHECK(back.token(i) == store.token(i));
    CHECK(back.kind(i) == store.kind(i));
    CHECK(back.vectors().row(static_cast<Eigen::Index>(i)) ==
          store.vectors().row(static_cast<Eigen::Index>(i)));
  }
  std::filesystem::remove(dir / "vec.json");
  const auto bare = load_embeddings(dir / "vec");
  CHECK(bare.kind(1) == TokenKind::Word);
  CHECK_THROWS_AS(load_embeddings(dir / "absent"), IoError);
}

TEST_CASE("training on a synthetic corpus") {
  const auto corpus = testing::planted_corpus(3000, 5);
  EmbeddingConfig cfg;
  cfg.dimension = 16;
  cfg.min_count = 5;
  cfg.epochs = 2;
  cfg.seed = 3;
  const auto store = train_embeddings(corpus.sentences, cfg);
  CHECK(store.dimension() == 16);
  for (std::size_t i = 1; i < store.size(); ++i) {
    const bool ordered = store.frequency(i - 1) > store.frequency(i) ||
                         (store.frequency(i - 1) == store.frequency(i) &&
                          store.token(i - 1) < store.token(i));
    REQUIRE(ordered);
    REQUIRE(store.frequency(i) >= cfg.min_count);
  }
  CHECK(store.kind(*store.index_of("emoA")) == TokenKind::Emote);
  CHECK(store.vectors().allFinite());

  const auto again = train_embeddings(corpus.sentences, cfg);
  CHECK(again.vectors() == store.vectors());

  cfg.seed = 4;
  CHECK(train_embeddings(corpus.sentences, cfg).vectors() != store.vectors());

  cfg.workers = 4;
  const auto parallel = train_embeddings(corpus.sentences, cfg);
  CHECK(parallel.vectors().allFinite());
  CHECK(parallel.size() == store.size());

  cfg.min_count = 1'000'000;
  CHECK_THROWS_AS(train_embeddings(corpus.sentences, cfg), TrainingError);
}
