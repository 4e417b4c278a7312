#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace testing {

FeatureMatrix to_sparse(const Eigen::MatrixXd& dense) {
  return dense.sparseView(0.0, 0.0);
}

EmoteDictionary emote_dict(std::initializer_list<std::string> codes) {
  EmoteDictionary d;
  for (const auto& c : codes) d.add(c);
  return d;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("emotesent_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

EmbeddingStore make_store(const std::vector<std::string>& tokens,
                          const std::vector<TokenKind>& kinds, const Eigen::MatrixXf& vectors) {
  std::vector<std::uint64_t> freq(tokens.size(), 1);
  return EmbeddingStore(tokens, kinds, freq, EmbeddingStore::Matrix(vectors));
}

EmbeddingStore random_store(std::mt19937_64& rng, std::size_t n, int dim) {
  std::uniform_int_distribution<int> comp(-2, 2);
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<int> letter(0, 25);
  std::vector<std::string> tokens;
  std::vector<TokenKind> kinds;
  for (std::size_t i = 0; i < n; ++i) {
    std::string t;
    for (int c = 0; c < 4; ++c) t.push_back(static_cast<char>('a' + letter(rng)));
    tokens.push_back(t + std::to_string(i));
    kinds.push_back(static_cast<TokenKind>(kind(rng)));
  }
  std::shuffle(tokens.begin(), tokens.end(), rng);
  Eigen::MatrixXf v(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) v(i, j) = static_cast<float>(comp(rng));
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t r = 0; r < n / 10; ++r) v.row(static_cast<Eigen::Index>(pick(rng))) = v.row(static_cast<Eigen::Index>(pick(rng))).eval();
  return make_store(tokens, kinds, v);
}

namespace oracle {

Eigen::Vector3d nb_posterior(const Eigen::MatrixXd& docs, const std::vector<SentimentLabel>& labels,
                             const Eigen::VectorXd& x, double alpha) {
  const auto f = docs.cols();
  Eigen::Vector3d joint = Eigen::Vector3d::Zero();
  for (int c = 0; c < 3; ++c) {
    double n_c = 0.0;
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(f);
    for (Eigen::Index d = 0; d < docs.rows(); ++d) {
      if (static_cast<int>(class_index(labels[static_cast<std::size_t>(d)])) != c) continue;
      n_c += 1.0;
      counts += docs.row(d).transpose();
    }
    if (n_c == 0.0) continue;
    long double p = n_c / static_cast<double>(docs.rows());
    const double total = counts.sum() + alpha * static_cast<double>(f);
    for (Eigen::Index j = 0; j < f; ++j) {
      p *= std::pow(static_cast<long double>((counts[j] + alpha) / total), static_cast<long double>(x[j]));
    }
    joint[c] = static_cast<double>(p);
  }
  return joint / joint.sum();
}

namespace {

double cosine(const EmbeddingStore& store, std::size_t i, const Eigen::VectorXd& q, double qn) {
  double dot = 0.0, nn = 0.0;
  const auto row = store.vector(i);
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    dot += static_cast<double>(row[j]) * q[j];
    nn += static_cast<double>(row[j]) * static_cast<double>(row[j]);
  }
  const double denom = std::sqrt(nn) * qn;
  return denom == 0.0 ? 0.0 : dot / denom;
}

}  // namespace

NeighborResult knn(const EmbeddingStore& store, const Eigen::VectorXd& query, std::size_t k,
                   KindSet filter, const std::vector<std::size_t>& exclude) {
  double qq = 0.0;
  for (Eigen::Index j = 0; j < query.size(); ++j) qq += query[j] * query[j];
  const double qn = std::sqrt(qq);
  NeighborResult all;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (std::find(exclude.begin(), exclude.end(), i) != exclude.end()) continue;
    if (!filter.contains(store.kind(i))) continue;
    all.push_back({i, store.token(i), cosine(store, i, query, qn), store.kind(i)});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.token < b.token;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

NeighborResult knn(const EmbeddingStore& store, std::size_t query, std::size_t k, KindSet filter) {
  const Eigen::VectorXd q = store.vector(query).transpose().cast<double>();
  return knn(store, q, k, filter, {query});
}

std::optional<PseudoDictEntry> pseudodict_entry(const EmbeddingStore& store,
                                                const SentimentLexicon& lexicon,
                                                std::size_t index, std::size_t k,
                                                std::size_t cap) {
  const auto ranked = knn(store, index, cap);
  PseudoDictEntry e;
  e.emote = store.token(index);
  double sum = 0.0;
  for (const auto& n : ranked) {
    if (e.evidence.size() == k) break;
    if (n.kind == TokenKind::Emote || !lexicon.contains(n.token)) continue;
    const double v = *lexicon.valence(n.token);
    e.evidence.push_back({n.token, n.similarity, v});
    sum += v;
  }
  if (e.evidence.empty()) return std::nullopt;
  e.valence = sum / static_cast<double>(e.evidence.size());
  return e;
}

PseudoDictionary pseudodict(const EmbeddingStore& store, const SentimentLexicon& lexicon,
                            std::size_t k, std::size_t cap) {
  PseudoDictionary out;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (store.kind(i) != TokenKind::Emote) continue;
    if (auto e = pseudodict_entry(store, lexicon, i, k, cap)) out.emplace(e->emote, *e);
  }
  return out;
}

}  // namespace oracle

PlantedCorpus planted_corpus(std::size_t sentences, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> positive = {"good", "great", "nice"};
  const std::vector<std::string> negative = {"bad", "awful", "sad"};
  const std::vector<std::string> neutral_emotes = {"emoC", "emoD", "emoE", "emoF"};
  std::vector<std::string> filler;
  for (int i = 0; i < 300; ++i) filler.push_back("w" + std::to_string(i));

  PlantedCorpus out;
  out.lexicon.insert("good", 0.475, LexiconSource::Vader);
  out.lexicon.insert("great", 0.775, LexiconSource::Vader);
  out.lexicon.insert("nice", 0.45, LexiconSource::Vader);
  out.lexicon.insert("bad", -0.625, LexiconSource::Vader);
  out.lexicon.insert("awful", -0.5, LexiconSource::Vader);
  out.lexicon.insert("sad", -0.525, LexiconSource::Vader);
  for (int i = 0; i < 40; ++i) out.lexicon.insert(filler[static_cast<std::size_t>(i)], 0.0, LexiconSource::Vader);

  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick3(0, 2), pick_filler(0, filler.size() - 1),
      pick_emote(0, neutral_emotes.size() - 1), length(5, 9);
  for (std::size_t s = 0; s < sentences; ++s) {
    TokenSequence seq;
    const double r = u(rng);
    if (r < 0.30) {
      const bool pos = r < 0.15;
      const auto& words = pos ? positive : negative;
      for (int i = 0; i < 3; ++i) seq.push_back({words[pick3(rng)], TokenKind::Word});
      seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(pick3(rng)),
                 Token{pos ? "emoA" : "emoB", TokenKind::Emote});
    } else {
      const auto n = length(rng);
      for (std::size_t i = 0; i < n; ++i) seq.push_back({filler[pick_filler(rng)], TokenKind::Word});
      if (u(rng) < 0.3) seq.push_back({neutral_emotes[pick_emote(rng)], TokenKind::Emote});
    }
    out.sentences.push_back(std::move(seq));
  }
  return out;
}

EmoteSignalData emote_signal_data(std::size_t train, std::size_t test, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  struct Planted {
    std::string code;
    double valence;
  };
  const std::vector<Planted> planted = {
      {"PogUp", 0.8},     {"HypeYes", 0.6},  {"CatJam", 0.7},  {"Sadge", -0.8},
      {"NotLikeThis", -0.6}, {"BibleThump", -0.7}, {"Kappa", 0.05}, {"monkaHmm", -0.05},
      {"PepeLaugh", 0.0}};
  EmoteSignalData out;
  for (const auto& p : planted) {
    out.emotes.add(p.code);
    out.pseudodict.emplace(p.code, PseudoDictEntry{p.code, p.valence, {}});
  }
  std::vector<std::string> filler;
  for (int i = 0; i < 150; ++i) filler.push_back("word" + std::to_string(i));
  std::uniform_int_distribution<std::size_t> pick_filler(0, filler.size() - 1),
      pick_emote(0, planted.size() - 1), length(3, 7);

  auto label_of = [](double v) {
    return v > 0.3 ? SentimentLabel::Positive : v < -0.3 ? SentimentLabel::Negative
                                                          : SentimentLabel::Neutral;
  };
  auto sample = [&](bool with_emote) {
    const auto& e = planted[pick_emote(rng)];
    std::vector<std::string> words;
    const auto n = length(rng);
    for (std::size_t i = 0; i < n; ++i) words.push_back(filler[pick_filler(rng)]);
    if (with_emote) {
      std::uniform_int_distribution<std::size_t> at(0, words.size());
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at(rng)), e.code);
    }
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    return LabeledExample{text, label_of(e.valence)};
  };
  for (std::size_t i = 0; i < train; ++i) out.train.push_back(sample(true));
  for (std::size_t i = 0; i < test; ++i) out.test.push_back(sample(true));
  for (std::size_t i = 0; i < train; ++i) out.paraphrases.push_back(sample(false));
  return out;
}

Blobs separable_blobs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  const Eigen::Vector2d centers[3] = {{-5.0, -3.0}, {0.0, 5.0}, {5.0, -3.0}};
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(n), 2);
  Blobs b;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = i % 3;
    dense.row(static_cast<Eigen::Index>(i)) =
        (centers[c] + Eigen::Vector2d(jitter(rng), jitter(rng))).transpose();
    b.y.push_back(label_from_index(c));
  }
  b.x = to_sparse(dense);
  return b;
}

}  // namespace testing
