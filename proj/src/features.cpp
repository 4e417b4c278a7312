#include "emotesent/features.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "emotesent/error.hpp"
#include "emotesent/manifest.hpp"

namespace emotesent {

namespace {

constexpr char kSeparator = '\x1f';

std::string bigram_key(std::string_view a, std::string_view b) {
  std::string key;
  key.reserve(a.size() + b.size() + 1);
  key.append(a);
  key.push_back(kSeparator);
  key.append(b);
  return key;
}

std::string key_of(const Ngram& ngram) {
  return ngram.tokens.size() == 1 ? ngram.tokens[0] : bigram_key(ngram.tokens[0], ngram.tokens[1]);
}

FeatureKind unigram_kind(const Token& t) {
  return t.kind == TokenKind::Emote ? FeatureKind::EmoteOnly : FeatureKind::Other;
}

FeatureKind bigram_kind(const Token& a, const Token& b) {
  return (a.kind == TokenKind::Emote || b.kind == TokenKind::Emote) ? FeatureKind::EmotePlus
                                                                     : FeatureKind::Other;
}

// Calls fn(key, kind) for each n-gram of a message in occurrence order.
template <class Fn>
void for_each_ngram(std::span<const Token> tokens, NgramOrder order, Fn&& fn) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    fn(std::string_view(tokens[i].text), unigram_kind(tokens[i]), i, false);
    if (order == NgramOrder::UnigramBigram && i + 1 < tokens.size()) {
      fn(std::string_view(bigram_key(tokens[i].text, tokens[i + 1].text)),
         bigram_kind(tokens[i], tokens[i + 1]), i, true);
    }
  }
}

}  // namespace

std::optional<NgramOrder> parse_ngram_order(std::string_view text) {
  if (text == "1" || text == "unigram") return NgramOrder::Unigram;
  if (text == "2" || text == "bigram" || text == "unigram+bigram") return NgramOrder::UnigramBigram;
  return std::nullopt;
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::EmoteOnly: return "emote_only";
    case FeatureKind::EmotePlus: return "emote_plus";
    case FeatureKind::Other: return "other";
  }
  return "other";
}

std::optional<FeatureKind> parse_feature_kind(std::string_view text) {
  for (auto k : {FeatureKind::EmoteOnly, FeatureKind::EmotePlus, FeatureKind::Other}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

NgramVocab::NgramVocab(NgramOrder order, std::size_t min_count, std::vector<Ngram> ngrams)
    : order_(order), min_count_(min_count), ngrams_(std::move(ngrams)) {
  index_.reserve(ngrams_.size());
  for (std::size_t i = 0; i < ngrams_.size(); ++i) {
    const auto& g = ngrams_[i];
    if (g.tokens.empty() || g.tokens.size() > 2) throw FormatError("n-gram must have 1 or 2 tokens");
    if (!index_.emplace(key_of(g), i).second) throw FormatError("duplicate n-gram in vocabulary");
  }
}

std::optional<std::size_t> NgramVocab::index_of(std::string_view unigram) const {
  const auto it = index_.find(std::string(unigram));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> NgramVocab::index_of(std::string_view first,
                                                std::string_view second) const {
  const auto it = index_.find(bigram_key(first, second));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string NgramVocab::label(std::size_t index) const {
  const auto& g = ngram(index);
  return g.tokens.size() == 1 ? g.tokens[0] : g.tokens[0] + " " + g.tokens[1];
}

nlohmann::json NgramVocab::to_json() const {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& g : ngrams_) {
    features.push_back({{"ngram", g.tokens}, {"kind", to_string(g.kind)}});
  }
  return {{"format", "emotesent-vocab"},
          {"version", 1},
          {"order", static_cast<int>(order_)},
          {"min_count", min_count_},
          {"features", std::move(features)}};
}

NgramVocab NgramVocab::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "emotesent-vocab" || doc.at("version") != 1) {
      throw FormatError("unsupported vocabulary format/version");
    }
    const auto order = doc.at("order").get<int>() == 2 ? NgramOrder::UnigramBigram
                                                        : NgramOrder::Unigram;
    std::vector<Ngram> ngrams;
    for (const auto& f : doc.at("features")) {
      const auto kind = parse_feature_kind(f.at("kind").get<std::string>());
      if (!kind) throw FormatError("unknown feature kind in vocabulary");
      ngrams.push_back({f.at("ngram").get<std::vector<std::string>>(), *kind});
    }
    return NgramVocab(order, doc.at("min_count").get<std::size_t>(), std::move(ngrams));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed vocabulary JSON: ") + e.what());
  }
}

std::string NgramVocab::hash() const { return sha256_hex(to_json().dump()); }

NgramVocab build_vocab(std::span<const TokenSequence> corpus, NgramOrder order,
                       std::size_t min_count) {
  if (corpus.empty()) throw ConfigError("cannot build a vocabulary from an empty corpus");
  min_count = std::max<std::size_t>(min_count, 1);

  struct Seen {
    std::size_t first = 0;
    std::size_t count = 0;
  };
  std::unordered_map<std::string, Seen> seen;
  std::vector<Ngram> first_order;
  for (const auto& message : corpus) {
    for_each_ngram(message, order, [&](std::string_view key, FeatureKind kind, std::size_t i,
                                       bool bigram) {
      auto [it, inserted] = seen.try_emplace(std::string(key), Seen{first_order.size(), 0});
      ++it->second.count;
      if (inserted) {
        Ngram g;
        g.kind = kind;
        g.tokens.push_back(message[i].text);
        if (bigram) g.tokens.push_back(message[i + 1].text);
        first_order.push_back(std::move(g));
      }
    });
  }

  std::vector<Ngram> kept;
  for (auto& g : first_order) {
    if (seen.at(key_of(g)).count >= min_count) kept.push_back(std::move(g));
  }
  if (kept.empty()) {
    throw ConfigError("no n-gram occurs at least " + std::to_string(min_count) + " times");
  }
  return NgramVocab(order, min_count, std::move(kept));
}

FeatureVector vectorize(std::span<const Token> tokens, const NgramVocab& vocab,
                        FeatureWeighting weighting) {
  std::map<std::size_t, double> counts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (auto idx = vocab.index_of(tokens[i].text)) counts[*idx] += 1.0;
    if (vocab.order() == NgramOrder::UnigramBigram && i + 1 < tokens.size()) {
      if (auto idx = vocab.index_of(tokens[i].text, tokens[i + 1].text)) counts[*idx] += 1.0;
    }
  }
  FeatureVector v(static_cast<Eigen::Index>(vocab.size()));
  v.reserve(static_cast<Eigen::Index>(counts.size()));
  for (const auto& [idx, count] : counts) {
    v.insertBack(static_cast<Eigen::Index>(idx)) =
        weighting == FeatureWeighting::Binary ? 1.0 : count;
  }
  return v;
}

FeatureMatrix stack_rows(std::span<const FeatureVector> rows, Eigen::Index cols) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (FeatureVector::InnerIterator it(rows[r]); it; ++it) {
      if (it.index() >= cols) throw ConfigError("feature index exceeds matrix width");
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(it.index()), it.value());
    }
  }
  FeatureMatrix m(static_cast<Eigen::Index>(rows.size()), cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

std::vector<std::string> feature_groups(const NgramVocab& vocab) {
  std::vector<std::string> groups;
  groups.reserve(vocab.size());
  for (const auto& g : vocab.ngrams()) groups.emplace_back(to_string(g.kind));
  return groups;
}

}  // namespace emotesent
