#include "emotesent/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "emotesent/error.hpp"
#include "emotesent/parallel.hpp"
#include "io_util.hpp"

namespace emotesent {

using detail::format_double;

// ---------------------------------------------------------------------------
// Token statistics

TokenTypeStats token_type_stats(std::span<const TokenSequence> corpus) {
  StringMap<TokenKind> first_kind;
  TokenTypeStats stats;
  for (const auto& seq : corpus) {
    for (const auto& t : seq) {
      const auto [it, fresh] = first_kind.try_emplace(t.text, t.kind);
      auto& k = stats.kinds[static_cast<std::size_t>(it->second)];
      ++k.occurrences;
      if (fresh) ++k.unique;
    }
  }
  for (const auto& k : stats.kinds) {
    stats.unique_total += k.unique;
    stats.occurrence_total += k.occurrences;
  }
  for (auto& k : stats.kinds) {
    if (stats.unique_total > 0) {
      k.unique_fraction = static_cast<double>(k.unique) / static_cast<double>(stats.unique_total);
      k.occurrence_fraction =
          static_cast<double>(k.occurrences) / static_cast<double>(stats.occurrence_total);
    }
  }
  return stats;
}

std::string TokenTypeStats::to_csv() const {
  std::ostringstream out;
  out << "kind,unique,unique_fraction,occurrences,occurrence_fraction\n";
  for (std::size_t i = 0; i < kNumTokenKinds; ++i) {
    const auto& k = kinds[i];
    out << to_string(static_cast<TokenKind>(i)) << ',' << k.unique << ','
        << format_double(k.unique_fraction) << ',' << k.occurrences << ','
        << format_double(k.occurrence_fraction) << '\n';
  }
  return out.str();
}

std::map<TokenKind, std::vector<std::pair<std::string, std::uint64_t>>> rank_frequency(
    std::span<const TokenSequence> corpus) {
  StringMap<std::pair<TokenKind, std::uint64_t>> counts;
  for (const auto& seq : corpus) {
    for (const auto& t : seq) ++counts.try_emplace(t.text, t.kind, 0).first->second.second;
  }
  std::map<TokenKind, std::vector<std::pair<std::string, std::uint64_t>>> out;
  for (const auto& [token, info] : counts) out[info.first].emplace_back(token, info.second);
  for (auto& [_, list] : out) {
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zipf fit

RankFrequencyFit zipf_fit(std::span<const double> frequencies, std::size_t first_rank,
                          std::size_t last_rank) {
  first_rank = std::max<std::size_t>(first_rank, 1);
  last_rank = std::min(last_rank, frequencies.size());
  if (last_rank < first_rank || last_rank - first_rank + 1 < 10) {
    throw FitError("Zipf fit needs at least 10 ranks in range");
  }
  RankFrequencyFit fit;
  fit.first_rank = first_rank;
  fit.last_rank = last_rank;
  const auto window = frequencies.subspan(first_rank - 1, last_rank - first_rank + 1);
  for (const double f : window) {
    if (!(f > 0.0) || !std::isfinite(f)) throw FitError("frequencies must be positive and finite");
  }
  if (std::all_of(window.begin(), window.end(), [&](double f) { return f == window.front(); })) {
    fit.degenerate = true;
    fit.intercept = std::log(window.front());
    return fit;
  }
  const auto n = static_cast<Eigen::Index>(window.size());
  Eigen::ArrayXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = std::log(static_cast<double>(first_rank + static_cast<std::size_t>(i)));
    y[i] = std::log(window[static_cast<std::size_t>(i)]);
  }
  const Eigen::ArrayXd dx = x - x.mean();
  const Eigen::ArrayXd dy = y - y.mean();
  const double sxx = (dx * dx).sum();
  const double sxy = (dx * dy).sum();
  const double syy = (dy * dy).sum();
  const double slope = sxy / sxx;
  fit.exponent = -slope;
  fit.intercept = y.mean() - slope * x.mean();
  fit.r_squared = sxy * sxy / (sxx * syy);
  return fit;
}

// ---------------------------------------------------------------------------
// Embedding-space analyses

std::vector<std::size_t> top_tokens_per_kind(const EmbeddingStore& store, std::size_t per_kind) {
  std::array<std::vector<std::size_t>, kNumTokenKinds> by_kind;
  for (std::size_t i = 0; i < store.size(); ++i) {
    by_kind[static_cast<std::size_t>(store.kind(i))].push_back(i);
  }
  std::vector<std::size_t> out;
  for (auto& list : by_kind) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      if (store.frequency(a) != store.frequency(b)) return store.frequency(a) > store.frequency(b);
      return store.token(a) < store.token(b);
    });
    const auto take = std::min(per_kind, list.size());
    out.insert(out.end(), list.begin(), list.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

NeighborTypeDistribution neighbor_type_distribution(const EmbeddingStore& store,
                                                    std::span<const std::size_t> sample,
                                                    std::size_t k, int threads) {
  std::vector<Eigen::Vector4d> per_token(sample.size(), Eigen::Vector4d::Zero());
  std::vector<std::uint8_t> valid(sample.size(), 0);
  parallel_for(sample.size(), threads, [&](std::size_t s) {
    const auto neighbors = nearest(store, store.token(sample[s]), k, KindSet::all(), 1);
    if (neighbors.empty()) return;
    for (const auto& n : neighbors) per_token[s][static_cast<Eigen::Index>(n.kind)] += 1.0;
    per_token[s] /= static_cast<double>(neighbors.size());
    valid[s] = 1;
  });
  NeighborTypeDistribution dist;
  for (std::size_t s = 0; s < sample.size(); ++s) {
    if (!valid[s]) continue;
    const auto row = static_cast<std::size_t>(store.kind(sample[s]));
    dist.fractions.row(static_cast<Eigen::Index>(row)) += per_token[s].transpose();
    ++dist.sampled[row];
  }
  for (std::size_t r = 0; r < kNumTokenKinds; ++r) {
    if (dist.sampled[r] > 0) dist.fractions.row(static_cast<Eigen::Index>(r)) /= static_cast<double>(dist.sampled[r]);
  }
  return dist;
}

std::string NeighborTypeDistribution::to_csv() const {
  std::ostringstream out;
  out << "kind,sampled";
  for (std::size_t c = 0; c < kNumTokenKinds; ++c) out << ',' << to_string(static_cast<TokenKind>(c));
  out << '\n';
  for (std::size_t r = 0; r < kNumTokenKinds; ++r) {
    out << to_string(static_cast<TokenKind>(r)) << ',' << sampled[r];
    for (Eigen::Index c = 0; c < 4; ++c) out << ',' << format_double(fractions(static_cast<Eigen::Index>(r), c));
    out << '\n';
  }
  return out.str();
}

SentimentLabel valence_class(double valence) {
  if (valence < -1.0 / 3.0) return SentimentLabel::Negative;
  if (valence > 1.0 / 3.0) return SentimentLabel::Positive;
  return SentimentLabel::Neutral;
}

std::uint64_t SentimentHistogram::total() const {
  std::uint64_t t = 0;
  for (const auto& c : counts) t = std::accumulate(c.begin(), c.end(), t);
  return t;
}

std::string SentimentHistogram::to_csv() const {
  std::ostringstream out;
  out << "bin_low,bin_high,negative,neutral,positive\n";
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = -1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(bins);
    const double hi = -1.0 + 2.0 * static_cast<double>(b + 1) / static_cast<double>(bins);
    out << format_double(lo) << ',' << format_double(hi);
    for (const auto& c : counts) out << ',' << c[b];
    out << '\n';
  }
  return out.str();
}

SentimentHistogram sentiment_neighborhood_histogram(const EmbeddingStore& store,
                                                    const SentimentLexicon& valences,
                                                    std::size_t bins, std::size_t neighbors,
                                                    int threads) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  std::vector<std::size_t> sources;
  std::vector<double> source_valence;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (const auto v = valences.valence(store.token(i))) {
      sources.push_back(i);
      source_valence.push_back(*v);
    }
  }
  std::vector<std::vector<std::uint32_t>> hits(sources.size());
  parallel_for(sources.size(), threads, [&](std::size_t s) {
    for (const auto& n : nearest(store, store.token(sources[s]), neighbors, KindSet::all(), 1)) {
      const auto v = valences.valence(n.token);
      if (!v) continue;
      const auto bin = static_cast<std::size_t>(std::floor((*v + 1.0) / 2.0 * static_cast<double>(bins)));
      hits[s].push_back(static_cast<std::uint32_t>(std::min(bin, bins - 1)));
    }
  });
  SentimentHistogram h;
  h.bins = bins;
  for (auto& c : h.counts) c.assign(bins, 0);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto cls = class_index(valence_class(source_valence[s]));
    ++h.sources[cls];
    for (const auto b : hits[s]) ++h.counts[cls][b];
  }
  return h;
}

SentimentLexicon as_lexicon(const PseudoDictionary& dict) {
  SentimentLexicon lex;
  for (const auto& [emote, entry] : dict) lex.insert(emote, entry.valence, LexiconSource::User);
  return lex;
}

// ---------------------------------------------------------------------------
// Feature rank histograms

namespace {

void summarize(RankHistogram& h, std::vector<std::size_t>& positions) {
  h.n = positions.size();
  if (positions.empty()) return;
  std::sort(positions.begin(), positions.end());
  h.mean = std::accumulate(positions.begin(), positions.end(), 0.0) / static_cast<double>(h.n);
  const auto mid = h.n / 2;
  h.median = h.n % 2 ? static_cast<double>(positions[mid])
                     : (static_cast<double>(positions[mid - 1]) + static_cast<double>(positions[mid])) / 2.0;
}

}  // namespace

FeatureRankHistograms top_feature_rank_histogram(const ImportanceReport& report, std::size_t top_n,
                                                 std::size_t bin_width) {
  if (report.groups.empty()) throw ConfigError("importance report carries no feature groups");
  if (top_n < 1 || bin_width < 1) throw ConfigError("top_n and bin_width must be positive");
  FeatureRankHistograms out;
  out.top_n = top_n;
  out.bin_width = bin_width;
  const auto nbins = (top_n + bin_width - 1) / bin_width;
  out.emote.counts.assign(nbins, 0);
  out.other.counts.assign(nbins, 0);
  std::vector<std::size_t> emote_pos, other_pos;
  for (const auto& head : report.heads) {
    const auto take = std::min(top_n, head.ranking.size());
    for (std::size_t p = 0; p < take; ++p) {
      const auto& group = report.groups.at(head.ranking[p]);
      const bool emote = group == to_string(FeatureKind::EmoteOnly) ||
                         group == to_string(FeatureKind::EmotePlus);
      (emote ? out.emote : out.other).counts[p / bin_width] += 1;
      (emote ? emote_pos : other_pos).push_back(p);
    }
  }
  summarize(out.emote, emote_pos);
  summarize(out.other, other_pos);
  return out;
}

std::string FeatureRankHistograms::to_csv() const {
  std::ostringstream out;
  out << "rank_low,rank_high,emote,other\n";
  for (std::size_t b = 0; b < emote.counts.size(); ++b) {
    out << b * bin_width << ',' << std::min(top_n, (b + 1) * bin_width) - 1 << ','
        << emote.counts[b] << ',' << other.counts[b] << '\n';
  }
  return out.str();
}

void export_vectors(const EmbeddingStore& store, std::span<const std::size_t> sample,
                    const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "token\tkind\tfrequency";
  for (int j = 0; j < store.dimension(); ++j) out << "\tv" << j + 1;
  out << '\n';
  char buf[32];
  for (const auto i : sample) {
    out << store.token(i) << '\t' << to_string(store.kind(i)) << '\t' << store.frequency(i);
    const auto row = store.vector(i);
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      const auto r = std::to_chars(buf, buf + sizeof buf, row[j]);
      out << '\t' << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace emotesent
