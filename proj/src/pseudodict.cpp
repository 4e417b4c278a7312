#include "emotesent/pseudodict.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emotesent/error.hpp"
#include "emotesent/parallel.hpp"
#include "io_util.hpp"

namespace emotesent {

namespace {

void check_config(const PseudoDictConfig& config, const SentimentLexicon& lexicon) {
  if (lexicon.empty()) throw ConfigError("sentiment lexicon is empty");
  if (config.k < 1 || config.search_cap < config.k) {
    throw ConfigError("pseudo-dictionary needs 1 <= k <= search_cap");
  }
}

std::optional<PseudoDictEntry> infer_at(const EmbeddingStore& store,
                                        const SentimentLexicon& lexicon, std::string_view token,
                                        const PseudoDictConfig& config, int threads) {
  const auto neighbors = nearest(store, token, config.search_cap, KindSet::all(), threads);
  PseudoDictEntry entry;
  entry.emote = std::string(token);
  for (const auto& n : neighbors) {
    if (n.kind == TokenKind::Emote) continue;
    const auto v = lexicon.valence(n.token);
    if (!v) continue;
    entry.evidence.push_back({n.token, n.similarity, *v});
    if (entry.evidence.size() == config.k) break;
  }
  if (entry.evidence.empty()) return std::nullopt;

  double sum = 0.0, weights = 0.0;
  if (config.similarity_weighted) {
    for (const auto& e : entry.evidence) {
      const double w = std::max(e.similarity, 0.0);
      sum += w * e.valence;
      weights += w;
    }
  }
  if (weights <= 0.0) {
    sum = 0.0;
    for (const auto& e : entry.evidence) sum += e.valence;
    weights = static_cast<double>(entry.evidence.size());
  }
  entry.valence = std::clamp(sum / weights, -1.0, 1.0);
  return entry;
}

PseudoDictionary build_over(const EmbeddingStore& store, const SentimentLexicon& lexicon,
                            const std::vector<std::size_t>& targets,
                            const PseudoDictConfig& config) {
  std::vector<std::optional<PseudoDictEntry>> results(targets.size());
  parallel_for(targets.size(), config.threads, [&](std::size_t i) {
    results[i] = infer_at(store, lexicon, store.token(targets[i]), config, 1);
  });
  PseudoDictionary dict;
  for (auto& r : results) {
    if (r) {
      auto key = r->emote;
      dict.emplace(std::move(key), std::move(*r));
    }
  }
  return dict;
}

}  // namespace

std::optional<PseudoDictEntry> infer_valence(const EmbeddingStore& store,
                                             const SentimentLexicon& lexicon,
                                             std::string_view token,
                                             const PseudoDictConfig& config) {
  check_config(config, lexicon);
  return infer_at(store, lexicon, token, config, config.threads);
}

PseudoDictionary build_pseudodict(const EmbeddingStore& store, const SentimentLexicon& lexicon,
                                  const PseudoDictConfig& config) {
  check_config(config, lexicon);
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (store.kind(i) == TokenKind::Emote) targets.push_back(i);
  }
  return build_over(store, lexicon, targets, config);
}

PseudoDictionary build_lexicon_pseudodict(const EmbeddingStore& store,
                                          const SentimentLexicon& lexicon,
                                          const PseudoDictConfig& config) {
  check_config(config, lexicon);
  std::vector<std::size_t> targets;
  for (const auto& [token, _] : lexicon) {
    if (const auto i = store.index_of(token)) targets.push_back(*i);
  }
  return build_over(store, lexicon, targets, config);
}

RmseReport evaluate_pseudodict(const PseudoDictionary& dict, const SentimentLexicon& reference) {
  RmseReport report;
  double sq = 0.0;
  for (const auto& [token, entry] : dict) {
    const auto ref = reference.valence(token);
    if (!ref) continue;
    sq += (entry.valence - *ref) * (entry.valence - *ref);
    ++report.overlap;
  }
  if (report.overlap == 0) throw EvaluationError("no overlap between pseudo-dictionary and reference");
  report.rmse = std::sqrt(sq / static_cast<double>(report.overlap));
  return report;
}

void save_pseudodict_tsv(const PseudoDictionary& dict, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& [emote, entry] : dict) {
    out << emote << '\t' << detail::format_double(entry.valence) << '\t' << entry.evidence.size()
        << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

PseudoDictionary load_pseudodict_tsv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  PseudoDictionary dict;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto row = detail::strip_cr(line);
    if (detail::trim(row).empty()) continue;
    const auto tab = row.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": expected emote<TAB>valence");
    }
    auto rest = row.substr(tab + 1);
    const auto tab2 = rest.find('\t');
    const auto v = detail::parse_double(rest.substr(0, tab2));
    if (!v || !std::isfinite(*v) || *v < -1.0 || *v > 1.0) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": bad valence");
    }
    PseudoDictEntry e;
    e.emote = std::string(row.substr(0, tab));
    e.valence = *v;
    dict.insert_or_assign(e.emote, std::move(e));
  }
  return dict;
}

nlohmann::json pseudodict_to_json(const PseudoDictionary& dict) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [emote, entry] : dict) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& e : entry.evidence) {
      evidence.push_back({{"token", e.token}, {"similarity", e.similarity}, {"valence", e.valence}});
    }
    entries.push_back({{"emote", emote}, {"valence", entry.valence}, {"evidence", evidence}});
  }
  return {{"format", "emotesent-pseudodict"}, {"version", 1}, {"entries", entries}};
}

void save_pseudodict_json(const PseudoDictionary& dict, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << pseudodict_to_json(dict).dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace emotesent
