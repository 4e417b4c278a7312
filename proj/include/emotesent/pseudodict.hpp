#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "emotesent/corpus.hpp"
#include "emotesent/embed.hpp"

namespace emotesent {

struct PseudoDictConfig {
  std::size_t k = 5;  // sentiment-tagged neighbors averaged per emote
  std::size_t search_cap = 1000;  // deepest neighbor rank scanned
  bool similarity_weighted = false;  // weight evidence by max(similarity, 0)
  int threads = 0;
};

struct Evidence {
  std::string token;
  double similarity = 0.0;
  double valence = 0.0;
};

struct PseudoDictEntry {
  std::string emote;
  double valence = 0.0;
  std::vector<Evidence> evidence;  // nearest first, at most k
};

using PseudoDictionary = std::map<std::string, PseudoDictEntry, std::less<>>;

/// Sentiment for one store token: walk its neighbors in rank order up to
/// search_cap, keep Word/Emoji/Emoticon neighbors that carry a lexicon
/// valence (never emotes), stop at k and average. The token itself is never
/// its own evidence. Returns nullopt when no tagged neighbor is in reach.
std::optional<PseudoDictEntry> infer_valence(const EmbeddingStore& store,
                                             const SentimentLexicon& lexicon,
                                             std::string_view token,
                                             const PseudoDictConfig& config = {});

/// Entries for every Emote-kind token with at least one tagged neighbor.
/// Throws ConfigError on an empty lexicon or invalid k/search_cap.
PseudoDictionary build_pseudodict(const EmbeddingStore& store, const SentimentLexicon& lexicon,
                                  const PseudoDictConfig& config = {});

/// Same inference for the lexicon's own tokens present in the store
/// (leave-one-out: a token never contributes to its own estimate). Used to
/// score the method against the lexicon itself.
PseudoDictionary build_lexicon_pseudodict(const EmbeddingStore& store,
                                          const SentimentLexicon& lexicon,
                                          const PseudoDictConfig& config = {});

struct RmseReport {
  double rmse = 0.0;
  std::size_t overlap = 0;
};

/// RMSE over tokens present in both. Throws EvaluationError on empty overlap.
RmseReport evaluate_pseudodict(const PseudoDictionary& dict, const SentimentLexicon& reference);

/// `emote<TAB>valence<TAB>k_used`, emotes in sorted order.
void save_pseudodict_tsv(const PseudoDictionary& dict, const std::filesystem::path& path);
/// Evidence lists are not stored in TSV, so loaded entries have none.
PseudoDictionary load_pseudodict_tsv(const std::filesystem::path& path);

nlohmann::json pseudodict_to_json(const PseudoDictionary& dict);
void save_pseudodict_json(const PseudoDictionary& dict, const std::filesystem::path& path);

}  // namespace emotesent
