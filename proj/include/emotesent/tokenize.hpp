#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "emotesent/corpus.hpp"

namespace emotesent {

enum class TokenKind : std::uint8_t { Word = 0, Emote = 1, Emoji = 2, Emoticon = 3 };

inline constexpr std::size_t kNumTokenKinds = 4;

std::string_view to_string(TokenKind kind);
std::optional<TokenKind> parse_token_kind(std::string_view text);

struct Token {
  std::string text;
  TokenKind kind = TokenKind::Word;

  friend bool operator==(const Token&, const Token&) = default;
};

using TokenSequence = std::vector<Token>;

/// True when every code point is an emoji base or emoji modifier/joiner and
/// at least one base is present.
bool is_emoji_token(std::string_view token);

/// ASCII emoticons: eyes-nose-mouth (":)", ";-P", ">:(", "xD", ":'("),
/// reversed faces ("D:", "(:"), and a few fixed forms ("<3", "^_^", "T_T").
bool is_emoticon(std::string_view token);

/// Kind of a raw (un-normalized) token, priority Emote > Emoji > Emoticon > Word.
TokenKind classify_token(std::string_view token, const EmoteDictionary& emotes);

/// Whitespace split plus per-token kind classification. No normalization.
TokenSequence tokenize(std::string_view text, const EmoteDictionary& emotes);

enum class ProcessingLevel { P1 = 1, P2 = 2, P3 = 3 };
std::string_view to_string(ProcessingLevel level);
std::optional<ProcessingLevel> parse_processing_level(std::string_view text);

using StopWords = std::unordered_set<std::string>;
using LemmaTable = std::unordered_map<std::string, std::string>;

struct ProcessingConfig {
  ProcessingLevel level = ProcessingLevel::P1;
  StopWords stopwords;
  LemmaTable lemmas;
};

/// Word-token normalization: lowercase, drop Unicode punctuation and symbol
/// characters (general categories P* and S*), then squeeze runs of more than
/// three identical characters down to three. Invalid UTF-8 bytes are dropped.
std::string normalize_word(std::string_view word);

/// P1 normalizes Word tokens (dropping those that become empty) and passes
/// every other kind through untouched. P2 additionally drops Word tokens in
/// `stopwords`. P3 additionally replaces Word tokens found in `lemmas`.
TokenSequence process(std::span<const Token> tokens, ProcessingLevel level,
                      const StopWords& stopwords = {}, const LemmaTable& lemmas = {});
TokenSequence process(std::span<const Token> tokens, const ProcessingConfig& config);

/// Bundled English stop word list.
const StopWords& default_stopwords();

StopWords load_stopwords(const std::filesystem::path& path);
/// TSV `surface<TAB>lemma`.
LemmaTable load_lemmas(const std::filesystem::path& path);

/// Suffix-rule lemma fallback: maps w -> stem when w ends in "ing", "ed" or
/// "s" (tried in that order), the stem has at least three characters, and
/// the stem is itself in `vocabulary`.
LemmaTable suffix_lemmas(const std::unordered_set<std::string>& vocabulary);

/// Explicit entries win over suffix-rule entries.
LemmaTable merge_lemmas(const LemmaTable& explicit_table, const LemmaTable& fallback);

}  // namespace emotesent
