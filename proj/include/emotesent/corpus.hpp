#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emotesent/label.hpp"
#include "emotesent/string_map.hpp"

namespace emotesent {

struct ChatMessage {
  std::string channel_id;
  std::int64_t timestamp_ms = 0;
  std::string text;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct LabeledExample {
  std::string text;
  SentimentLabel label = SentimentLabel::Neutral;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

struct ChatLog {
  std::vector<ChatMessage> messages;
  std::size_t skipped = 0;
};

/// JSON-lines chat log, one {"channel","ts","text"} object per line. Blank
/// lines are ignored; malformed records are skipped and counted. Throws
/// IoError when unreadable and FormatError when more than half the
/// non-blank lines are malformed.
ChatLog load_chat_log(const std::filesystem::path& path);
ChatLog parse_chat_log(std::istream& in);

struct LabeledDataset {
  std::vector<LabeledExample> examples;
  std::size_t skipped = 0;
};

/// TSV `text<TAB>label`. The label is taken after the last tab so text may
/// itself contain tabs. Same skip/threshold contract as load_chat_log.
LabeledDataset load_labeled_dataset(const std::filesystem::path& path);
LabeledDataset parse_labeled_dataset(std::istream& in);
void save_labeled_dataset(const std::filesystem::path& path,
                          std::span<const LabeledExample> examples);

// ---------------------------------------------------------------------------
// Sentiment lexicon

enum class LexiconSource { Vader, Emoji, Emoticon, User };
std::string_view to_string(LexiconSource source);
std::optional<LexiconSource> parse_lexicon_source(std::string_view text);

enum class LexiconFormat { VaderTsv, Json };

struct LexiconEntry {
  double valence = 0.0;
  LexiconSource source = LexiconSource::User;
};

/// Token -> valence in [-1, 1]. Keys are exact strings: emoticons and emotes
/// are case-sensitive so nothing is lowercased here.
class SentimentLexicon {
 public:
  using Map = std::map<std::string, LexiconEntry, std::less<>>;

  /// Inserts an already-scaled valence, clamped to [-1, 1]. Returns false
  /// (and bumps duplicates()) when the token was present; last write wins.
  bool insert(std::string token, double valence, LexiconSource source);

  /// Adds every entry of `other`, later entries winning.
  void merge(const SentimentLexicon& other);

  std::optional<double> valence(std::string_view token) const;
  bool contains(std::string_view token) const { return entries_.find(token) != entries_.end(); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Map& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::size_t duplicates() const { return duplicates_; }
  std::size_t skipped_rows() const { return skipped_rows_; }
  void add_skipped(std::size_t n) { skipped_rows_ += n; }

 private:
  Map entries_;
  std::size_t duplicates_ = 0;
  std::size_t skipped_rows_ = 0;
};

struct LexiconLoadOptions {
  LexiconFormat format = LexiconFormat::VaderTsv;
  /// Native valence magnitude; values are divided by it and clamped.
  /// VADER ratings live in [-4, 4].
  double scale = 4.0;
  LexiconSource source = LexiconSource::Vader;
};

/// VADER TSV rows are `token<TAB>valence[<TAB>extra...]`; non-numeric or
/// non-finite valences are skipped and counted. JSON is an object mapping
/// token -> number, or token -> {"valence": number, "source": name}.
SentimentLexicon load_lexicon(const std::filesystem::path& path,
                              const LexiconLoadOptions& options = {});
SentimentLexicon parse_lexicon(std::istream& in, const LexiconLoadOptions& options = {});

/// Writes valences multiplied back by `scale` (shortest round-trip digits).
void save_lexicon(const std::filesystem::path& path, const SentimentLexicon& lexicon,
                  LexiconFormat format = LexiconFormat::VaderTsv, double scale = 4.0);

// ---------------------------------------------------------------------------
// Emote dictionary

enum class EmoteSource { Twitch, Ffz, Bttv, User };
std::string_view to_string(EmoteSource source);
std::optional<EmoteSource> parse_emote_source(std::string_view text);

struct EmoteOrigin {
  EmoteSource source = EmoteSource::User;
  std::size_t provider = 0;  // index of the file that first contributed the code
};

/// Case-sensitive set of emote codes deduplicated across providers.
class EmoteDictionary {
 public:
  /// Returns false if the code was already present (the first origin is kept).
  bool add(std::string code, EmoteOrigin origin = {});

  bool contains(std::string_view code) const;
  std::optional<EmoteOrigin> origin(std::string_view code) const;
  std::size_t size() const { return codes_.size(); }
  bool empty() const { return codes_.empty(); }

  /// Codes in lexicographic order.
  std::vector<std::string> sorted_codes() const;

 private:
  StringMap<EmoteOrigin> codes_;
};

struct EmoteFile {
  std::filesystem::path path;
  EmoteSource source = EmoteSource::User;
};

/// Union of one-code-per-line files (`#` starts a comment line). Throws
/// ConfigError when the union is empty.
EmoteDictionary load_emote_dictionary(std::span<const EmoteFile> files);
EmoteDictionary load_emote_dictionary(std::span<const std::filesystem::path> paths);

// ---------------------------------------------------------------------------
// Stratified split

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
};

/// Deterministic stratified split. The train total is floor(f * N); each
/// class first gets floor(f * n_c) and the leftover slots go to the classes
/// with the largest fractional remainders (class order breaks ties). Every
/// class keeps at least one example on each side. Throws SplitError when a
/// present class has fewer than two examples or fewer than two classes exist.
Split stratified_split(std::span<const LabeledExample> data, const SplitSpec& spec);

}  // namespace emotesent
