#include "emotesent/tokenize.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "emotesent/error.hpp"
#include "io_util.hpp"

namespace emotesent {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Word: return "word";
    case TokenKind::Emote: return "emote";
    case TokenKind::Emoji: return "emoji";
    case TokenKind::Emoticon: return "emoticon";
  }
  return "word";
}

std::optional<TokenKind> parse_token_kind(std::string_view text) {
  for (auto k : {TokenKind::Word, TokenKind::Emote, TokenKind::Emoji, TokenKind::Emoticon}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ProcessingLevel level) {
  switch (level) {
    case ProcessingLevel::P1: return "P1";
    case ProcessingLevel::P2: return "P2";
    case ProcessingLevel::P3: return "P3";
  }
  return "P1";
}

std::optional<ProcessingLevel> parse_processing_level(std::string_view text) {
  if (text == "P1" || text == "p1" || text == "1") return ProcessingLevel::P1;
  if (text == "P2" || text == "p2" || text == "2") return ProcessingLevel::P2;
  if (text == "P3" || text == "p3" || text == "3") return ProcessingLevel::P3;
  return std::nullopt;
}

namespace {

// Decodes UTF-8 into code points; ill-formed sequences come back as -1.
template <class Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* data = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(data, i, length, c);
    fn(c);
  }
}

void append_utf8(std::string& out, UChar32 c) {
  std::array<std::uint8_t, 4> buf{};
  std::int32_t n = 0;
  U8_APPEND_UNSAFE(buf.data(), n, c);
  out.append(reinterpret_cast<const char*>(buf.data()), static_cast<std::size_t>(n));
}

struct Range {
  UChar32 lo;
  UChar32 hi;
};

constexpr std::array kEmojiBases{
    Range{0x2300, 0x23FF},   Range{0x2600, 0x26FF},   Range{0x2700, 0x27BF},
    Range{0x2B00, 0x2BFF},   Range{0x3030, 0x3030},   Range{0x303D, 0x303D},
    Range{0x3297, 0x3297},   Range{0x3299, 0x3299},   Range{0x1F000, 0x1F0FF},
    Range{0x1F100, 0x1F2FF}, Range{0x1F300, 0x1FAFF},
};

constexpr std::array kEmojiModifiers{
    Range{0x200D, 0x200D},  // zero width joiner
    Range{0x20E3, 0x20E3},  // combining keycap
    Range{0xFE0E, 0xFE0F},  // variation selectors
    Range{0xE0020, 0xE007F},  // tag sequences
};

template <std::size_t N>
bool in_ranges(const std::array<Range, N>& ranges, UChar32 c) {
  return std::any_of(ranges.begin(), ranges.end(),
                     [c](const Range& r) { return c >= r.lo && c <= r.hi; });
}

constexpr std::string_view kFixedEmoticons[] = {
    "<3", "</3", "<33", "^_^", "^^", "^.^", "-_-", "-.-", "T_T", "T.T", ";_;",
    "o_O", "O_o", "o.O", "O.o", "o_o", "O_O", ">_<", ">.<", "x_x", "X_X", ":*",
};

bool is_eye(char c) { return c == ':' || c == ';' || c == '='; }
bool is_nose(char c) { return c == '-' || c == '\'' || c == 'o' || c == '^' || c == '*'; }

bool is_mouth(char c) {
  constexpr std::string_view mouths = ")(][DPpOo/\\|3*$@}{<>cCSs";
  return mouths.find(c) != std::string_view::npos;
}

bool all_same(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [&](char c) { return c == s.front(); });
}

// [>}]? eye nose? mouth+   (mouth repeated with one character)
bool match_forward(std::string_view t) {
  if (!t.empty() && (t.front() == '>' || t.front() == '}')) {
    if (t.size() >= 3 && is_eye(t[1])) t.remove_prefix(1);
  }
  if (t.size() < 2) return false;
  const char eye = t.front();
  t.remove_prefix(1);
  if (is_eye(eye)) {
    if (t.size() >= 2 && is_nose(t.front()) && is_mouth(t[1])) t.remove_prefix(1);
    return all_same(t) && is_mouth(t.front());
  }
  // "xD", "XP", "8)": restricted mouths so ordinary words do not match.
  if (eye == 'x' || eye == 'X') {
    if (t.size() >= 2 && t.front() == '-') t.remove_prefix(1);
    return all_same(t) && (t.front() == 'D' || t.front() == 'P' || t.front() == ')' ||
                           t.front() == '(');
  }
  if (eye == '8') {
    if (t.size() >= 2 && t.front() == '-') t.remove_prefix(1);
    return all_same(t) && (t.front() == ')' || t.front() == '(' || t.front() == 'D');
  }
  return false;
}

// mouth+ nose? eye   ("D:", "):", "(;")
bool match_reversed(std::string_view t) {
  if (t.size() < 2 || !is_eye(t.back())) return false;
  t.remove_suffix(1);
  if (t.size() >= 2 && (t.back() == '-' || t.back() == '\'')) t.remove_suffix(1);
  if (!all_same(t)) return false;
  const char m = t.front();
  return m == '(' || m == ')' || m == '[' || m == ']' || m == 'D';
}

}  // namespace

bool is_emoji_token(std::string_view token) {
  if (token.empty()) return false;
  bool has_base = false;
  bool ok = true;
  for_each_code_point(token, [&](UChar32 c) {
    if (c >= 0 && in_ranges(kEmojiBases, c)) {
      has_base = true;
    } else if (c < 0 || !in_ranges(kEmojiModifiers, c)) {
      ok = false;
    }
  });
  return ok && has_base;
}

bool is_emoticon(std::string_view token) {
  if (token.size() < 2 || token.size() > 8) return false;
  if (std::find(std::begin(kFixedEmoticons), std::end(kFixedEmoticons), token) !=
      std::end(kFixedEmoticons)) {
    return true;
  }
  return match_forward(token) || match_reversed(token);
}

TokenKind classify_token(std::string_view token, const EmoteDictionary& emotes) {
  if (emotes.contains(token)) return TokenKind::Emote;
  if (is_emoji_token(token)) return TokenKind::Emoji;
  if (is_emoticon(token)) return TokenKind::Emoticon;
  return TokenKind::Word;
}

TokenSequence tokenize(std::string_view text, const EmoteDictionary& emotes) {
  constexpr std::string_view ws = " \t\n\r\f\v";
  TokenSequence tokens;
  std::size_t pos = 0;
  while (true) {
    const auto begin = text.find_first_not_of(ws, pos);
    if (begin == std::string_view::npos) break;
    auto end = text.find_first_of(ws, begin);
    if (end == std::string_view::npos) end = text.size();
    const auto piece = text.substr(begin, end - begin);
    tokens.push_back({std::string(piece), classify_token(piece, emotes)});
    pos = end;
  }
  return tokens;
}

std::string normalize_word(std::string_view word) {
  std::vector<UChar32> kept;
  kept.reserve(word.size());
  for_each_code_point(word, [&](UChar32 c) {
    if (c < 0) return;
    if ((U_GET_GC_MASK(c) & (U_GC_P_MASK | U_GC_S_MASK)) != 0) return;
    kept.push_back(u_tolower(c));
  });
  std::string out;
  out.reserve(word.size());
  std::size_t run = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    run = (i > 0 && kept[i] == kept[i - 1]) ? run + 1 : 1;
    if (run <= 3) append_utf8(out, kept[i]);
  }
  return out;
}

TokenSequence process(std::span<const Token> tokens, ProcessingLevel level,
                      const StopWords& stopwords, const LemmaTable& lemmas) {
  TokenSequence out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (token.kind != TokenKind::Word) {
      out.push_back(token);
      continue;
    }
    auto text = normalize_word(token.text);
    if (text.empty()) continue;
    if (level >= ProcessingLevel::P2 && stopwords.contains(text)) continue;
    if (level >= ProcessingLevel::P3) {
      if (const auto it = lemmas.find(text); it != lemmas.end()) text = it->second;
    }
    out.push_back({std::move(text), TokenKind::Word});
  }
  return out;
}

TokenSequence process(std::span<const Token> tokens, const ProcessingConfig& config) {
  return process(tokens, config.level, config.stopwords, config.lemmas);
}

const StopWords& default_stopwords() {
  static const StopWords words = [] {
    constexpr std::string_view raw[] = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
        "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
        "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
        "what", "which", "who", "whom", "this", "that", "these", "those", "am", "is", "are",
        "was", "were", "be", "been", "being", "have", "has", "had", "having", "do", "does",
        "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
        "while", "of", "at", "by", "for", "with", "about", "against", "between", "into",
        "through", "during", "before", "after", "above", "below", "to", "from", "up", "down",
        "in", "out", "on", "off", "over", "under", "again", "further", "then", "once", "here",
        "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
        "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so",
        "than", "too", "very", "can", "will", "just", "should", "now", "don't", "doesn't",
        "didn't", "isn't", "aren't", "wasn't", "weren't", "won't", "can't", "i'm", "you're",
        "it's", "that's", "there's", "i've", "you've", "i'll", "you'll", "i'd", "would",
        "could", "also", "let's", "shan't", "shouldn't", "hasn't", "haven't", "hadn't",
        "mustn't", "needn't", "wouldn't", "couldn't", "we're", "they're"};
    StopWords set;
    for (auto w : raw) set.insert(normalize_word(w));
    return set;
  }();
  return words;
}

StopWords load_stopwords(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  StopWords words;
  std::string line;
  while (std::getline(in, line)) {
    const auto w = detail::trim(line);
    if (w.empty() || w.front() == '#') continue;
    auto normalized = normalize_word(w);
    if (!normalized.empty()) words.insert(std::move(normalized));
  }
  return words;
}

LemmaTable load_lemmas(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  LemmaTable table;
  std::string line;
  while (std::getline(in, line)) {
    const auto row = detail::strip_cr(line);
    const auto tab = row.find('\t');
    if (tab == std::string_view::npos) continue;
    const auto surface = detail::trim(row.substr(0, tab));
    const auto lemma = detail::trim(row.substr(tab + 1));
    if (surface.empty() || lemma.empty()) continue;
    table[std::string(surface)] = std::string(lemma);
  }
  return table;
}

namespace {
std::size_t code_point_count(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}
}  // namespace

LemmaTable suffix_lemmas(const std::unordered_set<std::string>& vocabulary) {
  constexpr std::string_view suffixes[] = {"ing", "ed", "s"};
  LemmaTable table;
  for (const auto& word : vocabulary) {
    for (auto suffix : suffixes) {
      if (word.size() <= suffix.size() || !word.ends_with(suffix)) continue;
      const auto stem = std::string_view(word).substr(0, word.size() - suffix.size());
      if (code_point_count(stem) < 3) continue;
      if (vocabulary.contains(std::string(stem))) {
        table.emplace(word, std::string(stem));
        break;
      }
    }
  }
  return table;
}

LemmaTable merge_lemmas(const LemmaTable& explicit_table, const LemmaTable& fallback) {
  LemmaTable merged = fallback;
  for (const auto& [surface, lemma] : explicit_table) merged[surface] = lemma;
  return merged;
}

}  // namespace emotesent
