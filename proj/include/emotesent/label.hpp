#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace emotesent {

/// Ternary sentiment label. The underlying value is the integer code
/// (-1, 0, +1); class_index() gives the dense 0..2 position used by every
/// per-class array in the library.
enum class SentimentLabel : int { Negative = -1, Neutral = 0, Positive = 1 };

inline constexpr std::size_t kNumClasses = 3;

/// Fixed class order. Also the tie-break order for every argmax.
inline constexpr std::array<SentimentLabel, kNumClasses> kClassOrder = {
    SentimentLabel::Negative, SentimentLabel::Neutral, SentimentLabel::Positive};

constexpr int label_code(SentimentLabel label) { return static_cast<int>(label); }

constexpr std::size_t class_index(SentimentLabel label) {
  return static_cast<std::size_t>(static_cast<int>(label) + 1);
}

constexpr SentimentLabel label_from_index(std::size_t index) {
  return static_cast<SentimentLabel>(static_cast<int>(index) - 1);
}

std::string_view to_string(SentimentLabel label);

/// Accepts "positive"/"neutral"/"negative" in any case, and "1"/"0"/"-1".
std::optional<SentimentLabel> parse_label(std::string_view text);

/// First maximum in class order, so ties resolve Negative < Neutral < Positive.
template <class Scores>
SentimentLabel argmax_label(const Scores& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return label_from_index(best);
}

}  // namespace emotesent
