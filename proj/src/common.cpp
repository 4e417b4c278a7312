#include <algorithm>
#include <atomic>
#include <cctype>
#include <string>
#include <thread>

#include "emotesent/label.hpp"
#include "emotesent/parallel.hpp"

namespace emotesent {

namespace {
std::atomic<int> g_default_threads{0};
}

void set_default_threads(int threads) { g_default_threads.store(std::max(0, threads)); }

int default_threads() {
  const int configured = g_default_threads.load();
  if (configured > 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

int resolve_threads(int requested) { return requested > 0 ? requested : default_threads(); }

std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
    case SentimentLabel::Positive: return "positive";
  }
  return "neutral";
}

std::optional<SentimentLabel> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "positive" || lower == "1" || lower == "+1") return SentimentLabel::Positive;
  if (lower == "neutral" || lower == "0") return SentimentLabel::Neutral;
  if (lower == "negative" || lower == "-1") return SentimentLabel::Negative;
  return std::nullopt;
}

}  // namespace emotesent
