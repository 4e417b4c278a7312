#include "emotesent/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emotesent/error.hpp"
#include "emotesent/random.hpp"
#include "io_util.hpp"

namespace emotesent {

namespace {

void check_malformed_ratio(std::size_t skipped, std::size_t records, std::string_view what) {
  if (records > 0 && skipped * 2 > records) {
    throw FormatError(std::string(what) + ": " + std::to_string(skipped) + " of " +
                      std::to_string(records) + " records are malformed");
  }
}

std::optional<ChatMessage> parse_chat_record(std::string_view line) {
  const auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object()) return std::nullopt;
  const auto channel = doc.find("channel");
  const auto ts = doc.find("ts");
  const auto text = doc.find("text");
  if (channel == doc.end() || ts == doc.end() || text == doc.end()) return std::nullopt;
  if (!channel->is_string() || !text->is_string()) return std::nullopt;
  if (!ts->is_number_integer()) return std::nullopt;
  const auto stamp = ts->get<std::int64_t>();
  if (stamp < 0) return std::nullopt;
  auto body = text->get<std::string>();
  if (detail::trim(body).empty()) return std::nullopt;
  return ChatMessage{channel->get<std::string>(), stamp, std::move(body)};
}

}  // namespace

ChatLog parse_chat_log(std::istream& in) {
  ChatLog log;
  std::size_t records = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    ++records;
    if (auto msg = parse_chat_record(body)) {
      log.messages.push_back(std::move(*msg));
    } else {
      ++log.skipped;
    }
  }
  check_malformed_ratio(log.skipped, records, "chat log");
  return log;
}

ChatLog load_chat_log(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_chat_log(in);
}

LabeledDataset parse_labeled_dataset(std::istream& in) {
  LabeledDataset data;
  std::size_t records = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto row = detail::strip_cr(line);
    if (detail::trim(row).empty()) continue;
    ++records;
    const auto tab = row.rfind('\t');
    if (tab == std::string_view::npos) {
      ++data.skipped;
      continue;
    }
    const auto text = detail::trim(row.substr(0, tab));
    const auto label = parse_label(detail::trim(row.substr(tab + 1)));
    if (text.empty() || !label) {
      ++data.skipped;
      continue;
    }
    data.examples.push_back({std::string(text), *label});
  }
  check_malformed_ratio(data.skipped, records, "labeled dataset");
  return data;
}

LabeledDataset load_labeled_dataset(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_labeled_dataset(in);
}

void save_labeled_dataset(const std::filesystem::path& path,
                          std::span<const LabeledExample> examples) {
  auto out = detail::open_output(path);
  for (const auto& ex : examples) out << ex.text << '\t' << to_string(ex.label) << '\n';
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------

std::string_view to_string(LexiconSource source) {
  switch (source) {
    case LexiconSource::Vader: return "vader";
    case LexiconSource::Emoji: return "emoji";
    case LexiconSource::Emoticon: return "emoticon";
    case LexiconSource::User: return "user";
  }
  return "user";
}

std::optional<LexiconSource> parse_lexicon_source(std::string_view text) {
  for (auto s : {LexiconSource::Vader, LexiconSource::Emoji, LexiconSource::Emoticon,
                 LexiconSource::User}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

bool SentimentLexicon::insert(std::string token, double valence, LexiconSource source) {
  const LexiconEntry entry{std::clamp(valence, -1.0, 1.0), source};
  auto [it, inserted] = entries_.try_emplace(std::move(token), entry);
  if (!inserted) {
    it->second = entry;
    ++duplicates_;
  }
  return inserted;
}

void SentimentLexicon::merge(const SentimentLexicon& other) {
  for (const auto& [token, entry] : other.entries_) insert(token, entry.valence, entry.source);
  skipped_rows_ += other.skipped_rows_;
}

std::optional<double> SentimentLexicon::valence(std::string_view token) const {
  const auto it = entries_.find(token);
  if (it == entries_.end()) return std::nullopt;
  return it->second.valence;
}

namespace {

SentimentLexicon parse_vader_tsv(std::istream& in, const LexiconLoadOptions& options) {
  SentimentLexicon lexicon;
  std::size_t skipped = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto row = detail::strip_cr(line);
    if (detail::trim(row).empty()) continue;
    const auto tab = row.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      ++skipped;
      continue;
    }
    const auto rest = row.substr(tab + 1);
    const auto value = detail::parse_double(rest.substr(0, rest.find('\t')));
    if (!value || !std::isfinite(*value)) {
      ++skipped;
      continue;
    }
    lexicon.insert(std::string(row.substr(0, tab)), *value / options.scale, options.source);
  }
  lexicon.add_skipped(skipped);
  return lexicon;
}

SentimentLexicon parse_json_lexicon(std::istream& in, const LexiconLoadOptions& options) {
  const auto doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object()) throw FormatError("lexicon JSON must be an object of token -> valence");
  SentimentLexicon lexicon;
  std::size_t skipped = 0;
  for (const auto& [token, value] : doc.items()) {
    double raw = 0.0;
    auto source = options.source;
    if (value.is_number()) {
      raw = value.get<double>();
    } else if (value.is_object() && value.contains("valence") && value["valence"].is_number()) {
      raw = value["valence"].get<double>();
      if (value.contains("source") && value["source"].is_string()) {
        source = parse_lexicon_source(value["source"].get<std::string>()).value_or(source);
      }
    } else {
      ++skipped;
      continue;
    }
    if (!std::isfinite(raw)) {
      ++skipped;
      continue;
    }
    lexicon.insert(token, raw / options.scale, source);
  }
  lexicon.add_skipped(skipped);
  return lexicon;
}

}  // namespace

SentimentLexicon parse_lexicon(std::istream& in, const LexiconLoadOptions& options) {
  if (!(options.scale > 0.0) || !std::isfinite(options.scale)) {
    throw ConfigError("lexicon scale must be a positive number");
  }
  return options.format == LexiconFormat::Json ? parse_json_lexicon(in, options)
                                               : parse_vader_tsv(in, options);
}

SentimentLexicon load_lexicon(const std::filesystem::path& path,
                              const LexiconLoadOptions& options) {
  auto in = detail::open_input(path);
  return parse_lexicon(in, options);
}

void save_lexicon(const std::filesystem::path& path, const SentimentLexicon& lexicon,
                  LexiconFormat format, double scale) {
  auto out = detail::open_output(path);
  if (format == LexiconFormat::Json) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [token, entry] : lexicon) {
      doc[token] = {{"valence", entry.valence * scale}, {"source", to_string(entry.source)}};
    }
    out << doc.dump(1) << '\n';
  } else {
    for (const auto& [token, entry] : lexicon) {
      out << token << '\t' << detail::format_double(entry.valence * scale) << '\n';
    }
  }
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------

std::string_view to_string(EmoteSource source) {
  switch (source) {
    case EmoteSource::Twitch: return "twitch";
    case EmoteSource::Ffz: return "ffz";
    case EmoteSource::Bttv: return "bttv";
    case EmoteSource::User: return "user";
  }
  return "user";
}

std::optional<EmoteSource> parse_emote_source(std::string_view text) {
  for (auto s : {EmoteSource::Twitch, EmoteSource::Ffz, EmoteSource::Bttv, EmoteSource::User}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

bool EmoteDictionary::add(std::string code, EmoteOrigin origin) {
  return codes_.try_emplace(std::move(code), origin).second;
}

bool EmoteDictionary::contains(std::string_view code) const {
  return codes_.find(code) != codes_.end();
}

std::optional<EmoteOrigin> EmoteDictionary::origin(std::string_view code) const {
  const auto it = codes_.find(code);
  if (it == codes_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> EmoteDictionary::sorted_codes() const {
  std::vector<std::string> out;
  out.reserve(codes_.size());
  for (const auto& [code, origin] : codes_) out.push_back(code);
  std::sort(out.begin(), out.end());
  return out;
}

EmoteDictionary load_emote_dictionary(std::span<const EmoteFile> files) {
  EmoteDictionary dict;
  for (std::size_t i = 0; i < files.size(); ++i) {
    auto in = detail::open_input(files[i].path);
    std::string line;
    while (std::getline(in, line)) {
      const auto code = detail::trim(line);
      if (code.empty() || code.front() == '#') continue;
      dict.add(std::string(code), {files[i].source, i});
    }
  }
  if (dict.empty()) throw ConfigError("emote dictionary is empty");
  return dict;
}

EmoteDictionary load_emote_dictionary(std::span<const std::filesystem::path> paths) {
  std::vector<EmoteFile> files;
  files.reserve(paths.size());
  for (const auto& p : paths) files.push_back({p, EmoteSource::User});
  return load_emote_dictionary(files);
}

// ---------------------------------------------------------------------------

Split stratified_split(std::span<const LabeledExample> data, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw SplitError("train fraction must lie in (0, 1)");
  }
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) by_class[class_index(data[i].label)].push_back(i);

  std::size_t present = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (by_class[c].empty()) continue;
    ++present;
    if (by_class[c].size() < 2) {
      throw SplitError("class '" + std::string(to_string(label_from_index(c))) +
                       "' has fewer than 2 examples");
    }
  }
  if (present < 2) throw SplitError("stratified split needs at least two classes");

  const auto total_train = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(data.size()) + 1e-9));
  std::array<std::size_t, kNumClasses> quota{};
  std::array<double, kNumClasses> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double exact = spec.train_fraction * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  std::array<std::size_t, kNumClasses> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total_train && i < kNumClasses; ++i) {
    const auto c = order[i];
    if (!by_class[c].empty() && quota[c] < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (by_class[c].empty()) continue;
    quota[c] = std::clamp<std::size_t>(quota[c], 1, by_class[c].size() - 1);
  }

  Rng rng(derive_seed(spec.seed, 0x53504c4954ULL));
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& idx = by_class[c];
    rng.shuffle(idx.begin(), idx.end());
    train_idx.insert(train_idx.end(), idx.begin(),
                     idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]),
                    idx.end());
  }
  // Original order within each side keeps output stable and readable.
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  Split split;
  for (auto i : train_idx) split.train.push_back(data[i]);
  for (auto i : test_idx) split.test.push_back(data[i]);
  return split;
}

}  // namespace emotesent
