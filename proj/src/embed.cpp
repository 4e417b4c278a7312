#include "emotesent/embed.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emotesent/error.hpp"
#include "emotesent/parallel.hpp"
#include "emotesent/random.hpp"
#include "io_util.hpp"

namespace emotesent {

EmbeddingStore::EmbeddingStore(std::vector<std::string> tokens, std::vector<TokenKind> kinds,
                               std::vector<std::uint64_t> frequencies, Matrix vectors,
                               EmbeddingConfig config)
    : tokens_(std::move(tokens)),
      kinds_(std::move(kinds)),
      frequencies_(std::move(frequencies)),
      vectors_(std::move(vectors)),
      config_(config) {
  const auto n = tokens_.size();
  if (kinds_.size() != n || frequencies_.size() != n ||
      static_cast<std::size_t>(vectors_.rows()) != n) {
    throw ConfigError("embedding store: tokens, kinds, frequencies and vectors differ in length");
  }
  if (!vectors_.allFinite()) throw ConfigError("embedding store: non-finite vector component");
  norms_.resize(static_cast<Eigen::Index>(n));
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = vectors_.row(static_cast<Eigen::Index>(i));
    norms_[static_cast<Eigen::Index>(i)] = std::sqrt(ordered_dot(row, row));
    if (!index_.emplace(tokens_[i], i).second) {
      throw ConfigError("embedding store: duplicate token '" + tokens_[i] + "'");
    }
  }
}

std::optional<std::size_t> EmbeddingStore::index_of(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Vocabulary {
  std::vector<std::string> tokens;
  std::vector<TokenKind> kinds;
  std::vector<std::uint64_t> counts;
  StringMap<std::uint32_t> index;
};

Vocabulary count_vocabulary(std::span<const TokenSequence> corpus, std::uint64_t min_count) {
  StringMap<std::pair<std::uint64_t, TokenKind>> seen;
  for (const auto& seq : corpus) {
    for (const auto& t : seq) {
      auto [it, fresh] = seen.try_emplace(t.text, 0, t.kind);
      ++it->second.first;
    }
  }
  std::vector<std::pair<std::string_view, std::pair<std::uint64_t, TokenKind>>> kept;
  for (const auto& [token, info] : seen) {
    if (info.first >= min_count) kept.emplace_back(token, info);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second.first != b.second.first ? a.second.first > b.second.first : a.first < b.first;
  });
  Vocabulary v;
  for (const auto& [token, info] : kept) {
    v.index.emplace(std::string(token), static_cast<std::uint32_t>(v.tokens.size()));
    v.tokens.emplace_back(token);
    v.kinds.push_back(info.second);
    v.counts.push_back(info.first);
  }
  return v;
}

// Plain float access for one worker, relaxed atomics for several.
template <bool Shared>
struct Cell {
  static float load(const float& x) {
    if constexpr (Shared) {
      return std::atomic_ref<float>(const_cast<float&>(x)).load(std::memory_order_relaxed);
    } else {
      return x;
    }
  }
  static void store(float& x, float v) {
    if constexpr (Shared) {
      std::atomic_ref<float>(x).store(v, std::memory_order_relaxed);
    } else {
      x = v;
    }
  }
};

class SgnsTrainer {
 public:
  SgnsTrainer(const Vocabulary& vocab, std::vector<std::vector<std::uint32_t>> sentences,
              const EmbeddingConfig& config)
      : vocab_(vocab), sentences_(std::move(sentences)), config_(config) {
    const auto n = static_cast<Eigen::Index>(vocab.tokens.size());
    const auto d = static_cast<Eigen::Index>(config.dimension);
    syn0_.resize(n, d);
    syn1_ = EmbeddingStore::Matrix::Zero(n, d);
    Rng init(derive_seed(config.seed, 0x696e6974ULL));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        syn0_(i, j) = static_cast<float>((init.uniform01() - 0.5) / static_cast<double>(d));
      }
    }
    for (const auto& s : sentences_) train_words_ += s.size();

    cumulative_.resize(vocab.counts.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab.counts.size(); ++i) {
      acc += std::pow(static_cast<double>(vocab.counts[i]), 0.75);
      cumulative_[i] = acc;
    }
    keep_.assign(vocab.counts.size(), 1.0);
    if (config.subsample > 0) {
      const double threshold = config.subsample * static_cast<double>(train_words_);
      for (std::size_t i = 0; i < keep_.size(); ++i) {
        const double f = static_cast<double>(vocab.counts[i]);
        keep_[i] = (std::sqrt(f / threshold) + 1.0) * threshold / f;
      }
    }
  }

  EmbeddingStore::Matrix run() {
    const int workers = std::max(1, config_.workers);
    total_ = static_cast<double>(config_.epochs) * static_cast<double>(train_words_) + 1.0;
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
      if (workers == 1) {
        train_range<false>(0, sentences_.size(), derive_seed(config_.seed, static_cast<std::uint64_t>(epoch)));
      } else {
        const std::size_t n = sentences_.size();
        const std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
        parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
          const std::size_t begin = std::min(n, w * chunk);
          const std::size_t end = std::min(n, begin + chunk);
          train_range<true>(begin, end,
                            derive_seed(config_.seed, static_cast<std::uint64_t>(epoch) * 1024 + w));
        });
      }
    }
    return std::move(syn0_);
  }

 private:
  std::uint32_t draw_negative(Rng& rng) const {
    const double r = rng.uniform01() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(
        it - cumulative_.begin(), static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
  }

  template <bool Shared>
  void train_range(std::size_t begin, std::size_t end, std::uint64_t seed) {
    using C = Cell<Shared>;
    Rng rng(seed);
    const auto d = static_cast<std::size_t>(config_.dimension);
    std::vector<float> grad(d);
    std::vector<std::uint32_t> kept;
    std::uint64_t local = 0;
    double lr = config_.initial_lr;
    const double floor_lr = config_.initial_lr * 1e-4;

    for (std::size_t s = begin; s < end; ++s) {
      kept.clear();
      for (const auto w : sentences_[s]) {
        if (keep_[w] >= 1.0 || rng.uniform01() < keep_[w]) kept.push_back(w);
      }
      local += sentences_[s].size();
      if (local >= 10000) {
        processed_.fetch_add(local, std::memory_order_relaxed);
        local = 0;
      }
      const double progress = static_cast<double>(processed_.load(std::memory_order_relaxed) + local) / total_;
      lr = std::max(floor_lr, config_.initial_lr * (1.0 - progress));

      const auto len = kept.size();
      for (std::size_t pos = 0; pos < len; ++pos) {
        const auto center = kept[pos];
        const auto reduce = static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(config_.window)));
        const auto span = static_cast<std::size_t>(config_.window) - reduce;
        const std::size_t lo = pos >= span ? pos - span : 0;
        const std::size_t hi = std::min(len - 1, pos + span);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          float* in = syn0_.row(kept[c]).data();
          std::fill(grad.begin(), grad.end(), 0.0f);
          for (int neg = 0; neg <= config_.negatives; ++neg) {
            std::uint32_t target = center;
            double label = 1.0;
            if (neg > 0) {
              target = draw_negative(rng);
              if (target == center) continue;
              label = 0.0;
            }
            float* out = syn1_.row(target).data();
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += static_cast<double>(C::load(in[j])) * C::load(out[j]);
            const double g = (label - 1.0 / (1.0 + std::exp(-dot))) * lr;
            for (std::size_t j = 0; j < d; ++j) {
              const float o = C::load(out[j]);
              grad[j] += static_cast<float>(g) * o;
              C::store(out[j], o + static_cast<float>(g) * C::load(in[j]));
            }
          }
          for (std::size_t j = 0; j < d; ++j) C::store(in[j], C::load(in[j]) + grad[j]);
        }
      }
    }
    processed_.fetch_add(local, std::memory_order_relaxed);
  }

  const Vocabulary& vocab_;
  std::vector<std::vector<std::uint32_t>> sentences_;
  EmbeddingConfig config_;
  EmbeddingStore::Matrix syn0_;
  EmbeddingStore::Matrix syn1_;
  std::vector<double> cumulative_;
  std::vector<double> keep_;
  std::uint64_t train_words_ = 0;
  double total_ = 1.0;
  std::atomic<std::uint64_t> processed_{0};
};

}  // namespace

EmbeddingStore train_embeddings(std::span<const TokenSequence> corpus,
                                const EmbeddingConfig& config) {
  if (config.dimension < 1 || config.window < 1 || config.negatives < 0 || config.epochs < 1 ||
      config.initial_lr <= 0 || config.subsample < 0 || config.workers < 1) {
    throw ConfigError("invalid embedding configuration");
  }
  Vocabulary vocab = count_vocabulary(corpus, std::max<std::uint64_t>(1, config.min_count));
  if (vocab.tokens.size() < 2) {
    throw TrainingError("fewer than two tokens reach min_count=" + std::to_string(config.min_count));
  }
  std::vector<std::vector<std::uint32_t>> sentences;
  sentences.reserve(corpus.size());
  for (const auto& seq : corpus) {
    std::vector<std::uint32_t> ids;
    for (const auto& t : seq) {
      const auto it = vocab.index.find(t.text);
      if (it != vocab.index.end()) ids.push_back(it->second);
    }
    if (ids.size() > 1) sentences.push_back(std::move(ids));
  }
  auto vectors = SgnsTrainer(vocab, std::move(sentences), config).run();
  return EmbeddingStore(std::move(vocab.tokens), std::move(vocab.kinds), std::move(vocab.counts),
                        std::move(vectors), config);
}

// ---------------------------------------------------------------------------
// Queries

namespace {

NeighborResult scan(const EmbeddingStore& store, const Eigen::VectorXd& query, double query_norm,
                    std::size_t k, KindSet filter, std::span<const std::size_t> exclude,
                    int threads) {
  const auto n = store.size();
  std::vector<std::uint8_t> skip(n, 0);
  for (const auto i : exclude) {
    if (i < n) skip[i] = 1;
  }
  constexpr double kSkipped = -std::numeric_limits<double>::infinity();
  std::vector<double> sims(n, kSkipped);
  const auto& m = store.vectors();
  const auto d = static_cast<Eigen::Index>(store.dimension());
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (skip[i] || !filter.contains(store.kind(i))) continue;
      const float* row = m.row(static_cast<Eigen::Index>(i)).data();
      double dot = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) dot += static_cast<double>(row[j]) * query[j];
      const double denom = store.norm(i) * query_norm;
      sims[i] = denom == 0.0 ? 0.0 : dot / denom;
    }
  });

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    if (sims[i] != kSkipped) candidates.push_back(i);
  }
  const auto better = [&](std::size_t a, std::size_t b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    return store.token(a) < store.token(b);
  };
  const auto take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), better);
  NeighborResult out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const auto i = candidates[r];
    out.push_back({i, store.token(i), sims[i], store.kind(i)});
  }
  return out;
}

std::size_t require(const EmbeddingStore& store, std::string_view token) {
  const auto idx = store.index_of(token);
  if (!idx) throw NotFoundError("token not in embedding store: " + std::string(token));
  return *idx;
}

}  // namespace

NeighborResult nearest(const EmbeddingStore& store, std::string_view query, std::size_t k,
                       KindSet filter, int threads) {
  const auto idx = require(store, query);
  const Eigen::VectorXd q = store.vector(idx).transpose().cast<double>();
  const std::size_t exclude[] = {idx};
  return scan(store, q, store.norm(idx), k, filter, exclude, threads);
}

NeighborResult nearest(const EmbeddingStore& store, const Eigen::VectorXd& query, std::size_t k,
                       KindSet filter, std::span<const std::size_t> exclude, int threads) {
  if (query.size() != store.dimension()) {
    throw ConfigError("query has dimension " + std::to_string(query.size()) + ", store has " +
                      std::to_string(store.dimension()));
  }
  return scan(store, query, std::sqrt(ordered_dot(query, query)), k, filter, exclude, threads);
}

NeighborResult analogy(const EmbeddingStore& store, std::span<const std::string> positive,
                       std::span<const std::string> negative, std::size_t k, KindSet filter,
                       int threads) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(store.dimension());
  std::vector<std::size_t> used;
  for (const auto& t : positive) {
    const auto i = require(store, t);
    q += store.vector(i).transpose().cast<double>();
    used.push_back(i);
  }
  for (const auto& t : negative) {
    const auto i = require(store, t);
    q -= store.vector(i).transpose().cast<double>();
    used.push_back(i);
  }
  return nearest(store, q, k, filter, used, threads);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& prefix, std::string_view ext) {
  auto p = prefix;
  p += ext;
  return p;
}

nlohmann::json config_to_json(const EmbeddingConfig& c) {
  return {{"dimension", c.dimension}, {"window", c.window},         {"min_count", c.min_count},
          {"negatives", c.negatives}, {"epochs", c.epochs},         {"initial_lr", c.initial_lr},
          {"subsample", c.subsample}, {"seed", c.seed},             {"workers", c.workers}};
}

EmbeddingConfig config_from_json(const nlohmann::json& j) {
  EmbeddingConfig c;
  c.dimension = j.value("dimension", c.dimension);
  c.window = j.value("window", c.window);
  c.min_count = j.value("min_count", c.min_count);
  c.negatives = j.value("negatives", c.negatives);
  c.epochs = j.value("epochs", c.epochs);
  c.initial_lr = j.value("initial_lr", c.initial_lr);
  c.subsample = j.value("subsample", c.subsample);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  return c;
}

}  // namespace

void save_embeddings(const EmbeddingStore& store, const std::filesystem::path& prefix) {
  {
    auto out = detail::open_output(with_suffix(prefix, ".txt"));
    out << store.size() << ' ' << store.dimension() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < store.size(); ++i) {
      out << store.token(i);
      const auto row = store.vector(i);
      for (Eigen::Index j = 0; j < row.size(); ++j) {
        const auto r = std::to_chars(buf, buf + sizeof buf, row[j]);
        out << ' ' << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf));
      }
      out << '\n';
    }
    if (!out) throw IoError("failed writing embeddings");
  }
  nlohmann::json kinds = nlohmann::json::array();
  nlohmann::json freqs = nlohmann::json::array();
  for (std::size_t i = 0; i < store.size(); ++i) {
    kinds.push_back(to_string(store.kind(i)));
    freqs.push_back(store.frequency(i));
  }
  auto out = detail::open_output(with_suffix(prefix, ".json"));
  out << nlohmann::json{{"format", "emotesent-embeddings"},
                        {"version", 1},
                        {"config", config_to_json(store.config())},
                        {"kinds", kinds},
                        {"frequencies", freqs}}
             .dump()
      << '\n';
}

EmbeddingStore load_embeddings(const std::filesystem::path& prefix) {
  auto in = detail::open_input(with_suffix(prefix, ".txt"));
  std::string line;
  if (!std::getline(in, line)) throw FormatError("embedding file is empty");
  std::size_t count = 0;
  int dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> count >> dim) || dim < 1) throw FormatError("bad embedding header: " + line);
  }
  std::vector<std::string> tokens;
  tokens.reserve(count);
  EmbeddingStore::Matrix vectors(static_cast<Eigen::Index>(count), dim);
  while (tokens.size() < count && std::getline(in, line)) {
    line = std::string(detail::strip_cr(line));
    if (line.empty()) continue;
    const auto row = static_cast<Eigen::Index>(tokens.size());
    const char* p = line.data();
    const char* end = line.data() + line.size();
    const char* space = std::find(p, end, ' ');
    tokens.emplace_back(p, space);
    p = space;
    for (int j = 0; j < dim; ++j) {
      while (p < end && *p == ' ') ++p;
      float v = 0;
      const auto r = std::from_chars(p, end, v);
      if (r.ec != std::errc()) {
        throw FormatError("bad vector component on embedding row " + std::to_string(row + 1));
      }
      vectors(row, j) = v;
      p = r.ptr;
    }
  }
  if (tokens.size() != count) throw FormatError("embedding file has fewer rows than its header");

  std::vector<TokenKind> kinds(count, TokenKind::Word);
  std::vector<std::uint64_t> freqs(count, 0);
  EmbeddingConfig config;
  const auto sidecar = with_suffix(prefix, ".json");
  if (std::filesystem::exists(sidecar)) {
    try {
      const auto doc = nlohmann::json::parse(detail::read_file(sidecar));
      config = config_from_json(doc.at("config"));
      const auto& k = doc.at("kinds");
      const auto& f = doc.at("frequencies");
      if (k.size() != count || f.size() != count) throw FormatError("sidecar length mismatch");
      for (std::size_t i = 0; i < count; ++i) {
        const auto kind = parse_token_kind(k[i].get<std::string>());
        if (!kind) throw FormatError("unknown token kind in sidecar");
        kinds[i] = *kind;
        freqs[i] = f[i].get<std::uint64_t>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed embedding sidecar: ") + e.what());
    }
  }
  config.dimension = dim;
  return EmbeddingStore(std::move(tokens), std::move(kinds), std::move(freqs), std::move(vectors),
                        config);
}

}  // namespace emotesent
