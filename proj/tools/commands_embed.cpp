// embed and pseudodict.

#include <fstream>
#include <iostream>
#include <memory>

#include <nlohmann/json.hpp>

#include "cli_support.hpp"
#include "emotesent/error.hpp"

namespace cli {

namespace {

void print_neighbors(const NeighborResult& result) {
  std::cout << "rank\ttoken\tkind\tsimilarity\n";
  for (std::size_t i = 0; i < result.size(); ++i) {
    std::cout << (i + 1) << '\t' << result[i].token << '\t' << to_string(result[i].kind) << '\t'
              << result[i].similarity << '\n';
  }
}

}  // namespace

void register_embed(CLI::App& app, Registry& registry) {
  auto* embed = app.add_subcommand("embed", "Train and query token embeddings");
  embed->require_subcommand(1, 1);

  struct Train {
    std::string corpus;
    std::vector<std::string> emotes;
    std::string level = "P1";
    EmbeddingConfig cfg;
    std::string out;
  };
  auto t = std::make_shared<Train>();
  auto* train_cmd = embed->add_subcommand("train", "Skip-gram with negative sampling over a chat corpus");
  train_cmd->add_option("--corpus", t->corpus, "Chat log (JSON lines) or one message per line")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--emotes", t->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--level", t->level, "Processing level applied before training")
      ->check(CLI::IsMember({"P1", "P2", "P3"}))
      ->capture_default_str();
  train_cmd->add_option("--dim", t->cfg.dimension, "Vector dimension")->capture_default_str();
  train_cmd->add_option("--window", t->cfg.window, "Context window")->capture_default_str();
  train_cmd->add_option("--min-count", t->cfg.min_count, "Minimum token count")->capture_default_str();
  train_cmd->add_option("--negatives", t->cfg.negatives, "Negative samples")->capture_default_str();
  train_cmd->add_option("--epochs", t->cfg.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--lr", t->cfg.initial_lr, "Initial learning rate")->capture_default_str();
  train_cmd->add_option("--subsample", t->cfg.subsample, "Frequent-token subsampling (0 = off)")
      ->capture_default_str();
  train_cmd->add_option("--workers", t->cfg.workers,
                        "Training threads; above 1 results are not bit-reproducible")
      ->capture_default_str();
  train_cmd->add_option("--out", t->out, "Output directory (vectors.txt, vectors.json)")->required();
  registry.add(train_cmd, [t, train_cmd, &registry] {
    const auto& g = registry.globals();
    const auto emotes = load_emotes(t->emotes);
    const auto level = level_from(t->level);
    const auto& stop = default_stopwords();
    std::vector<TokenSequence> sentences;
    for (const auto& m : load_messages(t->corpus)) {
      auto tokens = process(tokenize(m, emotes), level, stop);
      if (!tokens.empty()) sentences.push_back(std::move(tokens));
    }
    auto cfg = t->cfg;
    cfg.seed = g.seed;
    const auto store = train_embeddings(sentences, cfg);
    OutputDir out(t->out, train_cmd, g);
    out.input(t->corpus);
    out.inputs(t->emotes);
    save_embeddings(store, out.path() / "vectors");
    out.file("vectors.txt");
    out.file("vectors.json");
    out.finish();
    std::cout << "vocabulary\t" << store.size() << "\ndimension\t" << store.dimension() << '\n';
  });

  struct Nn {
    std::string vectors;
    std::string token;
    std::size_t k = 10;
    std::string kinds = "all";
  };
  auto n = std::make_shared<Nn>();
  auto* nn = embed->add_subcommand("nn", "Nearest neighbors of a token");
  nn->add_option("--vectors", n->vectors, "Vector prefix (without .txt)")->required();
  nn->add_option("token", n->token, "Query token")->required();
  nn->add_option("-k", n->k, "Neighbors")->capture_default_str();
  nn->add_option("--kinds", n->kinds, "Comma-separated kinds to keep (word,emote,emoji,emoticon)")
      ->capture_default_str();
  registry.add(nn, [n, &registry] {
    const auto store = load_embeddings(n->vectors);
    print_neighbors(nearest(store, n->token, n->k, kinds_from(n->kinds), registry.globals().threads));
  });

  struct Analogy {
    std::string vectors;
    std::string positive;
    std::string negative;
    std::size_t k = 10;
    std::string kinds = "all";
  };
  auto a = std::make_shared<Analogy>();
  auto* an = embed->add_subcommand("analogy", "Neighbors of sum(positive) - sum(negative)");
  an->add_option("--vectors", a->vectors, "Vector prefix (without .txt)")->required();
  an->add_option("--positive", a->positive, "Comma-separated tokens")->required();
  an->add_option("--negative", a->negative, "Comma-separated tokens");
  an->add_option("-k", a->k, "Neighbors")->capture_default_str();
  an->add_option("--kinds", a->kinds, "Comma-separated kinds to keep")->capture_default_str();
  registry.add(an, [a, &registry] {
    const auto store = load_embeddings(a->vectors);
    const auto pos = split_list(a->positive);
    const auto neg = split_list(a->negative);
    print_neighbors(analogy(store, pos, neg, a->k, kinds_from(a->kinds), registry.globals().threads));
  });
}

void register_pseudodict(CLI::App& app, Registry& registry) {
  auto* pd = app.add_subcommand("pseudodict", "Infer emote sentiment from embedding neighbors");
  pd->require_subcommand(1, 1);

  struct Build {
    std::string vectors;
    LexiconOptions lexicon;
    PseudoDictConfig cfg;
    bool lexicon_self = false;
    std::string out;
  };
  auto b = std::make_shared<Build>();
  auto* build = pd->add_subcommand("build", "Build the emote pseudo-dictionary");
  build->add_option("--vectors", b->vectors, "Vector prefix (without .txt)")->required();
  add_lexicon(build, b->lexicon, true);
  build->add_option("-k", b->cfg.k, "Tagged neighbors averaged per emote")->capture_default_str();
  build->add_option("--search-cap", b->cfg.search_cap, "Deepest neighbor rank scanned")
      ->capture_default_str();
  build->add_flag("--weighted", b->cfg.similarity_weighted, "Weight evidence by similarity");
  build->add_flag("--lexicon-self", b->lexicon_self,
                  "Also write lexicon_self.tsv: leave-one-out estimates for lexicon tokens");
  build->add_option("--out", b->out, "Output directory (pseudodict.tsv, pseudodict.json)")->required();
  registry.add(build, [b, build, &registry] {
    const auto& g = registry.globals();
    const auto store = load_embeddings(b->vectors);
    const auto lexicon = load_lexicons(b->lexicon);
    auto cfg = b->cfg;
    cfg.threads = g.threads;
    const auto dict = build_pseudodict(store, lexicon, cfg);
    OutputDir out(b->out, build, g);
    out.input(b->vectors + ".txt");
    out.inputs(b->lexicon.paths);
    save_pseudodict_tsv(dict, out.file("pseudodict.tsv"));
    save_pseudodict_json(dict, out.file("pseudodict.json"));
    std::cout << "emotes\t" << dict.size() << '\n';
    if (b->lexicon_self) {
      const auto self = build_lexicon_pseudodict(store, lexicon, cfg);
      save_pseudodict_tsv(self, out.file("lexicon_self.tsv"));
      std::cout << "lexicon RMSE\t" << evaluate_pseudodict(self, lexicon).rmse << '\n';
    }
    out.finish();
  });

  struct Eval {
    std::string pseudodict;
    std::string reference;
    double reference_scale = 1.0;
  };
  auto e = std::make_shared<Eval>();
  auto* eval = pd->add_subcommand("eval", "RMSE of a pseudo-dictionary against reference valences");
  eval->add_option("--pseudodict", e->pseudodict, "Pseudo-dictionary TSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--reference", e->reference, "Reference token<TAB>valence TSV (or .json)")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--reference-scale", e->reference_scale, "Native magnitude of reference valences")
      ->capture_default_str();
  registry.add(eval, [e] {
    const auto dict = load_pseudodict_tsv(e->pseudodict);
    LexiconOptions lo;
    lo.paths = {e->reference};
    lo.scale = e->reference_scale;
    const auto report = evaluate_pseudodict(dict, load_lexicons(lo));
    std::cout << "rmse\t" << report.rmse << "\noverlap\t" << report.overlap << '\n';
  });

  struct Lookup {
    std::string pseudodict;
    std::string emote;
  };
  auto l = std::make_shared<Lookup>();
  auto* lookup = pd->add_subcommand("lookup", "Print one emote's valence (and evidence from JSON)");
  lookup->add_option("--pseudodict", l->pseudodict, "Pseudo-dictionary TSV or JSON")
      ->required()
      ->check(CLI::ExistingFile);
  lookup->add_option("emote", l->emote, "Emote code")->required();
  registry.add(lookup, [l] {
    if (fs::path(l->pseudodict).extension() == ".json") {
      std::ifstream in(l->pseudodict, std::ios::binary);
      const auto doc = nlohmann::json::parse(in, nullptr, false);
      if (doc.is_discarded() || !doc.contains("entries")) throw FormatError("malformed pseudo-dictionary JSON");
      for (const auto& entry : doc.at("entries")) {
        if (entry.at("emote") != l->emote) continue;
        std::cout << l->emote << '\t' << entry.at("valence").get<double>() << '\n';
        for (const auto& ev : entry.at("evidence")) {
          std::cout << "  " << ev.at("token").get<std::string>() << '\t'
                    << ev.at("similarity").get<double>() << '\t' << ev.at("valence").get<double>() << '\n';
        }
        return;
      }
      throw NotFoundError("no entry for '" + l->emote + "'");
    }
    const auto dict = load_pseudodict_tsv(l->pseudodict);
    const auto it = dict.find(l->emote);
    if (it == dict.end()) throw NotFoundError("no entry for '" + l->emote + "'");
    std::cout << l->emote << '\t' << it->second.valence << '\n';
  });
}

}  // namespace cli
