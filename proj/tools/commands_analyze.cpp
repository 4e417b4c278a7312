// analyze: corpus statistics and embedding-space analyses as CSV.

#include <iostream>
#include <memory>
#include <sstream>

#include "cli_support.hpp"
#include "emotesent/analyze.hpp"
#include "emotesent/error.hpp"

namespace cli {

namespace {

std::vector<TokenSequence> processed_corpus(const std::string& path,
                                            const std::vector<std::string>& emote_paths,
                                            const std::string& level) {
  const auto emotes = load_emotes(emote_paths);
  const auto lvl = level_from(level);
  const auto& stop = default_stopwords();
  std::vector<TokenSequence> out;
  for (const auto& m : load_messages(path)) out.push_back(process(tokenize(m, emotes), lvl, stop));
  return out;
}

struct CorpusOptions {
  std::string corpus;
  std::vector<std::string> emotes;
  std::string level = "P1";
  std::string out;
};

void add_corpus(CLI::App* cmd, CorpusOptions& o) {
  cmd->add_option("--corpus", o.corpus, "Chat log (JSON lines) or one message per line")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--emotes", o.emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  cmd->add_option("--level", o.level, "Processing level")
      ->check(CLI::IsMember({"P1", "P2", "P3"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->required();
}

}  // namespace

void register_analyze(CLI::App& app, Registry& registry) {
  auto* analyze = app.add_subcommand("analyze", "Plot-ready corpus and embedding analyses");
  analyze->require_subcommand(1, 1);

  auto tk = std::make_shared<CorpusOptions>();
  auto* tokens = analyze->add_subcommand("tokens", "Unique tokens and occurrences per kind");
  add_corpus(tokens, *tk);
  registry.add(tokens, [tk, tokens, &registry] {
    const auto st = token_type_stats(processed_corpus(tk->corpus, tk->emotes, tk->level));
    OutputDir out(tk->out, tokens, registry.globals());
    out.input(tk->corpus);
    out.inputs(tk->emotes);
    write_text_file(out.file("token_types.csv"), st.to_csv());
    out.finish();
    std::cout << st.to_csv();
  });

  struct Zipf {
    CorpusOptions corpus;
    std::string kind = "emote";
    std::size_t first = 1;
    std::size_t last = 100000;
  };
  auto z = std::make_shared<Zipf>();
  auto* zipf = analyze->add_subcommand("zipf", "Rank-frequency tables and power-law fits");
  add_corpus(zipf, z->corpus);
  zipf->add_option("--kind", z->kind, "word, emote, emoji, emoticon or all")->capture_default_str();
  zipf->add_option("--first-rank", z->first, "First rank of the fit window")->capture_default_str();
  zipf->add_option("--last-rank", z->last, "Last rank of the fit window")->capture_default_str();
  registry.add(zipf, [z, zipf, &registry] {
    const auto tables = rank_frequency(processed_corpus(z->corpus.corpus, z->corpus.emotes, z->corpus.level));
    std::vector<TokenKind> kinds;
    if (z->kind == "all") {
      kinds = {TokenKind::Word, TokenKind::Emote, TokenKind::Emoji, TokenKind::Emoticon};
    } else {
      const auto k = parse_token_kind(z->kind);
      if (!k) throw ConfigError("unknown token kind '" + z->kind + "'");
      kinds = {*k};
    }
    OutputDir out(z->corpus.out, zipf, registry.globals());
    out.input(z->corpus.corpus);
    out.inputs(z->corpus.emotes);
    std::ostringstream fits;
    fits << "kind,exponent,intercept,first_rank,last_rank,r_squared,degenerate\n";
    for (const auto kind : kinds) {
      const auto it = tables.find(kind);
      const auto name = std::string(to_string(kind));
      std::vector<double> freq;
      std::ostringstream table;
      table << "rank,token,frequency\n";
      if (it != tables.end()) {
        for (std::size_t r = 0; r < it->second.size(); ++r) {
          table << (r + 1) << ',' << it->second[r].first << ',' << it->second[r].second << '\n';
          freq.push_back(static_cast<double>(it->second[r].second));
        }
      }
      write_text_file(out.file("rank_frequency_" + name + ".csv"), table.str());
      try {
        const auto fit = zipf_fit(freq, z->first, z->last);
        fits << name << ',' << fit.exponent << ',' << fit.intercept << ',' << fit.first_rank << ','
             << fit.last_rank << ',' << (fit.r_squared ? std::to_string(*fit.r_squared) : "") << ','
             << (fit.degenerate ? "true" : "false") << '\n';
      } catch (const FitError& e) {
        if (kinds.size() == 1) throw;
        std::cerr << "skipping " << name << ": " << e.what() << '\n';
      }
    }
    write_text_file(out.file("zipf.csv"), fits.str());
    out.finish();
    std::cout << fits.str();
  });

  struct Neighbors {
    std::string vectors;
    std::size_t per_kind = 1000;
    std::size_t k = 100;
    std::string out;
  };
  auto nb = std::make_shared<Neighbors>();
  auto* neighbors = analyze->add_subcommand("neighbors", "Kind mix among each kind's nearest neighbors");
  neighbors->add_option("--vectors", nb->vectors, "Vector prefix (without .txt)")->required();
  neighbors->add_option("--per-kind", nb->per_kind, "Most frequent tokens sampled per kind")
      ->capture_default_str();
  neighbors->add_option("-k", nb->k, "Neighbors per token")->capture_default_str();
  neighbors->add_option("--out", nb->out, "Output directory")->required();
  registry.add(neighbors, [nb, neighbors, &registry] {
    const auto store = load_embeddings(nb->vectors);
    const auto sample = top_tokens_per_kind(store, nb->per_kind);
    const auto dist = neighbor_type_distribution(store, sample, nb->k, registry.globals().threads);
    OutputDir out(nb->out, neighbors, registry.globals());
    out.input(nb->vectors + ".txt");
    write_text_file(out.file("neighbor_types.csv"), dist.to_csv());
    out.finish();
    std::cout << dist.to_csv();
  });

  struct Senthist {
    std::string vectors;
    LexiconOptions lexicon;
    std::string pseudodict;
    std::size_t bins = 20;
    std::size_t neighbors = 1000;
    std::string out;
  };
  auto sh = std::make_shared<Senthist>();
  auto* senthist = analyze->add_subcommand(
      "senthist", "Valence histograms of tagged neighbors per source class");
  senthist->add_option("--vectors", sh->vectors, "Vector prefix (without .txt)")->required();
  add_lexicon(senthist, sh->lexicon, false);
  senthist->add_option("--pseudodict", sh->pseudodict, "Pseudo-dictionary TSV merged into the valences")
      ->check(CLI::ExistingFile);
  senthist->add_option("--bins", sh->bins, "Histogram bins over [-1, 1]")->capture_default_str();
  senthist->add_option("--neighbors", sh->neighbors, "Neighbors scanned per token")->capture_default_str();
  senthist->add_option("--out", sh->out, "Output directory")->required();
  registry.add(senthist, [sh, senthist, &registry] {
    if (sh->lexicon.paths.empty() && sh->pseudodict.empty()) {
      throw ConfigError("give --lexicon and/or --pseudodict");
    }
    const auto store = load_embeddings(sh->vectors);
    auto valences = load_lexicons(sh->lexicon);
    if (!sh->pseudodict.empty()) valences.merge(as_lexicon(load_pseudodict_tsv(sh->pseudodict)));
    const auto hist = sentiment_neighborhood_histogram(store, valences, sh->bins, sh->neighbors,
                                                       registry.globals().threads);
    OutputDir out(sh->out, senthist, registry.globals());
    out.input(sh->vectors + ".txt");
    out.inputs(sh->lexicon.paths);
    out.input(sh->pseudodict);
    write_text_file(out.file("senthist.csv"), hist.to_csv());
    out.finish();
    std::cout << hist.to_csv();
  });

  struct Features {
    std::string model;
    std::size_t top = 100;
    std::size_t bin = 10;
    std::string out;
  };
  auto f = std::make_shared<Features>();
  auto* features = analyze->add_subcommand(
      "features", "Where emote features rank among a forest's top importances");
  features->add_option("--model", f->model, "Random forest classifier.json")->required()->check(CLI::ExistingFile);
  features->add_option("--top", f->top, "Top ranks per head")->capture_default_str();
  features->add_option("--bin-width", f->bin, "Histogram bin width")->capture_default_str();
  features->add_option("--out", f->out, "Output directory")->required();
  registry.add(features, [f, features, &registry] {
    const auto clf = load_classifier(f->model);
    const auto report = gini_importances(clf.model, feature_groups(clf.vocab));
    const auto hist = top_feature_rank_histogram(report, f->top, f->bin);
    std::ostringstream top;
    top << "head,rank,feature,group,importance\n";
    for (const auto& head : report.heads) {
      for (std::size_t r = 0; r < std::min(f->top, head.ranking.size()); ++r) {
        const auto idx = head.ranking[r];
        top << to_string(head.head) << ',' << r << ",\"" << clf.vocab.label(idx) << "\","
            << report.groups[idx] << ',' << head.importance[static_cast<Eigen::Index>(idx)] << '\n';
      }
    }
    std::ostringstream groups;
    groups << "group,importance,feature_fraction\n";
    for (const auto& [g, v] : report.mean_by_group) {
      groups << g << ',' << v << ',' << report.feature_fraction_by_group.at(g) << '\n';
    }
    OutputDir out(f->out, features, registry.globals());
    out.input(f->model);
    write_text_file(out.file("rank_histogram.csv"), hist.to_csv());
    write_text_file(out.file("top_features.csv"), top.str());
    write_text_file(out.file("group_importance.csv"), groups.str());
    out.finish();
    std::cout << "emote mean/median rank\t" << hist.emote.mean << '\t' << hist.emote.median
              << "\nother mean/median rank\t" << hist.other.mean << '\t' << hist.other.median << '\n'
              << groups.str();
  });

  struct Export {
    std::string vectors;
    std::size_t per_kind = 1000;
    std::string out;
  };
  auto ex = std::make_shared<Export>();
  auto* exp = analyze->add_subcommand("export-vectors", "Dump the per-kind top sample for projection tools");
  exp->add_option("--vectors", ex->vectors, "Vector prefix (without .txt)")->required();
  exp->add_option("--per-kind", ex->per_kind, "Most frequent tokens per kind")->capture_default_str();
  exp->add_option("--out", ex->out, "Output directory")->required();
  registry.add(exp, [ex, exp, &registry] {
    const auto store = load_embeddings(ex->vectors);
    const auto sample = top_tokens_per_kind(store, ex->per_kind);
    OutputDir out(ex->out, exp, registry.globals());
    out.input(ex->vectors + ".txt");
    export_vectors(store, sample, out.file("vectors.tsv"));
    out.finish();
    std::cout << "tokens\t" << sample.size() << '\n';
  });
}

}  // namespace cli
