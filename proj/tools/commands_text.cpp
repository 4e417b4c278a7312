// corpus, tokenize, features, train, eval, loove, grid and verify.

#include <fstream>
#include <iostream>
#include <memory>

#include <nlohmann/json.hpp>

#include "cli_support.hpp"
#include "emotesent/analyze.hpp"
#include "emotesent/error.hpp"
#include "emotesent/grid.hpp"
#include "emotesent/loove.hpp"

namespace cli {

namespace {

std::vector<TokenSequence> tokenize_all(const std::vector<std::string>& messages,
                                        const EmoteDictionary& emotes) {
  std::vector<TokenSequence> out;
  out.reserve(messages.size());
  for (const auto& m : messages) out.push_back(tokenize(m, emotes));
  return out;
}

void print_report(const EvalReport& report) {
  std::cout << "accuracy\t" << report.accuracy << "\nexamples\t" << report.total << '\n';
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& m = report.per_class[c];
    std::cout << to_string(label_from_index(c)) << "\tprecision " << m.precision << "\trecall "
              << m.recall << "\tf1 " << m.f1 << "\tsupport " << m.support << '\n';
  }
}

}  // namespace

void register_corpus(CLI::App& app, Registry& registry) {
  auto* corpus = app.add_subcommand("corpus", "Inspect chat logs and split labeled datasets");
  corpus->require_subcommand(1, 1);

  struct Stats {
    std::string log;
    std::vector<std::string> emotes;
    std::string out;
  };
  auto s = std::make_shared<Stats>();
  auto* stats = corpus->add_subcommand("stats", "Message and token-kind counts of a chat log");
  stats->add_option("--log", s->log, "Chat log (JSON lines) or plain text")->required()->check(CLI::ExistingFile);
  stats->add_option("--emotes", s->emotes, "Emote code lists")->check(CLI::ExistingFile);
  stats->add_option("--out", s->out, "Write token_types.csv here");
  registry.add(stats, [s, stats, &registry] {
    EmoteDictionary emotes;
    if (!s->emotes.empty()) emotes = load_emotes(s->emotes);
    std::size_t skipped = 0;
    std::vector<std::string> messages;
    const fs::path path(s->log);
    if (path.extension() == ".jsonl" || path.extension() == ".json") {
      auto log = load_chat_log(path);
      skipped = log.skipped;
      for (auto& m : log.messages) messages.push_back(std::move(m.text));
    } else {
      messages = load_messages(path);
    }
    const auto tokens = tokenize_all(messages, emotes);
    const auto st = token_type_stats(tokens);
    std::cout << "messages\t" << messages.size() << "\nskipped\t" << skipped << "\n" << st.to_csv();
    if (!s->out.empty()) {
      OutputDir out(s->out, stats, registry.globals());
      out.input(s->log);
      out.inputs(s->emotes);
      write_text_file(out.file("token_types.csv"), st.to_csv());
      out.finish();
    }
  });

  struct Split {
    std::string data;
    double fraction = 0.8;
    std::string out;
  };
  auto p = std::make_shared<Split>();
  auto* split = corpus->add_subcommand("split", "Stratified train/test split of a labeled TSV");
  split->add_option("--data", p->data, "Labeled TSV (text<TAB>label)")->required()->check(CLI::ExistingFile);
  split->add_option("--train-fraction", p->fraction, "Training share")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  split->add_option("--out", p->out, "Output directory")->required();
  registry.add(split, [p, split, &registry] {
    const auto data = load_labeled_dataset(p->data);
    const auto parts = stratified_split(data.examples, SplitSpec{p->fraction, registry.globals().seed});
    OutputDir out(p->out, split, registry.globals());
    out.input(p->data);
    save_labeled_dataset(out.file("train.tsv"), parts.train);
    save_labeled_dataset(out.file("test.tsv"), parts.test);
    out.finish();
    std::cout << "train\t" << parts.train.size() << "\ntest\t" << parts.test.size() << '\n';
  });
}

void register_tokenize(CLI::App& app, Registry& registry) {
  struct Opts {
    std::string input;
    std::vector<std::string> emotes;
    ProcessingOptions processing;
    bool raw = false;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "tokenize", "Tokenize messages; prints `tokens<TAB>kinds` per message");
  cmd->add_option("--input", o->input, "Messages, one per line or JSON lines (default: stdin)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--emotes", o->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  add_processing(cmd, o->processing);
  cmd->add_flag("--raw", o->raw, "Skip processing, print raw tokens");
  cmd->add_option("--out", o->out, "Write tokens.tsv here instead of stdout");
  registry.add(cmd, [o, cmd, &registry] {
    const auto emotes = load_emotes(o->emotes);
    std::vector<std::string> messages;
    if (o->input.empty()) {
      for (std::string line; std::getline(std::cin, line);) messages.push_back(line);
    } else {
      messages = load_messages(o->input);
    }
    const auto cfg = processing_config(o->processing);
    std::ostringstream text;
    for (const auto& m : messages) {
      auto tokens = tokenize(m, emotes);
      if (!o->raw) tokens = process(tokens, cfg);
      std::string words, kinds;
      for (const auto& t : tokens) {
        words += (words.empty() ? "" : " ") + t.text;
        kinds += (kinds.empty() ? "" : " ") + std::string(to_string(t.kind));
      }
      text << words << '\t' << kinds << '\n';
    }
    if (o->out.empty()) {
      std::cout << text.str();
      return;
    }
    OutputDir out(o->out, cmd, registry.globals());
    out.input(o->input);
    out.inputs(o->emotes);
    write_text_file(out.file("tokens.tsv"), text.str());
    out.finish();
  });
}

void register_features(CLI::App& app, Registry& registry) {
  struct Opts {
    std::string data;
    std::vector<std::string> emotes;
    ProcessingOptions processing;
    int order = 2;
    std::size_t min_count = 1;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("features", "Build the n-gram vocabulary of a labeled dataset");
  cmd->add_option("--data", o->data, "Labeled TSV or message file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--emotes", o->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  add_processing(cmd, o->processing);
  cmd->add_option("--order", o->order, "1 = unigrams, 2 = unigrams and bigrams")
      ->check(CLI::Range(1, 2))
      ->capture_default_str();
  cmd->add_option("--min-count", o->min_count, "Minimum n-gram count")->capture_default_str();
  cmd->add_option("--out", o->out, "Output directory")->required();
  registry.add(cmd, [o, cmd, &registry] {
    const auto emotes = load_emotes(o->emotes);
    const auto cfg = processing_config(o->processing);
    std::vector<TokenSequence> corpus;
    for (const auto& ex : load_labeled_dataset(o->data).examples) {
      corpus.push_back(process(tokenize(ex.text, emotes), cfg));
    }
    const auto vocab = build_vocab(corpus, order_from(o->order), o->min_count);
    OutputDir out(o->out, cmd, registry.globals());
    out.input(o->data);
    out.inputs(o->emotes);
    write_json_file(out.file("vocab.json"), vocab.to_json());
    std::ostringstream csv;
    csv << "index,ngram,kind\n";
    std::array<std::size_t, 3> counts{};
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      csv << i << ",\"" << vocab.label(i) << "\"," << to_string(vocab.kind(i)) << '\n';
      ++counts[static_cast<std::size_t>(vocab.kind(i))];
    }
    write_text_file(out.file("features.csv"), csv.str());
    out.finish();
    std::cout << "features\t" << vocab.size() << "\nemote_only\t" << counts[0] << "\nemote_plus\t"
              << counts[1] << "\nother\t" << counts[2] << '\n';
  });
}

void register_train(CLI::App& app, Registry& registry) {
  struct Opts {
    std::string data;
    std::vector<std::string> emotes;
    TextModelOptions model;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("train", "Train a text classifier on a labeled TSV");
  cmd->add_option("--data", o->data, "Labeled TSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--emotes", o->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  add_text_model(cmd, o->model);
  cmd->add_option("--out", o->out, "Output directory (classifier.json)")->required();
  registry.add(cmd, [o, cmd, &registry] {
    const auto& g = registry.globals();
    const auto emotes = load_emotes(o->emotes);
    const auto data = load_labeled_dataset(o->data);
    const auto clf = train_text_classifier(data.examples, emotes,
                                           text_training_options(o->model, g.threads), g.seed);
    OutputDir out(o->out, cmd, g);
    out.input(o->data);
    out.inputs(o->emotes);
    write_json_file(out.file("classifier.json"), clf.to_json());
    out.finish();
    std::cout << "trained " << to_string(clf.model.algorithm) << " on " << data.examples.size()
              << " examples, " << clf.vocab.size() << " features\n";
  });
}

void register_eval(CLI::App& app, Registry& registry) {
  struct Opts {
    std::string model;
    std::string data;
    std::vector<std::string> emotes;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("eval", "Evaluate a trained text classifier");
  cmd->add_option("--model", o->model, "classifier.json")->required()->check(CLI::ExistingFile);
  cmd->add_option("--data", o->data, "Labeled TSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--emotes", o->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out, "Write eval.csv here");
  registry.add(cmd, [o, cmd, &registry] {
    const auto clf = load_classifier(o->model);
    const auto emotes = load_emotes(o->emotes);
    const auto report = evaluate(clf, load_labeled_dataset(o->data).examples, emotes);
    print_report(report);
    if (o->out.empty()) return;
    OutputDir out(o->out, cmd, registry.globals());
    out.input(o->model);
    out.input(o->data);
    out.inputs(o->emotes);
    write_text_file(out.file("eval.csv"), report.to_csv());
    out.finish();
  });
}

void register_loove(CLI::App& app, Registry& registry) {
  auto* loove = app.add_subcommand("loove", "Two-stage classifier with emote statistics");
  loove->require_subcommand(1, 1);

  struct Train {
    std::string clf1;
    std::string pseudodict;
    std::string data;
    std::vector<std::string> emotes;
    std::string clf2 = "RF";
    bool no_clf1 = false;
    bool no_stats = false;
    std::string encoding = "onehot";
    Hyperparams hyper;
    std::string out;
  };
  auto t = std::make_shared<Train>();
  auto* train_cmd = loove->add_subcommand("train", "Train the fusion classifier; CLF1 stays frozen");
  train_cmd->add_option("--clf1", t->clf1, "Frozen first-stage classifier.json")->check(CLI::ExistingFile);
  train_cmd->add_option("--pseudodict", t->pseudodict, "Emote pseudo-dictionary TSV")->check(CLI::ExistingFile);
  train_cmd->add_option("--data", t->data, "Labeled Twitch TSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--emotes", t->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--clf2", t->clf2, "Fusion classifier algorithm")
      ->check(CLI::IsMember({"NB", "ME", "SVM", "RF"}))
      ->capture_default_str();
  train_cmd->add_flag("--no-clf1", t->no_clf1, "Emote statistics only");
  train_cmd->add_flag("--no-stats", t->no_stats, "CLF1 only");
  train_cmd->add_option("--encoding", t->encoding, "CLF1 encoding: onehot label or class scores")
      ->check(CLI::IsMember({"onehot", "scores"}))
      ->capture_default_str();
  add_hyper(train_cmd, t->hyper);
  train_cmd->add_option("--out", t->out, "Bundle directory")->required();
  registry.add(train_cmd, [t, train_cmd, &registry] {
    const auto& g = registry.globals();
    LooveOptions options;
    options.use_clf1 = !t->no_clf1;
    options.use_stats = !t->no_stats;
    options.encoding = t->encoding == "scores" ? Clf1Encoding::Scores : Clf1Encoding::OneHot;
    options.clf2_algorithm = algorithm_from(t->clf2);
    options.hyper = t->hyper;
    options.hyper.rf.threads = g.threads;
    std::shared_ptr<const TextClassifier> clf1;
    if (options.use_clf1) {
      if (t->clf1.empty()) throw ConfigError("--clf1 is required unless --no-clf1 is given");
      clf1 = std::make_shared<const TextClassifier>(load_classifier(t->clf1));
    }
    PseudoDictionary dict;
    if (options.use_stats) {
      if (t->pseudodict.empty()) throw ConfigError("--pseudodict is required unless --no-stats is given");
      dict = load_pseudodict_tsv(t->pseudodict);
    }
    const auto emotes = load_emotes(t->emotes);
    const auto data = load_labeled_dataset(t->data);
    const auto model = train_loove(data.examples, clf1, std::move(dict), emotes, options, g.seed);
    save_loove_bundle(model, t->out);
    std::cout << "fusion features\t" << model.fusion_size() << '\n';
  });

  struct Predict {
    std::string bundle;
    std::vector<std::string> emotes;
    std::string text;
    std::string input;
  };
  auto p = std::make_shared<Predict>();
  auto* predict_cmd = loove->add_subcommand(
      "predict", "Label messages; prints label, fusion vector and message");
  predict_cmd->add_option("--bundle", p->bundle, "Bundle directory")->required()->check(CLI::ExistingDirectory);
  predict_cmd->add_option("--emotes", p->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  auto* text_opt = predict_cmd->add_option("--text", p->text, "One message");
  predict_cmd->add_option("--input", p->input, "Messages, one per line")
      ->check(CLI::ExistingFile)
      ->excludes(text_opt);
  registry.add(predict_cmd, [p] {
    const auto model = load_loove_bundle(p->bundle);
    const auto emotes = load_emotes(p->emotes);
    std::vector<std::string> messages;
    if (!p->input.empty()) {
      messages = load_messages(p->input);
    } else {
      messages.push_back(p->text);
    }
    const auto names = model.fusion_feature_names();
    std::cout << "label";
    for (const auto& n : names) std::cout << '\t' << n;
    std::cout << "\tmessage\n";
    for (const auto& m : messages) {
      const auto r = predict_loove(model, m, emotes);
      std::cout << to_string(r.label);
      for (Eigen::Index i = 0; i < r.fusion.size(); ++i) std::cout << '\t' << r.fusion[i];
      std::cout << '\t' << m << '\n';
    }
  });

  struct Eval {
    std::string bundle;
    std::string data;
    std::vector<std::string> emotes;
    std::string out;
  };
  auto e = std::make_shared<Eval>();
  auto* eval_cmd = loove->add_subcommand("eval", "Evaluate a bundle on a labeled TSV");
  eval_cmd->add_option("--bundle", e->bundle, "Bundle directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--data", e->data, "Labeled TSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--emotes", e->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", e->out, "Write eval.csv here");
  registry.add(eval_cmd, [e, eval_cmd, &registry] {
    const auto model = load_loove_bundle(e->bundle);
    const auto report = evaluate_loove(model, load_labeled_dataset(e->data).examples, load_emotes(e->emotes));
    print_report(report);
    if (e->out.empty()) return;
    OutputDir out(e->out, eval_cmd, registry.globals());
    out.input(fs::path(e->bundle) / "manifest.json");
    out.input(e->data);
    out.inputs(e->emotes);
    write_text_file(out.file("eval.csv"), report.to_csv());
    out.finish();
  });

  struct Importance {
    std::string bundle;
    std::string out;
  };
  auto i = std::make_shared<Importance>();
  auto* imp_cmd = loove->add_subcommand("importance", "Gini importances of the fusion features");
  imp_cmd->add_option("--bundle", i->bundle, "Bundle directory")->required()->check(CLI::ExistingDirectory);
  imp_cmd->add_option("--out", i->out, "Write importance.csv here");
  registry.add(imp_cmd, [i, imp_cmd, &registry] {
    const auto model = load_loove_bundle(i->bundle);
    const auto report = feature_importance_loove(model);
    const auto names = model.fusion_feature_names();
    std::ostringstream csv;
    csv << "feature,group,negative,neutral,positive,mean\n";
    for (std::size_t f = 0; f < names.size(); ++f) {
      const auto idx = static_cast<Eigen::Index>(f);
      double mean = 0.0;
      csv << names[f] << ',' << report.groups[f];
      for (const auto& head : report.heads) {
        csv << ',' << head.importance[idx];
        mean += head.importance[idx] / 3.0;
      }
      csv << ',' << mean << '\n';
    }
    for (const auto& [group, value] : report.mean_by_group) csv << "total," << group << ",,,," << value << '\n';
    std::cout << csv.str();
    if (i->out.empty()) return;
    OutputDir out(i->out, imp_cmd, registry.globals());
    out.input(fs::path(i->bundle) / "manifest.json");
    write_text_file(out.file("importance.csv"), csv.str());
    out.finish();
  });
}

void register_grid(CLI::App& app, Registry& registry) {
  auto* grid = app.add_subcommand("grid", "Accuracy grids over models and datasets");
  grid->require_subcommand(1, 1);

  struct Baseline {
    std::string data;
    std::string test;
    std::vector<std::string> emotes;
    double fraction = 0.8;
    std::string stopwords;
    std::string lemmas;
    std::size_t min_count = 1;
    Hyperparams hyper;
    std::string out;
  };
  auto b = std::make_shared<Baseline>();
  auto* base = grid->add_subcommand("baseline", "P1-P3 x NB/ME/SVM/RF x 1-2-gram accuracy table");
  base->add_option("--data", b->data, "Labeled TSV (split unless --test is given)")
      ->required()
      ->check(CLI::ExistingFile);
  base->add_option("--test", b->test, "Separate labeled test TSV")->check(CLI::ExistingFile);
  base->add_option("--emotes", b->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  base->add_option("--train-fraction", b->fraction, "Training share when splitting")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  base->add_option("--stopwords", b->stopwords, "Stop word list")->check(CLI::ExistingFile);
  base->add_option("--lemmas", b->lemmas, "Lemma table")->check(CLI::ExistingFile);
  base->add_option("--min-count", b->min_count, "Minimum n-gram count")->capture_default_str();
  add_hyper(base, b->hyper);
  base->add_option("--out", b->out, "Output directory (baseline.csv)")->required();
  registry.add(base, [b, base, &registry] {
    const auto& g = registry.globals();
    const auto emotes = load_emotes(b->emotes);
    auto data = load_labeled_dataset(b->data).examples;
    Split split;
    if (b->test.empty()) {
      split = stratified_split(data, SplitSpec{b->fraction, g.seed});
    } else {
      split.train = std::move(data);
      split.test = load_labeled_dataset(b->test).examples;
    }
    BaselineGridConfig cfg;
    if (!b->stopwords.empty()) cfg.stopwords = load_stopwords(b->stopwords);
    if (!b->lemmas.empty()) cfg.lemmas = load_lemmas(b->lemmas);
    cfg.min_count = b->min_count;
    cfg.hyper = b->hyper;
    cfg.hyper.rf.threads = g.threads;
    const auto cells = run_baseline_grid(split.train, split.test, emotes, cfg, g.seed);
    const auto csv = baseline_grid_csv(cells);
    OutputDir out(b->out, base, g);
    out.input(b->data);
    out.input(b->test);
    out.inputs(b->emotes);
    write_text_file(out.file("baseline.csv"), csv);
    out.finish();
    std::cout << csv;
  });

  struct Loove {
    std::string twitch;
    std::string test;
    std::vector<std::string> datasets;
    std::string pseudodict;
    std::vector<std::string> emotes;
    double fraction = 0.8;
    Hyperparams hyper;
    std::string out;
  };
  auto l = std::make_shared<Loove>();
  auto* lg = grid->add_subcommand("loove", "CLF1 dataset x algorithm table with both edge cases");
  lg->add_option("--twitch", l->twitch, "Labeled Twitch TSV (split unless --test is given)")
      ->required()
      ->check(CLI::ExistingFile);
  lg->add_option("--test", l->test, "Separate labeled Twitch test TSV")->check(CLI::ExistingFile);
  lg->add_option("--dataset", l->datasets, "External CLF1 training data as TAG=PATH; repeatable")->required();
  lg->add_option("--pseudodict", l->pseudodict, "Emote pseudo-dictionary TSV")->required()->check(CLI::ExistingFile);
  lg->add_option("--emotes", l->emotes, "Emote code lists")->required()->check(CLI::ExistingFile);
  lg->add_option("--train-fraction", l->fraction, "Training share when splitting")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_hyper(lg, l->hyper);
  lg->add_option("--out", l->out, "Output directory (loove_grid.csv)")->required();
  registry.add(lg, [l, lg, &registry] {
    const auto& g = registry.globals();
    const auto emotes = load_emotes(l->emotes);
    auto twitch = load_labeled_dataset(l->twitch).examples;
    Split split;
    if (l->test.empty()) {
      split = stratified_split(twitch, SplitSpec{l->fraction, g.seed});
    } else {
      split.train = std::move(twitch);
      split.test = load_labeled_dataset(l->test).examples;
    }
    OutputDir out(l->out, lg, g);
    std::vector<ExternalDataset> datasets;
    for (const auto& spec : l->datasets) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--dataset expects TAG=PATH, got '" + spec + "'");
      const fs::path path = spec.substr(eq + 1);
      datasets.push_back({spec.substr(0, eq), load_labeled_dataset(path).examples});
      out.input(path);
    }
    LooveGridConfig cfg;
    cfg.clf1_options.hyper = l->hyper;
    cfg.clf1_options.hyper.rf.threads = g.threads;
    cfg.loove.hyper = cfg.clf1_options.hyper;
    const auto table = run_loove_grid(datasets, split.train, split.test,
                                      load_pseudodict_tsv(l->pseudodict), emotes, cfg, g.seed);
    out.input(l->twitch);
    out.input(l->test);
    out.input(l->pseudodict);
    out.inputs(l->emotes);
    write_text_file(out.file("loove_grid.csv"), table.to_csv());
    out.finish();
    std::cout << table.to_csv();
  });
}

void register_verify(CLI::App& app, Registry& registry) {
  auto dir = std::make_shared<std::string>();
  auto* cmd = app.add_subcommand("verify", "Re-hash the inputs and outputs recorded in a manifest");
  cmd->add_option("dir", *dir, "Output directory holding manifest.json")
      ->required()
      ->check(CLI::ExistingDirectory);
  registry.add(cmd, [dir] {
    const auto manifest = read_manifest(fs::path(*dir) / "manifest.json");
    const auto check = verify_manifest(manifest, *dir);
    for (const auto& m : check.mismatched) std::cout << "changed\t" << m << '\n';
    for (const auto& m : check.missing) std::cout << "missing\t" << m << '\n';
    if (!check.ok()) throw FormatError("manifest verification failed for " + *dir);
    std::cout << "ok\t" << manifest.inputs.size() << " inputs, " << manifest.outputs.size()
              << " outputs\n";
  });
}

}  // namespace cli
