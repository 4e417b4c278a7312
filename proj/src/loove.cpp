#include "emotesent/loove.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "emotesent/error.hpp"
#include "emotesent/manifest.hpp"
#include "io_util.hpp"

namespace emotesent {

EmoteStats extract_emote_stats(std::span<const Token> tokens, const PseudoDictionary& dict) {
  EmoteStats s;
  double sum = 0.0;
  for (const auto& t : tokens) {
    if (t.kind != TokenKind::Emote) continue;
    const auto it = dict.find(t.text);
    if (it == dict.end()) continue;
    const double v = it->second.valence;
    if (s.count == 0) {
      s.min = s.max = v;
    } else {
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    }
    sum += v;
    ++s.count;
  }
  if (s.count > 0) {
    s.present = true;
    s.mean = std::clamp(sum / static_cast<double>(s.count), s.min, s.max);
  }
  return s;
}

std::vector<std::string> LooveModel::fusion_feature_names() const {
  std::vector<std::string> names;
  if (options.use_clf1) {
    const std::string prefix = options.encoding == Clf1Encoding::OneHot ? "clf1_" : "clf1_score_";
    for (const auto l : kClassOrder) names.push_back(prefix + std::string(to_string(l)));
  }
  if (options.use_stats) {
    for (const char* n : {"emote_mean", "emote_min", "emote_max", "emote_count", "emote_present"}) {
      names.emplace_back(n);
    }
  }
  return names;
}

namespace {

void check_options(const LooveOptions& options, const TextClassifier* clf1) {
  if (!options.use_clf1 && !options.use_stats) {
    throw ConfigError("CLF1 and emote statistics cannot both be disabled");
  }
  if (options.use_clf1 && !clf1) throw ConfigError("CLF1 is enabled but no classifier was given");
}

Prediction clf1_prediction(const LooveModel& model, std::span<const Token> tokens) {
  return model.clf1->predict(tokens);
}

}  // namespace

Eigen::VectorXd fusion_vector(const LooveModel& model, std::span<const Token> tokens,
                              EmoteStats* stats_out) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.fusion_size()));
  Eigen::Index at = 0;
  if (model.options.use_clf1) {
    const auto p = clf1_prediction(model, tokens);
    if (model.options.encoding == Clf1Encoding::OneHot) {
      v[static_cast<Eigen::Index>(class_index(p.label))] = 1.0;
    } else {
      v.head<3>() = p.scores;
    }
    at = 3;
  }
  const auto stats = extract_emote_stats(tokens, model.pseudodict);
  if (model.options.use_stats) {
    v[at] = stats.mean;
    v[at + 1] = stats.min;
    v[at + 2] = stats.max;
    v[at + 3] = static_cast<double>(stats.count);
    v[at + 4] = stats.present ? 1.0 : 0.0;
  }
  if (stats_out) *stats_out = stats;
  return v;
}

LooveModel train_loove(std::span<const LabeledExample> train,
                       std::shared_ptr<const TextClassifier> clf1, PseudoDictionary pseudodict,
                       const EmoteDictionary& emotes, const LooveOptions& options,
                       std::uint64_t seed) {
  check_options(options, clf1.get());
  LooveModel model;
  model.clf1 = std::move(clf1);
  model.pseudodict = std::move(pseudodict);
  model.options = options;
  model.seed = seed;
  if (!options.use_stats) return model;  // CLF1 alone
  if (train.empty()) throw TrainingError("LOOVE training set is empty");

  std::vector<FeatureVector> rows;
  std::vector<SentimentLabel> labels;
  rows.reserve(train.size());
  const auto width = static_cast<Eigen::Index>(model.fusion_size());
  for (const auto& ex : train) {
    const auto tokens = tokenize(ex.text, emotes);
    rows.push_back(fusion_vector(model, tokens).sparseView(0.0, 0.0));
    labels.push_back(ex.label);
  }
  model.clf2 = emotesent::train(options.clf2_algorithm, stack_rows(rows, width), labels, options.hyper, seed);
  return model;
}

LoovePrediction predict_loove(const LooveModel& model, std::string_view text,
                              const EmoteDictionary& emotes) {
  const auto tokens = tokenize(text, emotes);
  LoovePrediction out;
  out.fusion = fusion_vector(model, tokens, &out.stats);
  if (model.clf2) {
    const FeatureVector x = out.fusion.sparseView(0.0, 0.0);
    out.label = predict(*model.clf2, x).label;
  } else {
    out.label = clf1_prediction(model, tokens).label;
  }
  return out;
}

EvalReport evaluate_loove(const LooveModel& model, std::span<const LabeledExample> test,
                          const EmoteDictionary& emotes) {
  std::vector<SentimentLabel> truth, predicted;
  for (const auto& ex : test) {
    truth.push_back(ex.label);
    predicted.push_back(predict_loove(model, ex.text, emotes).label);
  }
  return score_predictions(truth, predicted);
}

ImportanceReport feature_importance_loove(const LooveModel& model) {
  if (!model.clf2) throw UnsupportedError("this LOOVE model has no fusion classifier");
  std::vector<std::string> groups;
  for (const auto& name : model.fusion_feature_names()) {
    groups.push_back(name.rfind("clf1_", 0) == 0 ? "clf1_label" : "emote_stats");
  }
  return gini_importances(*model.clf2, groups);
}

// ---------------------------------------------------------------------------
// Bundle

namespace {

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto out = detail::open_output(path);
  out << doc.dump() << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json options_to_json(const LooveOptions& o) {
  return {{"use_clf1", o.use_clf1},
          {"use_stats", o.use_stats},
          {"encoding", o.encoding == Clf1Encoding::OneHot ? "onehot" : "scores"},
          {"clf2_algorithm", to_string(o.clf2_algorithm)}};
}

}  // namespace

void save_loove_bundle(const LooveModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Manifest manifest;
  manifest.command = "loove train";
  manifest.seed = model.seed;
  manifest.config = {{"fusion_layout_version", kFusionLayoutVersion},
                     {"fusion_features", model.fusion_feature_names()},
                     {"options", options_to_json(model.options)},
                     {"clf1_dataset", model.clf1 ? model.clf1->dataset_tag : "none"}};
  if (model.clf1) {
    write_json(dir / "clf1.json", model.clf1->to_json());
    manifest.add_output(dir, "clf1.json");
  }
  save_pseudodict_tsv(model.pseudodict, dir / "pseudodict.tsv");
  manifest.add_output(dir, "pseudodict.tsv");
  if (model.clf2) {
    write_json(dir / "clf2.json", model.clf2->to_json());
    manifest.add_output(dir, "clf2.json");
  }
  write_manifest(manifest, dir / "manifest.json");
}

LooveModel load_loove_bundle(const std::filesystem::path& dir) {
  const auto manifest = read_manifest(dir / "manifest.json");
  Manifest outputs_only;
  outputs_only.outputs = manifest.outputs;
  const auto check = verify_manifest(outputs_only, dir);
  if (!check.ok()) {
    std::string what = "LOOVE bundle does not match its manifest:";
    for (const auto& m : check.mismatched) what += " changed " + m;
    for (const auto& m : check.missing) what += " missing " + m;
    throw FormatError(what);
  }
  try {
    const auto& cfg = manifest.config;
    if (cfg.at("fusion_layout_version").get<int>() != kFusionLayoutVersion) {
      throw FormatError("unsupported fusion layout version");
    }
    LooveModel model;
    model.seed = manifest.seed;
    const auto& o = cfg.at("options");
    model.options.use_clf1 = o.at("use_clf1").get<bool>();
    model.options.use_stats = o.at("use_stats").get<bool>();
    model.options.encoding = o.at("encoding") == "scores" ? Clf1Encoding::Scores : Clf1Encoding::OneHot;
    const auto algorithm = parse_algorithm(o.at("clf2_algorithm").get<std::string>());
    if (!algorithm) throw FormatError("unknown CLF2 algorithm");
    model.options.clf2_algorithm = *algorithm;
    if (std::filesystem::exists(dir / "clf1.json")) {
      model.clf1 = std::make_shared<const TextClassifier>(
          TextClassifier::from_json(nlohmann::json::parse(detail::read_file(dir / "clf1.json"))));
    }
    model.pseudodict = load_pseudodict_tsv(dir / "pseudodict.tsv");
    if (std::filesystem::exists(dir / "clf2.json")) {
      model.clf2 = TrainedModel::from_json(nlohmann::json::parse(detail::read_file(dir / "clf2.json")));
    }
    check_options(model.options, model.clf1.get());
    if (model.options.use_stats && !model.clf2) throw FormatError("bundle is missing clf2.json");
    if (model.clf2 && model.clf2->n_features != model.fusion_size()) {
      throw FormatError("CLF2 width does not match the fusion layout");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed LOOVE bundle: ") + e.what());
  }
}

}  // namespace emotesent
