#include <doctest.h>

#include <fstream>
#include <random>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "emotesent/error.hpp"
#include "emotesent/loove.hpp"
#include "test_support.hpp"

using namespace emotesent;

namespace {

PseudoDictionary dict_of(std::initializer_list<std::pair<const char*, double>> entries) {
  PseudoDictionary d;
  for (const auto& [e, v] : entries) d.emplace(e, PseudoDictEntry{e, v, {}});
  return d;
}

TokenSequence emotes_seq(std::initializer_list<const char*> codes) {
  TokenSequence s;
  for (const auto* c : codes) s.push_back({c, TokenKind::Emote});
  return s;
}

std::shared_ptr<const TextClassifier> text_clf(std::span<const LabeledExample> data,
                                               const EmoteDictionary& emotes, Algorithm a) {
  TextTrainingOptions opt;
  opt.algorithm = a;
  opt.order = NgramOrder::Unigram;
  opt.hyper.rf.trees = 20;
  return std::make_shared<const TextClassifier>(train_text_classifier(data, emotes, opt, 5));
}

LooveOptions small_forest() {
  LooveOptions o;
  o.hyper.rf.trees = 30;
  return o;
}

}  // namespace

TEST_CASE("emote statistics") {
  const auto dict = dict_of({{"A", 0.5}, {"B", -0.5}, {"C", 1.0}, {"D", -0.75}});
  const auto s = extract_emote_stats(emotes_seq({"A", "B", "C"}), dict);
  CHECK(s.mean == doctest::Approx(1.0 / 3.0));
  CHECK(s.min == -0.5);
  CHECK(s.max == 1.0);
  CHECK(s.count == 3);
  CHECK(s.present);

  CHECK(extract_emote_stats(TokenSequence{}, dict) == EmoteStats{});
  const TokenSequence words = {{"A", TokenKind::Word}, {"unknown", TokenKind::Emote}};
  CHECK(extract_emote_stats(words, dict) == EmoteStats{});

  const auto one = extract_emote_stats(emotes_seq({"D"}), dict);
  CHECK(one.mean == -0.75);
  CHECK(one.min == -0.75);
  CHECK(one.max == -0.75);
  CHECK(one.count == 1);

  // Entries for emotes outside the message never change its statistics.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> v(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    auto bigger = dict;
    for (int i = 0; i < 20; ++i) {
      const auto code = "extra" + std::to_string(trial) + "_" + std::to_string(i);
      bigger.emplace(code, PseudoDictEntry{code, v(rng), {}});
    }
    const auto msg = emotes_seq({"A", "C", "zzz"});
    REQUIRE(extract_emote_stats(msg, bigger) == extract_emote_stats(msg, dict));
    const auto st = extract_emote_stats(msg, bigger);
    REQUIRE(st.min <= st.mean);
    REQUIRE(st.mean <= st.max);
  }
}

TEST_CASE("fusion layout and the zero-emote vector") {
  const auto emotes = testing::emote_dict({"Kappa"});
  const std::vector<LabeledExample> data = {{"hello there", SentimentLabel::Neutral},
                                            {"hello you", SentimentLabel::Neutral},
                                            {"there you", SentimentLabel::Neutral},
                                            {"great", SentimentLabel::Positive},
                                            {"awful", SentimentLabel::Negative}};
  const auto clf1 = text_clf(data, emotes, Algorithm::NaiveBayes);
  const auto model = train_loove(data, clf1, dict_of({{"Kappa", 0.2}}), emotes, small_forest(), 1);
  CHECK(model.fusion_feature_names() ==
        std::vector<std::string>{"clf1_negative", "clf1_neutral", "clf1_positive", "emote_mean",
                                 "emote_min", "emote_max", "emote_count", "emote_present"});
  const auto p = predict_loove(model, "zzz", emotes);
  Eigen::VectorXd want(8);
  want << 0, 1, 0, 0, 0, 0, 0, 0;
  CHECK(p.fusion == want);

  const auto k = predict_loove(model, "Kappa Kappa", emotes);
  CHECK(k.stats.count == 2);
  CHECK(k.fusion.tail(5) == (Eigen::VectorXd(5) << 0.2, 0.2, 0.2, 2, 1).finished());
  // The vector returned is the one CLF2 scores.
  const FeatureVector sv = k.fusion.sparseView(0.0, 0.0);
  CHECK(k.label == predict(*model.clf2, sv).label);

  LooveOptions stats_only = small_forest();
  stats_only.use_clf1 = false;
  const auto a = train_loove(data, nullptr, dict_of({{"Kappa", 0.2}}), emotes, stats_only, 1);
  CHECK(a.fusion_size() == 5);
  CHECK(a.fusion_feature_names().front() == "emote_mean");

  LooveOptions no_stats;
  no_stats.use_stats = false;
  const auto b = train_loove(data, clf1, {}, emotes, no_stats, 1);
  CHECK_FALSE(b.clf2.has_value());
  CHECK(predict_loove(b, "great", emotes).label == clf1->predict("great", emotes).label);

  LooveOptions scores = small_forest();
  scores.encoding = Clf1Encoding::Scores;
  const auto c = train_loove(data, clf1, dict_of({{"Kappa", 0.2}}), emotes, scores, 1);
  CHECK(c.fusion_feature_names().front() == "clf1_score_negative");
  CHECK(predict_loove(c, "zzz", emotes).fusion.head(3).sum() == doctest::Approx(1.0));

  LooveOptions none;
  none.use_clf1 = false;
  none.use_stats = false;
  CHECK_THROWS_AS(train_loove(data, clf1, {}, emotes, none, 1), ConfigError);
  CHECK_THROWS_AS(train_loove(data, nullptr, {}, emotes, LooveOptions{}, 1), ConfigError);
  const std::vector<LabeledExample> flat(4, {"hello", SentimentLabel::Neutral});
  CHECK_THROWS_AS(train_loove(flat, clf1, {}, emotes, small_forest(), 1), TrainingError);
}

TEST_CASE("emote statistics beat a classifier blind to emotes") {
  const auto data = testing::emote_signal_data(900, 600, 17);
  // CLF1 learns from text whose words carry no label signal.
  const auto clf1 = text_clf(data.paraphrases, data.emotes, Algorithm::MaxEnt);
  const auto before = clf1->to_json().dump();

  const auto model = train_loove(data.train, clf1, data.pseudodict, data.emotes, small_forest(), 4);
  CHECK(clf1->to_json().dump() == before);

  const double alone = evaluate(*clf1, data.test, data.emotes).accuracy;
  const double fused = evaluate_loove(model, data.test, data.emotes).accuracy;
  MESSAGE("CLF1 alone " << alone << ", LOOVE " << fused);
  CHECK(fused > alone);
  CHECK(fused > 0.95);

  const auto report = feature_importance_loove(model);
  for (const auto& head : report.heads) {
    CHECK(head.importance.size() == 8);
    CHECK(head.importance.sum() == doctest::Approx(1.0));
  }
  CHECK(report.mean_by_group.at("emote_stats") > report.mean_by_group.at("clf1_label"));

  LooveOptions svm = small_forest();
  svm.clf2_algorithm = Algorithm::LinearSvm;
  const auto linear = train_loove(data.train, clf1, data.pseudodict, data.emotes, svm, 4);
  CHECK_THROWS_AS(feature_importance_loove(linear), UnsupportedError);

  LooveOptions stats_only = small_forest();
  stats_only.use_clf1 = false;
  const auto a = train_loove(data.train, nullptr, data.pseudodict, data.emotes, stats_only, 4);
  const auto ra = feature_importance_loove(a);
  CHECK(ra.heads[0].importance.size() == 5);
  CHECK(ra.mean_by_group.count("clf1_label") == 0);
}

TEST_CASE("rotating the embedding space leaves fusion vectors unchanged") {
  std::mt19937_64 rng(31);
  std::normal_distribution<float> g(0.0f, 1.0f);
  const int n = 240, dim = 8;
  Eigen::MatrixXf v(n, dim);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = g(rng);
  std::vector<std::string> tokens;
  std::vector<TokenKind> kinds;
  SentimentLexicon lex;
  EmoteDictionary emotes;
  std::uniform_real_distribution<double> val(-1, 1);
  for (int i = 0; i < n; ++i) {
    const bool emote = i % 4 == 0;
    tokens.push_back((emote ? "E" : "w") + std::to_string(i));
    kinds.push_back(emote ? TokenKind::Emote : TokenKind::Word);
    if (emote) emotes.add(tokens.back());
    if (!emote && i % 3 == 0) lex.insert(tokens.back(), val(rng), LexiconSource::User);
  }
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
  const Eigen::MatrixXf rotated = (v.cast<double>() * q).cast<float>();

  PseudoDictConfig cfg;
  cfg.search_cap = 60;
  const auto d1 = build_pseudodict(testing::make_store(tokens, kinds, v), lex, cfg);
  const auto d2 = build_pseudodict(testing::make_store(tokens, kinds, rotated), lex, cfg);
  REQUIRE(d1.size() == d2.size());
  for (const auto& [e, entry] : d1) REQUIRE(d2.at(e).valence == entry.valence);

  std::vector<LabeledExample> train;
  std::uniform_int_distribution<std::size_t> pick(0, emotes.size() - 1);
  const auto codes = emotes.sorted_codes();
  for (int i = 0; i < 60; ++i) {
    const auto& c = codes[pick(rng)];
    const auto v1 = d1.count(c) ? d1.at(c).valence : 0.0;
    train.push_back({c + " w1", v1 > 0.2 ? SentimentLabel::Positive
                                : v1 < -0.2 ? SentimentLabel::Negative : SentimentLabel::Neutral});
  }
  LooveOptions o = small_forest();
  o.use_clf1 = false;
  const auto m1 = train_loove(train, nullptr, d1, emotes, o, 2);
  const auto m2 = train_loove(train, nullptr, d2, emotes, o, 2);
  for (const auto& ex : train) {
    CHECK(predict_loove(m1, ex.text, emotes).fusion == predict_loove(m2, ex.text, emotes).fusion);
  }
  CHECK(m1.clf2->to_json().dump() == m2.clf2->to_json().dump());
}

TEST_CASE("bundles round-trip and detect tampering") {
  const auto data = testing::emote_signal_data(300, 100, 8);
  const auto clf1 = text_clf(data.paraphrases, data.emotes, Algorithm::NaiveBayes);
  const auto model = train_loove(data.train, clf1, data.pseudodict, data.emotes, small_forest(), 9);
  const auto dir = testing::scratch_dir("loove_bundle");
  save_loove_bundle(model, dir);
  for (const auto* f : {"clf1.json", "pseudodict.tsv", "clf2.json", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  const auto back = load_loove_bundle(dir);
  for (const auto& ex : data.test) {
    const auto p1 = predict_loove(model, ex.text, data.emotes);
    const auto p2 = predict_loove(back, ex.text, data.emotes);
    REQUIRE(p1.label == p2.label);
    REQUIRE(p1.fusion == p2.fusion);
  }
  {
    std::ofstream out(dir / "pseudodict.tsv", std::ios::app);
    out << "Extra\t0.5\t1\n";
  }
  CHECK_THROWS_AS(load_loove_bundle(dir), FormatError);
  std::filesystem::remove(dir / "clf2.json");
  CHECK_THROWS_AS(load_loove_bundle(dir), FormatError);
}
