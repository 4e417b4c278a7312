#include "emotesent/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emotesent/error.hpp"
#include "emotesent/random.hpp"

namespace emotesent {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::NaiveBayes: return "NB";
    case Algorithm::MaxEnt: return "ME";
    case Algorithm::LinearSvm: return "SVM";
    case Algorithm::RandomForest: return "RF";
  }
  return "NB";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto a : {Algorithm::NaiveBayes, Algorithm::MaxEnt, Algorithm::LinearSvm,
                 Algorithm::RandomForest}) {
    if (to_string(a) == upper) return a;
  }
  return std::nullopt;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_training_input(const FeatureMatrix& features, std::span<const SentimentLabel> labels) {
  if (features.rows() == 0) throw TrainingError("training set is empty");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw TrainingError("feature rows and labels differ in length");
  }
  std::array<bool, kNumClasses> seen{};
  for (auto l : labels) seen[class_index(l)] = true;
  if (std::count(seen.begin(), seen.end(), true) < 2) {
    throw TrainingError("training data must contain at least two classes");
  }
}

ClassScores softmax(const ClassScores& z) {
  const double m = z.maxCoeff();
  if (!std::isfinite(m)) return ClassScores::Constant(1.0 / 3.0);
  // Scalar exp: the vectorized one clamps -inf to a tiny nonzero value.
  const ClassScores e = (z.array() - m).unaryExpr([](double v) { return std::exp(v); }).matrix();
  return e / e.sum();
}

void check_width(const TrainedModel& model, const FeatureVector& x) {
  if (static_cast<std::size_t>(x.size()) > model.n_features) {
    for (FeatureVector::InnerIterator it(x); it; ++it) {
      if (static_cast<std::size_t>(it.index()) >= model.n_features) {
        throw ConfigError("feature index " + std::to_string(it.index()) +
                          " is outside the model's " + std::to_string(model.n_features) +
                          " features");
      }
    }
  }
}

template <class Weights>
ClassScores linear_scores(const Weights& w, const Eigen::Vector3d& b, const FeatureVector& x) {
  ClassScores z = b;
  for (FeatureVector::InnerIterator it(x); it; ++it) z += it.value() * w.col(it.index());
  return z;
}

}  // namespace

// ---------------------------------------------------------------------------
// Naive Bayes

NaiveBayesModel train_naive_bayes(const FeatureMatrix& features,
                                  std::span<const SentimentLabel> labels,
                                  const NaiveBayesParams& params) {
  const auto n_features = features.cols();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(3, n_features);
  Eigen::Vector3d docs = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const auto c = static_cast<Eigen::Index>(class_index(labels[static_cast<std::size_t>(i)]));
    docs[c] += 1.0;
    for (FeatureMatrix::InnerIterator it(features, i); it; ++it) counts(c, it.col()) += it.value();
  }
  NaiveBayesModel model;
  model.log_likelihood.resize(3, n_features);
  for (Eigen::Index c = 0; c < 3; ++c) {
    model.log_prior[c] = docs[c] > 0 ? std::log(docs[c] / static_cast<double>(features.rows()))
                                     : kNegInf;
    const double denom = counts.row(c).sum() + params.alpha * static_cast<double>(n_features);
    model.log_likelihood.row(c) = ((counts.row(c).array() + params.alpha) / denom).log().matrix();
  }
  return model;
}

ClassScores naive_bayes_posterior(const NaiveBayesModel& model, const FeatureVector& x) {
  ClassScores s = model.log_prior;
  for (FeatureVector::InnerIterator it(x); it; ++it) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      if (std::isfinite(s[c])) s[c] += it.value() * model.log_likelihood(c, it.index());
    }
  }
  return softmax(s);
}

// ---------------------------------------------------------------------------
// Maximum entropy

double maxent_objective(const MaxEntModel& model, const FeatureMatrix& features,
                        std::span<const SentimentLabel> labels, double l2,
                        Eigen::MatrixXd* weight_grad, Eigen::Vector3d* bias_grad) {
  const auto n = static_cast<double>(features.rows());
  Eigen::MatrixXd z = features * model.weights.transpose();  // n x 3
  z.rowwise() += model.bias.transpose();
  double loss = 0.0;
  Eigen::MatrixXd residual(z.rows(), 3);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const Eigen::RowVector3d e = (z.row(i).array() - m).exp().matrix();
    const double sum = e.sum();
    const auto y = static_cast<Eigen::Index>(class_index(labels[static_cast<std::size_t>(i)]));
    loss += m + std::log(sum) - z(i, y);
    residual.row(i) = e / sum;
    residual(i, y) -= 1.0;
  }
  loss = loss / n + 0.5 * l2 * model.weights.squaredNorm();
  if (weight_grad) {
    *weight_grad = (features.transpose() * residual).transpose() / n + l2 * model.weights;
  }
  if (bias_grad) *bias_grad = residual.colwise().sum().transpose() / n;
  return loss;
}

MaxEntModel train_maxent(const FeatureMatrix& features, std::span<const SentimentLabel> labels,
                         const MaxEntParams& params) {
  MaxEntModel model;
  model.weights = Eigen::MatrixXd::Zero(3, features.cols());
  model.bias.setZero();

  double step = 0.0;
  if (params.step) {
    step = *params.step;
  } else {
    // Hessian of the mean softmax loss is bounded by 0.5 * mean ||[x, 1]||^2.
    double mean_sq = 0.0;
    for (Eigen::Index i = 0; i < features.rows(); ++i) mean_sq += features.row(i).squaredNorm() + 1.0;
    mean_sq /= static_cast<double>(features.rows());
    step = 1.0 / (0.5 * mean_sq + params.l2);
  }

  Eigen::MatrixXd grad_w;
  Eigen::Vector3d grad_b;
  double previous = maxent_objective(model, features, labels, params.l2, &grad_w, &grad_b);
  for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
    model.weights -= step * grad_w;
    model.bias -= step * grad_b;
    const double loss = maxent_objective(model, features, labels, params.l2, &grad_w, &grad_b);
    if (std::abs(previous - loss) < params.tolerance) break;
    previous = loss;
  }
  return model;
}

// ---------------------------------------------------------------------------
// Linear SVM (Pegasos, one-vs-rest)

LinearSvmModel train_linear_svm(const FeatureMatrix& features,
                                std::span<const SentimentLabel> labels, const SvmParams& params,
                                std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(features.rows());
  const auto width = features.cols();
  const double lambda = 1.0 / (static_cast<double>(n) * params.c);

  LinearSvmModel model;
  model.weights = Eigen::MatrixXd::Zero(3, width);
  std::vector<std::size_t> order(n);

  for (std::size_t head = 0; head < kNumClasses; ++head) {
    // w = scale * v, with the bias as the last component of v.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(width + 1);
    double scale = 1.0;
    Rng rng(derive_seed(seed, head));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      rng.shuffle(order.begin(), order.end());
      for (const auto i : order) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double y = class_index(labels[i]) == head ? 1.0 : -1.0;
        double dot = v[width];
        for (FeatureMatrix::InnerIterator it(features, static_cast<Eigen::Index>(i)); it; ++it) {
          dot += it.value() * v[it.col()];
        }
        const double margin = y * scale * dot;

        const double shrink = 1.0 - eta * lambda;
        if (shrink <= 0.0) {
          v.setZero();
          scale = 1.0;
        } else {
          scale *= shrink;
        }
        if (margin < 1.0) {
          const double add = eta * y / scale;
          for (FeatureMatrix::InnerIterator it(features, static_cast<Eigen::Index>(i)); it; ++it) {
            v[it.col()] += add * it.value();
          }
          v[width] += add;
        }
        if (scale < 1e-9) {
          v *= scale;
          scale = 1.0;
        }
      }
    }
    v *= scale;
    model.weights.row(static_cast<Eigen::Index>(head)) = v.head(width).transpose();
    model.bias[static_cast<Eigen::Index>(head)] = v[width];
  }
  return model;
}

// ---------------------------------------------------------------------------
// Dispatch

TrainedModel train(Algorithm algorithm, const FeatureMatrix& features,
                   std::span<const SentimentLabel> labels, const Hyperparams& hyper,
                   std::uint64_t seed) {
  check_training_input(features, labels);
  TrainedModel model;
  model.algorithm = algorithm;
  model.n_features = static_cast<std::size_t>(features.cols());
  model.seed = seed;
  switch (algorithm) {
    case Algorithm::NaiveBayes: model.params = train_naive_bayes(features, labels, hyper.nb); break;
    case Algorithm::MaxEnt: model.params = train_maxent(features, labels, hyper.me); break;
    case Algorithm::LinearSvm:
      model.params = train_linear_svm(features, labels, hyper.svm, seed);
      break;
    case Algorithm::RandomForest:
      model.params = train_random_forest(features, labels, hyper.rf, seed);
      break;
  }
  return model;
}

namespace {

ClassScores forest_scores(const RandomForestModel& forest, const FeatureVector& x) {
  ClassScores s = ClassScores::Zero();
  for (std::size_t head = 0; head < kNumClasses; ++head) {
    const auto& trees = forest.heads[head];
    if (trees.empty()) continue;
    double total = 0.0;
    for (const auto& tree : trees) total += tree.leaf_for(x).positive_fraction();
    s[static_cast<Eigen::Index>(head)] = total / static_cast<double>(trees.size());
  }
  return s;
}

}  // namespace

Prediction predict(const TrainedModel& model, const FeatureVector& x) {
  check_width(model, x);
  Prediction p;
  p.scores = std::visit(
      [&](const auto& params) -> ClassScores {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, NaiveBayesModel>) {
          return naive_bayes_posterior(params, x);
        } else if constexpr (std::is_same_v<T, MaxEntModel>) {
          return softmax(linear_scores(params.weights, params.bias, x));
        } else if constexpr (std::is_same_v<T, LinearSvmModel>) {
          return linear_scores(params.weights, params.bias, x);
        } else {
          return forest_scores(params, x);
        }
      },
      model.params);
  p.label = argmax_label(p.scores);
  return p;
}

std::vector<Prediction> predict(const TrainedModel& model, const FeatureMatrix& rows) {
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const FeatureVector x = rows.row(i);
    out.push_back(predict(model, x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto row = rows.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) throw FormatError("matrix row width mismatch");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

nlohmann::json vec3_to_json(const Eigen::Vector3d& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < 3; ++i) {
    if (std::isfinite(v[i])) {
      out.push_back(v[i]);
    } else {
      out.push_back(nullptr);  // -inf log prior of an absent class
    }
  }
  return out;
}

Eigen::Vector3d vec3_from_json(const nlohmann::json& j) {
  Eigen::Vector3d v;
  for (Eigen::Index i = 0; i < 3; ++i) {
    const auto& e = j.at(static_cast<std::size_t>(i));
    v[i] = e.is_null() ? kNegInf : e.get<double>();
  }
  return v;
}

nlohmann::json tree_to_json(const DecisionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.weight, n.positive,
                     n.impurity_decrease});
  }
  return nodes;
}

DecisionTree tree_from_json(const nlohmann::json& j) {
  DecisionTree tree;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at(0).get<int>();
    node.threshold = n.at(1).get<double>();
    node.left = n.at(2).get<int>();
    node.right = n.at(3).get<int>();
    node.weight = n.at(4).get<double>();
    node.positive = n.at(5).get<double>();
    node.impurity_decrease = n.at(6).get<double>();
    tree.nodes.push_back(node);
  }
  const auto count = static_cast<int>(tree.nodes.size());
  for (const auto& n : tree.nodes) {
    if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count)) {
      throw FormatError("tree node has invalid children");
    }
  }
  if (tree.nodes.empty()) throw FormatError("tree has no nodes");
  return tree;
}

}  // namespace

nlohmann::json TrainedModel::to_json() const {
  nlohmann::json p;
  std::visit(
      [&](const auto& params) {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, NaiveBayesModel>) {
          p = {{"log_prior", vec3_to_json(params.log_prior)},
               {"log_likelihood", matrix_to_json(params.log_likelihood)}};
        } else if constexpr (std::is_same_v<T, MaxEntModel> || std::is_same_v<T, LinearSvmModel>) {
          p = {{"weights", matrix_to_json(params.weights)}, {"bias", vec3_to_json(params.bias)}};
        } else {
          nlohmann::json heads = nlohmann::json::array();
          for (const auto& trees : params.heads) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& t : trees) list.push_back(tree_to_json(t));
            heads.push_back(std::move(list));
          }
          p = {{"heads", std::move(heads)}};
        }
      },
      params);
  return {{"format", "emotesent-model"},
          {"version", 1},
          {"algorithm", to_string(algorithm)},
          {"n_features", n_features},
          {"seed", seed},
          {"vocab_hash", vocab_hash},
          {"params", std::move(p)}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "emotesent-model" || doc.at("version") != 1) {
      throw FormatError("unsupported model format/version");
    }
    TrainedModel m;
    const auto algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
    if (!algorithm) throw FormatError("unknown algorithm in model");
    m.algorithm = *algorithm;
    m.n_features = doc.at("n_features").get<std::size_t>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.vocab_hash = doc.value("vocab_hash", "");
    const auto& p = doc.at("params");
    const auto width = static_cast<Eigen::Index>(m.n_features);
    switch (m.algorithm) {
      case Algorithm::NaiveBayes:
        m.params = NaiveBayesModel{vec3_from_json(p.at("log_prior")),
                                   matrix_from_json(p.at("log_likelihood"), width)};
        break;
      case Algorithm::MaxEnt:
        m.params = MaxEntModel{matrix_from_json(p.at("weights"), width), vec3_from_json(p.at("bias"))};
        break;
      case Algorithm::LinearSvm:
        m.params =
            LinearSvmModel{matrix_from_json(p.at("weights"), width), vec3_from_json(p.at("bias"))};
        break;
      case Algorithm::RandomForest: {
        RandomForestModel forest;
        const auto& heads = p.at("heads");
        if (heads.size() != kNumClasses) throw FormatError("forest must have three heads");
        for (std::size_t h = 0; h < kNumClasses; ++h) {
          for (const auto& t : heads[h]) forest.heads[h].push_back(tree_from_json(t));
        }
        m.params = std::move(forest);
        break;
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Evaluation

EvalReport score_predictions(std::span<const SentimentLabel> truth,
                             std::span<const SentimentLabel> predicted) {
  if (truth.empty()) throw EvaluationError("cannot evaluate on an empty test set");
  if (truth.size() != predicted.size()) throw EvaluationError("truth/prediction length mismatch");
  EvalReport report;
  report.total = truth.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = static_cast<Eigen::Index>(class_index(truth[i]));
    const auto p = static_cast<Eigen::Index>(class_index(predicted[i]));
    ++report.confusion(t, p);
    if (t == p) ++correct;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (Eigen::Index c = 0; c < 3; ++c) {
    auto& m = report.per_class[static_cast<std::size_t>(c)];
    const double tp = report.confusion(c, c);
    const double predicted_c = report.confusion.col(c).sum();
    const double support = report.confusion.row(c).sum();
    m.support = static_cast<std::size_t>(support);
    m.precision = predicted_c > 0 ? tp / predicted_c : 0.0;
    m.recall = support > 0 ? tp / support : 0.0;
    m.f1 = (m.precision + m.recall) > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
  }
  return report;
}

EvalReport evaluate(const TrainedModel& model, const FeatureMatrix& rows,
                    std::span<const SentimentLabel> truth) {
  std::vector<SentimentLabel> predicted;
  for (const auto& p : predict(model, rows)) predicted.push_back(p.label);
  return score_predictions(truth, predicted);
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "metric,negative,neutral,positive\n";
  auto row = [&](std::string_view name, auto getter) {
    out << name;
    for (const auto& m : per_class) out << ',' << getter(m);
    out << '\n';
  };
  row("precision", [](const ClassMetrics& m) { return m.precision; });
  row("recall", [](const ClassMetrics& m) { return m.recall; });
  row("f1", [](const ClassMetrics& m) { return m.f1; });
  row("support", [](const ClassMetrics& m) { return static_cast<double>(m.support); });
  for (Eigen::Index t = 0; t < 3; ++t) {
    out << "confusion_" << to_string(label_from_index(static_cast<std::size_t>(t)));
    for (Eigen::Index p = 0; p < 3; ++p) out << ',' << confusion(t, p);
    out << '\n';
  }
  out << "accuracy," << accuracy << ",,\n";
  return out.str();
}

}  // namespace emotesent
