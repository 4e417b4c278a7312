#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "emotesent/features.hpp"
#include "emotesent/label.hpp"

namespace emotesent {

enum class Algorithm { NaiveBayes, MaxEnt, LinearSvm, RandomForest };
/// Short names used in tables and on the command line: NB, ME, SVM, RF.
std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view text);

/// Per-class values in kClassOrder (Negative, Neutral, Positive).
using ClassScores = Eigen::Vector3d;

struct NaiveBayesParams {
  double alpha = 1.0;  // Laplace smoothing
};

struct MaxEntParams {
  double l2 = 1e-4;
  double tolerance = 1e-6;  // stop when |loss delta| falls below this
  int max_epochs = 1000;
  /// Fixed gradient step; by default 1/L with L the smoothness bound of the
  /// regularized softmax loss on the training matrix.
  std::optional<double> step;
};

struct SvmParams {
  double c = 1.0;  // regularization lambda = 1 / (n * C)
  int epochs = 100;
};

struct ForestParams {
  int trees = 100;
  std::optional<int> features_per_split;  // default ceil(sqrt(#features))
  int min_leaf = 1;
  std::optional<int> max_depth;  // unlimited by default
  bool bootstrap = true;
  int threads = 0;  // 0 = process default
};

struct Hyperparams {
  NaiveBayesParams nb;
  MaxEntParams me;
  SvmParams svm;
  ForestParams rf;
};

/// Multinomial naive Bayes. Absent classes carry a -inf log prior.
struct NaiveBayesModel {
  Eigen::Vector3d log_prior;
  Eigen::MatrixXd log_likelihood;  // 3 x features
};

/// Multinomial logistic regression (softmax).
struct MaxEntModel {
  Eigen::MatrixXd weights;  // 3 x features
  Eigen::Vector3d bias = Eigen::Vector3d::Zero();
};

/// Three one-vs-rest linear SVMs; the bias is an augmented, regularized weight.
struct LinearSvmModel {
  Eigen::MatrixXd weights;  // 3 x features
  Eigen::Vector3d bias = Eigen::Vector3d::Zero();
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when value <= threshold
  int left = -1;
  int right = -1;
  double weight = 0.0;  // (bootstrap-weighted) samples reaching the node
  double positive = 0.0;  // weight of positive-class samples
  double impurity_decrease = 0.0;  // weight * gini - children's weighted gini

  bool is_leaf() const { return feature < 0; }
  double positive_fraction() const { return weight > 0 ? positive / weight : 0.0; }
};

/// Binary (class vs rest) CART tree; node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(const FeatureVector& x) const;
  int depth() const;
};

/// One binary forest per class; a head's score is the mean positive fraction
/// of the leaves the example lands in.
struct RandomForestModel {
  std::array<std::vector<DecisionTree>, kNumClasses> heads;
};

using ModelParams = std::variant<NaiveBayesModel, MaxEntModel, LinearSvmModel, RandomForestModel>;

struct TrainedModel {
  Algorithm algorithm = Algorithm::NaiveBayes;
  std::size_t n_features = 0;
  std::uint64_t seed = 0;
  std::string vocab_hash;  // empty when the model was trained on raw matrices
  ModelParams params;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& doc);
};

struct Prediction {
  SentimentLabel label = SentimentLabel::Neutral;
  ClassScores scores = ClassScores::Zero();
};

/// Throws TrainingError when fewer than two classes are present, when the
/// sizes disagree, or when the matrix is empty.
TrainedModel train(Algorithm algorithm, const FeatureMatrix& features,
                   std::span<const SentimentLabel> labels, const Hyperparams& hyper = {},
                   std::uint64_t seed = 0);

/// Scores: NB and ME posteriors, SVM margins, RF mean leaf positive fraction.
/// The label is the argmax with ties broken in class order.
Prediction predict(const TrainedModel& model, const FeatureVector& x);
std::vector<Prediction> predict(const TrainedModel& model, const FeatureMatrix& rows);

// Trainers and objectives, exposed for oracle tests.
NaiveBayesModel train_naive_bayes(const FeatureMatrix& features,
                                  std::span<const SentimentLabel> labels,
                                  const NaiveBayesParams& params);
ClassScores naive_bayes_posterior(const NaiveBayesModel& model, const FeatureVector& x);

/// Mean negative log-likelihood plus (l2/2)*||W||^2 (bias unregularized).
/// Writes the analytic gradient when the out-parameters are non-null.
double maxent_objective(const MaxEntModel& model, const FeatureMatrix& features,
                        std::span<const SentimentLabel> labels, double l2,
                        Eigen::MatrixXd* weight_grad = nullptr,
                        Eigen::Vector3d* bias_grad = nullptr);
MaxEntModel train_maxent(const FeatureMatrix& features, std::span<const SentimentLabel> labels,
                         const MaxEntParams& params);

LinearSvmModel train_linear_svm(const FeatureMatrix& features,
                                std::span<const SentimentLabel> labels, const SvmParams& params,
                                std::uint64_t seed);

/// Grows one class-vs-rest tree. `positive` marks each row's binary label.
DecisionTree grow_tree(const FeatureMatrix& features, std::span<const std::uint8_t> positive,
                       const ForestParams& params, std::uint64_t seed);

RandomForestModel train_random_forest(const FeatureMatrix& features,
                                      std::span<const SentimentLabel> labels,
                                      const ForestParams& params, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Importances

struct HeadImportance {
  SentimentLabel head = SentimentLabel::Neutral;
  Eigen::VectorXd importance;  // per feature, sums to 1 unless no tree split
  std::vector<std::size_t> ranking;  // features by importance desc, index asc
  std::map<std::string, double> by_group;
};

struct ImportanceReport {
  std::array<HeadImportance, kNumClasses> heads;
  std::vector<std::string> groups;  // group per feature
  std::map<std::string, double> mean_by_group;  // averaged over the heads
  std::map<std::string, double> feature_fraction_by_group;
};

/// Mean decrease in Gini impurity per one-vs-rest head: each tree's
/// decreases are normalized to sum 1, averaged over trees and renormalized.
/// `groups` (one name per feature, optional) drives the cumulative sums.
/// Throws UnsupportedError for non-RF models.
ImportanceReport gini_importances(const TrainedModel& model,
                                  std::span<const std::string> groups = {});

// ---------------------------------------------------------------------------
// Evaluation

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  std::size_t total = 0;
  double accuracy = 0.0;
  Eigen::Matrix3i confusion = Eigen::Matrix3i::Zero();  // rows truth, cols predicted
  std::array<ClassMetrics, kNumClasses> per_class;

  /// `metric,negative,neutral,positive` rows plus accuracy and the confusion matrix.
  std::string to_csv() const;
};

/// Throws EvaluationError on empty input or size mismatch.
EvalReport score_predictions(std::span<const SentimentLabel> truth,
                             std::span<const SentimentLabel> predicted);
EvalReport evaluate(const TrainedModel& model, const FeatureMatrix& rows,
                    std::span<const SentimentLabel> truth);

}  // namespace emotesent
