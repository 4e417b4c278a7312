#include <algorithm>
#include <cmath>
#include <numeric>

#include "emotesent/classify.hpp"
#include "emotesent/error.hpp"
#include "emotesent/parallel.hpp"
#include "emotesent/random.hpp"

namespace emotesent {

const TreeNode& DecisionTree::leaf_for(const FeatureVector& x) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const auto& n = nodes[at];
    const double v = n.feature < x.size() ? x.coeff(n.feature) : 0.0;
    at = static_cast<std::size_t>(v <= n.threshold ? n.left : n.right);
  }
  return nodes[at];
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [at, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& n = nodes[static_cast<std::size_t>(at)];
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

namespace {

double gini(double weight, double positive) {
  if (weight <= 0) return 0.0;
  const double p = positive / weight;
  return 2.0 * p * (1.0 - p);
}

struct Cell {
  int feature;
  double value;
  std::size_t row;
};

struct Entry {
  double value;
  double weight;
  double positive;
};

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  double decrease = -1.0;
};

class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& rows, std::span<const std::uint8_t> positive,
             const ForestParams& params, std::uint64_t seed)
      : rows_(rows), positive_(positive), params_(params), rng_(seed) {
    const auto width = static_cast<int>(rows.cols());
    mtry_ = params.features_per_split
                ? std::clamp(*params.features_per_split, 1, std::max(1, width))
                : std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(width)))));
    value_.assign(positive.size(), 0.0);
  }

  DecisionTree grow() {
    const auto n = positive_.size();
    weight_.assign(n, 0.0);
    if (params_.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) weight_[rng_.uniform_index(n)] += 1.0;
    } else {
      std::fill(weight_.begin(), weight_.end(), 1.0);
    }
    std::vector<std::size_t> samples;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight_[i] > 0) samples.push_back(i);
    }

    struct Pending {
      int node;
      std::size_t begin, end;
      int depth;
    };
    DecisionTree tree;
    tree.nodes.emplace_back();
    std::vector<Pending> stack{{0, 0, samples.size(), 0}};
    while (!stack.empty()) {
      const Pending job = stack.back();
      stack.pop_back();
      const std::span<std::size_t> here(samples.data() + job.begin, job.end - job.begin);
      double w = 0.0, pos = 0.0;
      for (const auto row : here) {
        w += weight_[row];
        if (positive_[row]) pos += weight_[row];
      }
      tree.nodes[static_cast<std::size_t>(job.node)].weight = w;
      tree.nodes[static_cast<std::size_t>(job.node)].positive = pos;

      const bool pure = pos <= 0.0 || pos >= w;
      const bool depth_cap = params_.max_depth && job.depth >= *params_.max_depth;
      const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf));
      if (pure || depth_cap || here.size() < 2 * min_leaf) continue;

      const Candidate best = find_split(here, w, pos);
      if (best.feature < 0) continue;

      for (const auto row : here) value_[row] = rows_.coeff(static_cast<Eigen::Index>(row), best.feature);
      const auto mid = std::stable_partition(here.begin(), here.end(), [&](std::size_t row) {
        return value_[row] <= best.threshold;
      });
      const auto split = job.begin + static_cast<std::size_t>(mid - here.begin());

      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(job.node)];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      node.impurity_decrease = best.decrease;
      stack.push_back({left + 1, split, job.end, job.depth + 1});
      stack.push_back({left, job.begin, split, job.depth + 1});
    }
    return tree;
  }

 private:
  // Features are drawn without replacement until `mtry` non-constant ones
  // have been scored or the pool runs out. A feature with no nonzero in the
  // node is constant, so the pool is the node's present features.
  Candidate find_split(std::span<const std::size_t> here, double w, double pos) {
    cells_.clear();
    for (const auto row : here) {
      for (FeatureMatrix::InnerIterator it(rows_, static_cast<Eigen::Index>(row)); it; ++it) {
        if (it.value() != 0.0) cells_.push_back({static_cast<int>(it.col()), it.value(), row});
      }
    }
    std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
      return a.feature != b.feature ? a.feature < b.feature : a.value < b.value;
    });
    ranges_.clear();
    for (std::size_t k = 0; k < cells_.size();) {
      std::size_t e = k;
      while (e < cells_.size() && cells_[e].feature == cells_[k].feature) ++e;
      ranges_.emplace_back(k, e);
      k = e;
    }

    const double parent = w * gini(w, pos);
    const std::size_t count = here.size();
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf));
    Candidate best;
    int scored = 0;
    const auto pool = ranges_.size();
    for (std::size_t j = 0; j < pool && scored < mtry_; ++j) {
      const auto r = j + static_cast<std::size_t>(rng_.uniform_index(pool - j));
      std::swap(ranges_[j], ranges_[r]);
      const auto [begin, end] = ranges_[j];
      const int f = cells_[begin].feature;

      // Group equal values; the implicit zeros form one group, placed by order.
      entries_.clear();
      counts_.clear();
      double nz_w = 0.0, nz_pos = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const auto row = cells_[k].row;
        const double p = positive_[row] ? weight_[row] : 0.0;
        nz_w += weight_[row];
        nz_pos += p;
        if (!entries_.empty() && entries_.back().value == cells_[k].value) {
          entries_.back().weight += weight_[row];
          entries_.back().positive += p;
          ++counts_.back();
        } else {
          entries_.push_back({cells_[k].value, weight_[row], p});
          counts_.push_back(1);
        }
      }
      const std::size_t zeros = count - (end - begin);
      if (zeros > 0) {
        const auto at = std::lower_bound(entries_.begin(), entries_.end(), 0.0,
                                         [](const Entry& e, double v) { return e.value < v; });
        const auto offset = at - entries_.begin();
        entries_.insert(at, {0.0, w - nz_w, pos - nz_pos});
        counts_.insert(counts_.begin() + offset, zeros);
      }
      if (entries_.size() < 2) continue;
      ++scored;

      double left_w = 0.0, left_pos = 0.0;
      std::size_t left_count = 0;
      for (std::size_t k = 0; k + 1 < entries_.size(); ++k) {
        left_w += entries_[k].weight;
        left_pos += entries_[k].positive;
        left_count += counts_[k];
        if (left_count < min_leaf || count - left_count < min_leaf) continue;
        const double right_w = w - left_w;
        const double right_pos = pos - left_pos;
        const double decrease =
            parent - left_w * gini(left_w, left_pos) - right_w * gini(right_w, right_pos);
        if (decrease > best.decrease) {
          best.feature = f;
          best.decrease = decrease;
          best.threshold = entries_[k].value + (entries_[k + 1].value - entries_[k].value) / 2.0;
        }
      }
    }
    if (best.feature >= 0) best.decrease = std::max(0.0, best.decrease);
    return best;
  }

  const FeatureMatrix& rows_;
  std::span<const std::uint8_t> positive_;
  const ForestParams& params_;
  Rng rng_;
  int mtry_ = 1;
  std::vector<double> weight_;
  std::vector<double> value_;
  std::vector<Cell> cells_;
  std::vector<std::pair<std::size_t, std::size_t>> ranges_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> counts_;
};

}  // namespace

DecisionTree grow_tree(const FeatureMatrix& features, std::span<const std::uint8_t> positive,
                       const ForestParams& params, std::uint64_t seed) {
  if (static_cast<std::size_t>(features.rows()) != positive.size()) {
    throw TrainingError("feature rows and labels differ in length");
  }
  return TreeGrower(features, positive, params, seed).grow();
}

RandomForestModel train_random_forest(const FeatureMatrix& features,
                                      std::span<const SentimentLabel> labels,
                                      const ForestParams& params, std::uint64_t seed) {
  if (params.trees < 1) throw ConfigError("forest needs at least one tree");
  std::array<std::vector<std::uint8_t>, kNumClasses> targets;
  for (std::size_t h = 0; h < kNumClasses; ++h) {
    targets[h].resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      targets[h][i] = class_index(labels[i]) == h ? 1 : 0;
    }
  }
  const auto trees = static_cast<std::size_t>(params.trees);
  RandomForestModel forest;
  for (auto& head : forest.heads) head.resize(trees);
  parallel_for(kNumClasses * trees, params.threads, [&](std::size_t job) {
    const std::size_t h = job / trees;
    const std::size_t t = job % trees;
    forest.heads[h][t] = TreeGrower(features, targets[h], params, derive_seed(seed, job)).grow();
  });
  return forest;
}

ImportanceReport gini_importances(const TrainedModel& model, std::span<const std::string> groups) {
  const auto* forest = std::get_if<RandomForestModel>(&model.params);
  if (!forest) {
    throw UnsupportedError("feature importances require a random forest model, got " +
                           std::string(to_string(model.algorithm)));
  }
  if (!groups.empty() && groups.size() != model.n_features) {
    throw ConfigError("feature group list does not match the model width");
  }
  const auto width = static_cast<Eigen::Index>(model.n_features);
  ImportanceReport report;
  report.groups.assign(groups.begin(), groups.end());
  for (std::size_t h = 0; h < kNumClasses; ++h) {
    auto& head = report.heads[h];
    head.head = label_from_index(h);
    head.importance = Eigen::VectorXd::Zero(width);
    Eigen::VectorXd per_tree(width);
    for (const auto& tree : forest->heads[h]) {
      per_tree.setZero();
      for (const auto& n : tree.nodes) {
        if (!n.is_leaf()) per_tree[n.feature] += n.impurity_decrease;
      }
      const double s = per_tree.sum();
      if (s > 0) head.importance += per_tree / s;
    }
    const double total = head.importance.sum();
    if (total > 0) head.importance /= total;

    head.ranking.resize(model.n_features);
    std::iota(head.ranking.begin(), head.ranking.end(), std::size_t{0});
    std::stable_sort(head.ranking.begin(), head.ranking.end(), [&](std::size_t a, std::size_t b) {
      return head.importance[static_cast<Eigen::Index>(a)] >
             head.importance[static_cast<Eigen::Index>(b)];
    });
    for (std::size_t f = 0; f < groups.size(); ++f) {
      head.by_group[groups[f]] += head.importance[static_cast<Eigen::Index>(f)];
    }
  }
  for (std::size_t f = 0; f < groups.size(); ++f) {
    report.feature_fraction_by_group[groups[f]] += 1.0 / static_cast<double>(groups.size());
  }
  for (const auto& [name, _] : report.feature_fraction_by_group) {
    double sum = 0.0;
    for (const auto& head : report.heads) {
      const auto it = head.by_group.find(name);
      if (it != head.by_group.end()) sum += it->second;
    }
    report.mean_by_group[name] = sum / static_cast<double>(kNumClasses);
  }
  return report;
}

}  // namespace emotesent
