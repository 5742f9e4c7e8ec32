#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "cbctt/rng.hpp"

namespace cbctt {

using FeatureMatrix = std::vector<std::vector<double>>;
using Labels = std::vector<int>;  // 0/1

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // x[feature] < threshold
  int right = -1;  // x[feature] >= threshold
  int n_false = 0;
  int n_true = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  /// Positive-class fraction of the reached leaf.
  double predict(const std::vector<double>& x) const {
    int at = 0;
    while (nodes[at].feature >= 0) {
      at = x[nodes[at].feature] < nodes[at].threshold ? nodes[at].left : nodes[at].right;
    }
    const TreeNode& leaf = nodes[at];
    return static_cast<double>(leaf.n_true) / (leaf.n_true + leaf.n_false);
  }
};

/// Bagged CART classifier bank member: bootstrap per tree, Gini splits among
/// m_try randomly drawn features, grown until pure or below the minimum node
/// size. Bootstrap draws are reproducible from the stored per-tree seeds.
struct Forest {
  std::vector<Tree> trees;
  std::vector<std::uint64_t> tree_seeds;
  int n_features = 0;
  int m_try = 0;
  int min_node_size = 5;
  std::uint64_t seed = 0;

  double predict_proba(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_features) {
      throw std::invalid_argument("feature dimension mismatch");
    }
    if (trees.empty()) throw std::invalid_argument("empty forest");
    double sum = 0.0;
    for (const Tree& t : trees) sum += t.predict(x);
    return sum / static_cast<double>(trees.size());
  }
};

namespace detail {

inline std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = rng.index(n);
  return idx;
}

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child Gini
};

inline double gini(double n_true, double n_total) {
  if (n_total <= 0.0) return 0.0;
  const double p = n_true / n_total;
  return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, const Labels& y, int m_try, int min_node_size, Rng& rng)
      : x_(x), y_(y), m_try_(m_try), min_node_size_(min_node_size), rng_(rng),
        feature_pool_(x.empty() ? 0 : x.front().size()) {
    std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
  }

  Tree build(std::vector<std::size_t> samples) {
    Tree tree;
    grow(tree, std::move(samples));
    return tree;
  }

 private:
  int grow(Tree& tree, std::vector<std::size_t> samples) {
    int n_true = 0;
    for (std::size_t s : samples) n_true += y_[s];
    const int n = static_cast<int>(samples.size());
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[node_index].n_true = n_true;
    tree.nodes[node_index].n_false = n - n_true;

    if (n_true == 0 || n_true == n || n < min_node_size_) return node_index;

    const BestSplit split = find_split(samples, n_true);
    if (split.feature < 0) return node_index;

    std::vector<std::size_t> left, right;
    for (std::size_t s : samples) {
      (x_[s][split.feature] < split.threshold ? left : right).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[node_index].feature = split.feature;
    tree.nodes[node_index].threshold = split.threshold;
    const int left_index = grow(tree, std::move(left));
    tree.nodes[node_index].left = left_index;
    const int right_index = grow(tree, std::move(right));
    tree.nodes[node_index].right = right_index;
    return node_index;
  }

  BestSplit find_split(const std::vector<std::size_t>& samples, int n_true_total) {
    // Partial Fisher-Yates over the feature pool picks m_try candidates.
    const std::size_t d = feature_pool_.size();
    const std::size_t picks = std::min<std::size_t>(m_try_, d);
    for (std::size_t i = 0; i < picks; ++i) {
      std::swap(feature_pool_[i], feature_pool_[i + rng_.index(d - i)]);
    }

    // Best split by weighted child Gini; any valid threshold qualifies, so
    // trees grow to purity even through zero-gain regions (XOR-like data).
    BestSplit best;
    const double n = static_cast<double>(samples.size());
    best.impurity = std::numeric_limits<double>::infinity();

    std::vector<std::pair<double, int>> column(samples.size());
    for (std::size_t f = 0; f < picks; ++f) {
      const int feature = static_cast<int>(feature_pool_[f]);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        column[i] = {x_[samples[i]][feature], y_[samples[i]]};
      }
      std::sort(column.begin(), column.end());
      double left_n = 0.0, left_true = 0.0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left_n += 1.0;
        left_true += column[i].second;
        if (column[i].first == column[i + 1].first) continue;
        const double right_n = n - left_n;
        const double right_true = n_true_total - left_true;
        const double impurity =
            (left_n * gini(left_true, left_n) + right_n * gini(right_true, right_n)) / n;
        if (impurity < best.impurity - 1e-12) {
          best.impurity = impurity;
          best.feature = feature;
          best.threshold = 0.5 * (column[i].first + column[i + 1].first);
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  const Labels& y_;
  int m_try_;
  int min_node_size_;
  Rng& rng_;
  std::vector<std::size_t> feature_pool_;
};

}  // namespace detail

inline Forest train_forest(const FeatureMatrix& x, const Labels& y, int n_trees, int m_try,
                           std::uint64_t seed, int min_node_size = 5) {
  if (x.empty() || x.size() != y.size()) {
    throw std::invalid_argument("training data empty or rows/labels mismatched");
  }
  const std::size_t d = x.front().size();
  for (const auto& row : x) {
    if (row.size() != d) throw std::invalid_argument("ragged feature matrix");
  }
  if (n_trees < 1 || m_try < 1 || min_node_size < 1) {
    throw std::invalid_argument("n_trees, m_try and min_node_size must be >= 1");
  }

  Forest forest;
  forest.n_features = static_cast<int>(d);
  forest.m_try = m_try;
  forest.min_node_size = min_node_size;
  forest.seed = seed;
  forest.trees.reserve(n_trees);
  for (int t = 0; t < n_trees; ++t) {
    const std::uint64_t tree_seed = derive_seed(seed, t);
    forest.tree_seeds.push_back(tree_seed);
    Rng rng(tree_seed);
    std::vector<std::size_t> bag = detail::bootstrap_sample(x.size(), rng);
    detail::TreeBuilder builder(x, y, m_try, min_node_size, rng);
    forest.trees.push_back(builder.build(std::move(bag)));
  }
  return forest;
}

inline double predict_proba(const Forest& forest, const std::vector<double>& x) {
  return forest.predict_proba(x);
}

/// Out-of-bag accuracy: each point is scored only by trees whose bootstrap
/// missed it (bags are replayed from the stored seeds).
inline double oob_accuracy(const Forest& forest, const FeatureMatrix& x, const Labels& y) {
  if (x.size() != y.size()) throw std::invalid_argument("rows/labels mismatched");
  std::vector<double> vote_sum(x.size(), 0.0);
  std::vector<int> vote_count(x.size(), 0);
  std::vector<char> in_bag(x.size());
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    Rng rng(forest.tree_seeds[t]);
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (std::size_t draw : detail::bootstrap_sample(x.size(), rng)) in_bag[draw] = 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (in_bag[i]) continue;
      vote_sum[i] += forest.trees[t].predict(x[i]);
      ++vote_count[i];
    }
  }
  int scored = 0;
  int correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (vote_count[i] == 0) continue;
    ++scored;
    const int predicted = vote_sum[i] / vote_count[i] > 0.5 ? 1 : 0;
    if (predicted == y[i]) ++correct;
  }
  if (scored == 0) throw std::invalid_argument("no out-of-bag observations");
  return static_cast<double>(correct) / scored;
}

// ---------------------------------------------------------------------------
// Versioned JSON dump
// ---------------------------------------------------------------------------

inline constexpr int kForestFormatVersion = 1;

inline nlohmann::json forest_to_json(const Forest& forest) {
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : forest.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& node : tree.nodes) {
      nodes.push_back({node.feature, node.threshold, node.left, node.right, node.n_false,
                       node.n_true});
    }
    trees.push_back(std::move(nodes));
  }
  return {{"format_version", kForestFormatVersion},
          {"n_features", forest.n_features},
          {"m_try", forest.m_try},
          {"min_node_size", forest.min_node_size},
          {"seed", forest.seed},
          {"tree_seeds", forest.tree_seeds},
          {"trees", std::move(trees)}};
}

inline Forest forest_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kForestFormatVersion) {
    throw std::invalid_argument("unsupported forest format version");
  }
  Forest forest;
  forest.n_features = j.at("n_features").get<int>();
  forest.m_try = j.at("m_try").get<int>();
  forest.min_node_size = j.at("min_node_size").get<int>();
  forest.seed = j.at("seed").get<std::uint64_t>();
  forest.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
  for (const auto& tree_json : j.at("trees")) {
    Tree tree;
    for (const auto& node_json : tree_json) {
      TreeNode node;
      node.feature = node_json.at(0).get<int>();
      node.threshold = node_json.at(1).get<double>();
      node.left = node_json.at(2).get<int>();
      node.right = node_json.at(3).get<int>();
      node.n_false = node_json.at(4).get<int>();
      node.n_true = node_json.at(5).get<int>();
      tree.nodes.push_back(node);
    }
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace cbctt
