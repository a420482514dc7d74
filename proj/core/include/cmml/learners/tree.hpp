#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cmml/learners/matrix.hpp"

namespace cmml {

enum class Criterion { gini, entropy, squared };

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view text);

struct TreeParams {
  std::size_t max_depth = 5;         // 0 grows a single leaf
  std::size_t min_samples_leaf = 1;
  Criterion criterion = Criterion::gini;  // squared grows a regression tree
};

struct TreeNode {
  // Internal nodes: x[feature] <= threshold goes left.
  std::optional<std::size_t> feature;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  // Every node: weighted class totals (classification) and the leaf output,
  // the majority class or the weighted mean target.
  std::vector<double> class_weights;
  double value = 0.0;
  std::size_t samples = 0;

  bool is_leaf() const { return !feature.has_value(); }
  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(Criterion criterion, std::size_t n_features, std::size_t n_classes,
               std::vector<TreeNode> nodes);

  Criterion criterion() const noexcept { return criterion_; }
  bool is_classifier() const noexcept { return criterion_ != Criterion::squared; }
  std::size_t n_features() const noexcept { return n_features_; }
  std::size_t n_classes() const noexcept { return n_classes_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  std::size_t leaf_index(std::span<const double> x) const;
  double predict(std::span<const double> x) const;
  // Class distribution at the leaf (classifiers only).
  std::vector<double> predict_proba(std::span<const double> x) const;

  std::size_t depth() const;
  std::size_t leaf_count() const;

  // Overwrites a leaf's output; boosting uses this for Newton leaf values.
  void set_leaf_value(std::size_t node, double value);

  bool operator==(const DecisionTree&) const = default;

 private:
  Criterion criterion_ = Criterion::gini;
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  std::vector<TreeNode> nodes_;
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child impurity
};

// Best (feature, midpoint) split of `rows` by minimum weighted child impurity,
// ties resolved to the lowest feature then the lowest threshold. nullopt when
// no split leaves min_samples_leaf rows on both sides. Classification labels
// are class indices 0..K-1. Empty `weights` means unit weights.
std::optional<SplitCandidate> best_split(const Matrix& X, std::span<const double> y,
                                         std::span<const std::size_t> rows, Criterion criterion,
                                         std::size_t min_samples_leaf,
                                         std::span<const double> weights = {});

// Node impurity of `rows` under `criterion` (variance for squared).
double node_impurity(std::span<const double> y, std::span<const std::size_t> rows,
                     Criterion criterion, std::span<const double> weights = {});

DecisionTree fit_cart(const Matrix& X, std::span<const double> y, const TreeParams& params,
                      std::span<const double> weights = {});

}  // namespace cmml
