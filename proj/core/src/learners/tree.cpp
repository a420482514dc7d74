#include "cmml/learners/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cmml/error.hpp"

namespace cmml {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::gini: return "gini";
    case Criterion::entropy: return "entropy";
    case Criterion::squared: return "squared";
  }
  return "gini";
}

Criterion parse_criterion(std::string_view text) {
  if (text == "gini") return Criterion::gini;
  if (text == "entropy") return Criterion::entropy;
  if (text == "squared") return Criterion::squared;
  throw std::invalid_argument("unknown split criterion '" + std::string(text) + "'");
}

namespace {

// Candidates must beat the incumbent by more than this to replace it, so
// rounding noise cannot override the lowest-feature, lowest-threshold order.
constexpr double kTieTolerance = 1e-12;

double weight_of(std::span<const double> weights, std::size_t row) {
  return weights.empty() ? 1.0 : weights[row];
}

double class_impurity(const std::vector<double>& counts, double total, Criterion c) {
  if (!(total > 0.0)) return 0.0;
  double acc = 0.0;
  if (c == Criterion::gini) {
    for (double n : counts) {
      const double p = n / total;
      acc += p * p;
    }
    return 1.0 - acc;
  }
  for (double n : counts) {
    if (n > 0.0) {
      const double p = n / total;
      acc -= p * std::log(p);
    }
  }
  return acc;
}

double variance(double sw, double swy, double swy2) {
  if (!(sw > 0.0)) return 0.0;
  const double mean = swy / sw;
  return std::max(0.0, swy2 / sw - mean * mean);
}

std::size_t class_count(std::span<const double> y, std::span<const std::size_t> rows) {
  std::size_t k = 0;
  for (std::size_t r : rows) {
    const double v = y[r];
    if (v < 0.0 || v != std::floor(v)) {
      throw std::invalid_argument("classification labels must be non-negative integers");
    }
    k = std::max(k, static_cast<std::size_t>(v) + 1);
  }
  return k;
}

}  // namespace

double node_impurity(std::span<const double> y, std::span<const std::size_t> rows, Criterion criterion,
                     std::span<const double> weights) {
  if (criterion == Criterion::squared) {
    double sw = 0, swy = 0, swy2 = 0;
    for (std::size_t r : rows) {
      const double w = weight_of(weights, r);
      sw += w;
      swy += w * y[r];
      swy2 += w * y[r] * y[r];
    }
    return variance(sw, swy, swy2);
  }
  std::vector<double> counts(class_count(y, rows), 0.0);
  double total = 0.0;
  for (std::size_t r : rows) {
    const double w = weight_of(weights, r);
    counts[static_cast<std::size_t>(y[r])] += w;
    total += w;
  }
  return class_impurity(counts, total, criterion);
}

std::optional<SplitCandidate> best_split(const Matrix& X, std::span<const double> y,
                                         std::span<const std::size_t> rows, Criterion criterion,
                                         std::size_t min_samples_leaf, std::span<const double> weights) {
  const std::size_t m = rows.size();
  const std::size_t min_leaf = std::max<std::size_t>(1, min_samples_leaf);
  if (m < 2 * min_leaf) return std::nullopt;
  const bool regression = criterion == Criterion::squared;
  const std::size_t k = regression ? 0 : class_count(y, rows);

  std::vector<double> total_counts(k, 0.0);
  double total_w = 0, total_wy = 0, total_wy2 = 0;
  for (std::size_t r : rows) {
    const double w = weight_of(weights, r);
    total_w += w;
    if (regression) {
      total_wy += w * y[r];
      total_wy2 += w * y[r] * y[r];
    } else {
      total_counts[static_cast<std::size_t>(y[r])] += w;
    }
  }
  if (!(total_w > 0.0)) return std::nullopt;

  std::optional<SplitCandidate> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::vector<double> left_counts(k);
  std::vector<double> right_counts(k);

  for (std::size_t f = 0; f < X.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
    std::fill(left_counts.begin(), left_counts.end(), 0.0);
    double lw = 0, lwy = 0, lwy2 = 0;

    for (std::size_t i = 0; i + 1 < m; ++i) {
      const std::size_t r = order[i];
      const double w = weight_of(weights, r);
      lw += w;
      if (regression) {
        lwy += w * y[r];
        lwy2 += w * y[r] * y[r];
      } else {
        left_counts[static_cast<std::size_t>(y[r])] += w;
      }
      const double a = X(r, f);
      const double b = X(order[i + 1], f);
      if (a == b) continue;
      if (i + 1 < min_leaf || m - i - 1 < min_leaf) continue;

      const double rw = total_w - lw;
      double impurity;
      if (regression) {
        impurity = (lw * variance(lw, lwy, lwy2) +
                    rw * variance(rw, total_wy - lwy, total_wy2 - lwy2)) / total_w;
      } else {
        for (std::size_t c = 0; c < k; ++c) right_counts[c] = total_counts[c] - left_counts[c];
        impurity = (lw * class_impurity(left_counts, lw, criterion) +
                    rw * class_impurity(right_counts, rw, criterion)) / total_w;
      }
      if (!best || impurity < best->impurity - kTieTolerance) {
        double t = a + (b - a) / 2.0;
        if (!(t >= a && t < b)) t = a;
        best = SplitCandidate{f, t, impurity};
      }
    }
  }
  return best;
}

DecisionTree::DecisionTree(Criterion criterion, std::size_t n_features, std::size_t n_classes,
                           std::vector<TreeNode> nodes)
    : criterion_(criterion), n_features_(n_features), n_classes_(n_classes), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("a tree needs at least one node");
}

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
  if (x.size() != n_features_) throw std::invalid_argument("feature count mismatch");
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    i = x[*nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  }
  return i;
}

double DecisionTree::predict(std::span<const double> x) const { return nodes_[leaf_index(x)].value; }

std::vector<double> DecisionTree::predict_proba(std::span<const double> x) const {
  if (!is_classifier()) throw std::logic_error("regression trees have no class distribution");
  std::vector<double> p = nodes_[leaf_index(x)].class_weights;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v = total > 0.0 ? v / total : 0.0;
  return p;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

void DecisionTree::set_leaf_value(std::size_t node, double value) {
  if (node >= nodes_.size() || !nodes_[node].is_leaf()) {
    throw std::invalid_argument("set_leaf_value needs a leaf index");
  }
  nodes_[node].value = value;
}

namespace {

struct Builder {
  const Matrix& X;
  std::span<const double> y;
  std::span<const double> weights;
  const TreeParams& params;
  std::size_t n_classes;
  std::vector<TreeNode> nodes;

  TreeNode summarize(const std::vector<std::size_t>& rows) const {
    TreeNode node;
    node.samples = rows.size();
    if (params.criterion == Criterion::squared) {
      double sw = 0, swy = 0;
      for (std::size_t r : rows) {
        sw += weight_of(weights, r);
        swy += weight_of(weights, r) * y[r];
      }
      node.value = sw > 0.0 ? swy / sw : 0.0;
    } else {
      node.class_weights.assign(n_classes, 0.0);
      for (std::size_t r : rows) {
        node.class_weights[static_cast<std::size_t>(y[r])] += weight_of(weights, r);
      }
      // max_element returns the first maximum, so ties go to the lowest class.
      node.value = static_cast<double>(
          std::max_element(node.class_weights.begin(), node.class_weights.end()) -
          node.class_weights.begin());
    }
    return node;
  }

  std::size_t grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    const std::size_t id = nodes.size();
    nodes.push_back(summarize(rows));
    if (depth >= params.max_depth) return id;
    if (node_impurity(y, rows, params.criterion, weights) <= 0.0) return id;
    const auto split = best_split(X, y, rows, params.criterion, params.min_samples_leaf, weights);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (X(r, split->feature) <= split->threshold ? left : right).push_back(r);
    }
    nodes[id].feature = split->feature;
    nodes[id].threshold = split->threshold;
    const std::size_t l = grow(left, depth + 1);
    nodes[id].left = l;
    const std::size_t r = grow(right, depth + 1);
    nodes[id].right = r;
    return id;
  }
};

}  // namespace

DecisionTree fit_cart(const Matrix& X, std::span<const double> y, const TreeParams& params,
                      std::span<const double> weights) {
  if (X.rows() == 0) throw Error("cannot grow a tree on an empty training set");
  if (y.size() != X.rows()) throw std::invalid_argument("target length differs from row count");
  if (!weights.empty()) {
    if (weights.size() != X.rows()) throw std::invalid_argument("weight length differs from row count");
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("sample weights must be finite and >= 0");
    }
  }
  const std::vector<std::size_t> all = [&] {
    std::vector<std::size_t> v(X.rows());
    std::iota(v.begin(), v.end(), 0);
    return v;
  }();
  const std::size_t k = params.criterion == Criterion::squared ? 0 : class_count(y, all);
  Builder b{X, y, weights, params, k, {}};
  b.grow(all, 0);
  return DecisionTree(params.criterion, X.cols(), k, std::move(b.nodes));
}

}  // namespace cmml
