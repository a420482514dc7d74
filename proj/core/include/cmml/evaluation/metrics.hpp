#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace cmml {

// Class 1 is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Labels must be 0 or 1.
ConfusionMatrix confusion(std::span<const double> y_true, std::span<const double> y_pred);

// Every metric is nullopt when its denominator is zero or it does not apply.
struct MetricSet {
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> accuracy;
  std::optional<double> auc;
  std::optional<double> r2;
  std::optional<double> mse;
  std::optional<double> mae;

  // Metric by name; throws std::invalid_argument for an unknown name.
  std::optional<double> get(std::string_view name) const;
  void set(std::string_view name, std::optional<double> value);
  static const std::vector<std::string>& names();
  bool operator==(const MetricSet&) const = default;
};

// Inclusive range a metric can take, used to validate thresholds.
std::pair<double, double> metric_range(std::string_view name);

MetricSet classification_metrics(const ConfusionMatrix& cm);

// Rank statistic with average ranks for tied scores; nullopt when either
// class is absent.
std::optional<double> auc(std::span<const double> y_true, std::span<const double> scores);

struct CrossEntropy {
  double h_pq = 0.0;  // −Σ p ln q
  double kl = 0.0;    // Σ p ln(p/q), 0 ln 0 ≡ 0
};

// p and q must have equal length and each sum to 1 within 1e-9; q is clipped
// to at least 1e-12 before taking logarithms.
CrossEntropy cross_entropy_kl(std::span<const double> p, std::span<const double> q);
double shannon_entropy(std::span<const double> p);

// 1 − Σ(y−ŷ)² / Σ(y−ȳ)². Throws std::invalid_argument for n < 2 or constant y.
double r2(std::span<const double> y_true, std::span<const double> y_pred);
double mse(std::span<const double> y_true, std::span<const double> y_pred);
double mae(std::span<const double> y_true, std::span<const double> y_pred);

MetricSet regression_metrics(std::span<const double> y_true, std::span<const double> y_pred);

nlohmann::ordered_json to_json(const MetricSet& m);  // undefined metrics as null
MetricSet metric_set_from_json(const nlohmann::json& j);

}  // namespace cmml
