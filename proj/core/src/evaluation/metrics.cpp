#include "cmml/evaluation/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cmml {

ConfusionMatrix confusion(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("label and prediction lengths differ");
  if (y_true.empty()) throw std::invalid_argument("confusion matrix needs at least one prediction");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double t = y_true[i];
    const double p = y_pred[i];
    if ((t != 0.0 && t != 1.0) || (p != 0.0 && p != 1.0)) {
      throw std::invalid_argument("confusion matrix labels must be 0 or 1");
    }
    if (t == 1.0) {
      ++(p == 1.0 ? cm.tp : cm.fn);
    } else {
      ++(p == 1.0 ? cm.fp : cm.tn);
    }
  }
  return cm;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

struct Field {
  const char* name;
  std::optional<double> MetricSet::*member;
};

constexpr Field kFields[] = {
    {"sensitivity", &MetricSet::sensitivity}, {"specificity", &MetricSet::specificity},
    {"precision", &MetricSet::precision},     {"recall", &MetricSet::recall},
    {"f1", &MetricSet::f1},                   {"accuracy", &MetricSet::accuracy},
    {"auc", &MetricSet::auc},                 {"r2", &MetricSet::r2},
    {"mse", &MetricSet::mse},                 {"mae", &MetricSet::mae},
};

std::optional<double> MetricSet::*member_of(std::string_view name) {
  for (const Field& f : kFields) {
    if (name == f.name) return f.member;
  }
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

}  // namespace

std::optional<double> MetricSet::get(std::string_view name) const { return this->*member_of(name); }

void MetricSet::set(std::string_view name, std::optional<double> value) { this->*member_of(name) = value; }

const std::vector<std::string>& MetricSet::names() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v;
    for (const Field& f : kFields) v.emplace_back(f.name);
    return v;
  }();
  return all;
}

std::pair<double, double> metric_range(std::string_view name) {
  (void)member_of(name);
  const double inf = std::numeric_limits<double>::infinity();
  if (name == "r2") return {-inf, 1.0};
  if (name == "mse" || name == "mae") return {0.0, inf};
  return {0.0, 1.0};
}

MetricSet classification_metrics(const ConfusionMatrix& cm) {
  MetricSet m;
  m.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  m.recall = m.sensitivity;
  m.specificity = ratio(cm.tn, cm.tn + cm.fp);
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

std::optional<double> auc(std::span<const double> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw std::invalid_argument("label and score lengths differ");
  const std::size_t n = y_true.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (y_true[order[t]] == 1.0) {
        rank_sum_pos += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

namespace {

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument(std::string(name) + " has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument(std::string(name) + " does not sum to 1");
}

constexpr double kMinProbability = 1e-12;

}  // namespace

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

CrossEntropy cross_entropy_kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in dimension");
  check_distribution(p, "p");
  check_distribution(q, "q");
  CrossEntropy out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    const double lq = std::log(std::max(q[i], kMinProbability));
    out.h_pq -= p[i] * lq;
    out.kl += p[i] * (std::log(p[i]) - lq);
  }
  return out;
}

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("label and prediction lengths differ");
  if (a.empty()) throw std::invalid_argument("metric needs at least one prediction");
}

}  // namespace

double r2(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred);
  if (y_true.size() < 2) throw std::invalid_argument("r2 needs at least two rows");
  const double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) / static_cast<double>(y_true.size());
  double ssr = 0.0;
  double sst = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ssr += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    sst += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (sst == 0.0) throw std::invalid_argument("r2 is undefined for a constant target");
  return 1.0 - ssr / sst;
}

double mse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred);
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) s += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
  return s / static_cast<double>(y_true.size());
}

double mae(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred);
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) s += std::abs(y_true[i] - y_pred[i]);
  return s / static_cast<double>(y_true.size());
}

MetricSet regression_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
  MetricSet m;
  m.mse = mse(y_true, y_pred);
  m.mae = mae(y_true, y_pred);
  const bool constant = std::adjacent_find(y_true.begin(), y_true.end(), std::not_equal_to<>()) == y_true.end();
  if (y_true.size() >= 2 && !constant) m.r2 = r2(y_true, y_pred);
  return m;
}

nlohmann::ordered_json to_json(const MetricSet& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const Field& f : kFields) {
    const auto& v = m.*(f.member);
    j[f.name] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  }
  return j;
}

MetricSet metric_set_from_json(const nlohmann::json& j) {
  MetricSet m;
  for (const auto& [key, value] : j.items()) {
    m.set(key, value.is_null() ? std::nullopt : std::optional<double>(value.get<double>()));
  }
  return m;
}

}  // namespace cmml
