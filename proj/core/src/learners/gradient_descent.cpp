#include "cmml/learners/gradient_descent.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cmml/error.hpp"

namespace cmml {

void GDConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("step size must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (tolerance < 0.0) throw std::invalid_argument("tolerance must be non-negative");
  if (l1_penalty < 0.0 || l2_penalty < 0.0) {
    throw std::invalid_argument("penalties must be non-negative");
  }
  if (l1_penalty > 0.0 && l2_penalty > 0.0) {
    throw std::invalid_argument("choose lasso (l1) or ridge (l2), not both");
  }
}

namespace {

bool is_penalized(const Objective& f, std::size_t i) {
  return f.penalized.empty() || (i < f.penalized.size() && f.penalized[i]);
}

constexpr int kDivergencePatience = 10;

}  // namespace

double penalized_value(const Objective& f, std::span<const double> w, const GDConfig& cfg) {
  double v = f.value(w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!is_penalized(f, i)) continue;
    v += cfg.l1_penalty * std::abs(w[i]) + cfg.l2_penalty * w[i] * w[i];
  }
  return v;
}

void penalized_gradient(const Objective& f, std::span<const double> w, const GDConfig& cfg,
                        std::span<double> out) {
  f.gradient(w, out);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!is_penalized(f, i)) continue;
    const double sign = w[i] > 0.0 ? 1.0 : (w[i] < 0.0 ? -1.0 : 0.0);
    out[i] += cfg.l1_penalty * sign + 2.0 * cfg.l2_penalty * w[i];
  }
}

GDResult gradient_descent(const Objective& f, std::vector<double> init, const GDConfig& cfg) {
  cfg.validate();
  GDResult result;
  result.weights = std::move(init);
  std::vector<double> grad(result.weights.size());
  double current = penalized_value(f, result.weights, cfg);
  int rising = 0;

  while (true) {
    penalized_gradient(f, result.weights, cfg, grad);
    double norm_sq = 0.0;
    for (double g : grad) norm_sq += g * g;
    if (std::sqrt(norm_sq) < cfg.tolerance) {
      result.converged = true;
      break;
    }
    if (result.iterations >= cfg.max_iters) break;

    for (std::size_t i = 0; i < grad.size(); ++i) result.weights[i] -= cfg.step_size * grad[i];
    ++result.iterations;

    const double next = penalized_value(f, result.weights, cfg);
    if (!std::isfinite(next)) {
      throw DivergenceError("gradient descent produced a non-finite objective at iteration " +
                            std::to_string(result.iterations) + "; reduce the step size");
    }
    rising = next > current ? rising + 1 : 0;
    current = next;
    if (rising >= kDivergencePatience) {
      throw DivergenceError("objective increased for " + std::to_string(kDivergencePatience) +
                            " consecutive iterations; reduce the step size");
    }
  }
  result.objective = current;
  return result;
}

}  // namespace cmml
