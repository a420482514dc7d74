#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cmml {

struct GDConfig {
  double step_size = 0.1;
  std::size_t max_iters = 1000;
  double tolerance = 1e-6;
  double l1_penalty = 0.0;
  double l2_penalty = 0.0;
  std::uint64_t seed = 0;  // full-batch updates draw nothing; kept for spec symmetry

  void validate() const;
};

// Smooth part of an objective. The penalty terms are added by gradient_descent.
struct Objective {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  // Coordinates subject to the penalty; empty means all of them.
  std::vector<bool> penalized;
};

struct GDResult {
  std::vector<double> weights;
  std::size_t iterations = 0;  // number of updates applied
  double objective = 0.0;      // penalised objective at `weights`
  bool converged = false;      // gradient norm fell below tolerance
};

double penalized_value(const Objective& f, std::span<const double> w, const GDConfig& cfg);
// Gradient of the penalised objective; the L1 term contributes sign(w) with sign(0) = 0.
void penalized_gradient(const Objective& f, std::span<const double> w, const GDConfig& cfg,
                        std::span<double> out);

// Full-batch descent w := w - η ∇L until ‖∇L‖₂ < tolerance or max_iters
// updates. Throws DivergenceError after 10 consecutive objective increases.
GDResult gradient_descent(const Objective& f, std::vector<double> init, const GDConfig& cfg);

}  // namespace cmml
