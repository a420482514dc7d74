#include "cmml/learners/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmml {

Loss Loss::huber(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("huber delta must be positive");
  return Loss{LossKind::huber, delta};
}

double clip_probability(double p) {
  return std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
}

double loss(const Loss& kind, double prediction, double truth) {
  const double r = prediction - truth;
  switch (kind.kind) {
    case LossKind::squared:
      return 0.5 * r * r;
    case LossKind::absolute:
      return std::abs(r);
    case LossKind::huber: {
      if (!(kind.delta > 0.0)) throw std::invalid_argument("huber delta must be positive");
      const double a = std::abs(r);
      return a <= kind.delta ? 0.5 * r * r : kind.delta * (a - 0.5 * kind.delta);
    }
    case LossKind::cross_entropy: {
      const double p = clip_probability(prediction);
      return -(truth * std::log(p) + (1.0 - truth) * std::log(1.0 - p));
    }
    case LossKind::hinge:
      return std::max(0.0, 1.0 - truth * prediction);
  }
  return 0.0;
}

double loss_derivative(const Loss& kind, double prediction, double truth) {
  const double r = prediction - truth;
  switch (kind.kind) {
    case LossKind::squared:
      return r;
    case LossKind::absolute:
      return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    case LossKind::huber:
      return std::abs(r) <= kind.delta ? r : kind.delta * (r > 0.0 ? 1.0 : -1.0);
    case LossKind::cross_entropy: {
      const double p = clip_probability(prediction);
      return -truth / p + (1.0 - truth) / (1.0 - p);
    }
    case LossKind::hinge:
      return truth * prediction < 1.0 ? -truth : 0.0;
  }
  return 0.0;
}

}  // namespace cmml
