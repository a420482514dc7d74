#pragma once

namespace cmml {

enum class LossKind { squared, absolute, huber, cross_entropy, hinge };

struct Loss {
  LossKind kind = LossKind::squared;
  double delta = 1.0;  // huber only, > 0

  static Loss huber(double delta);
};

// Pointwise loss. For cross_entropy `prediction` is a probability (clipped to
// [1e-12, 1 - 1e-12]) and `truth` is 0 or 1; for hinge `prediction` is a raw
// score and `truth` is -1 or +1.
double loss(const Loss& kind, double prediction, double truth);

// d loss / d prediction. Absolute and hinge use the subgradient 0 at their kinks.
double loss_derivative(const Loss& kind, double prediction, double truth);

constexpr double kProbabilityClip = 1e-12;
double clip_probability(double p);

}  // namespace cmml
