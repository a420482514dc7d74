#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmml/constraints/ast.hpp"
#include "cmml/evaluation/metrics.hpp"

namespace cmml {

enum class Severity { hard, soft };

std::string_view to_string(Severity s);
Severity parse_severity(std::string_view text);

// A metric requirement such as "sensitivity >= 0.78". The threshold must lie
// in the metric's valid range.
struct PerformanceGate {
  std::string metric;
  constraints::CmpOp comparator = constraints::CmpOp::ge;
  double threshold = 0.0;
  Severity severity = Severity::hard;

  void validate() const;
  std::string label() const;  // "sensitivity >= 0.78 (hard)"
  bool operator==(const PerformanceGate&) const = default;
};

struct GateOutcome {
  PerformanceGate gate;
  std::optional<double> observed;
  bool satisfied = false;  // undefined metrics never satisfy a gate
};

struct GateReport {
  bool passed = true;  // false iff a hard gate is unsatisfied
  std::vector<GateOutcome> outcomes;

  std::vector<PerformanceGate> violations() const;  // unsatisfied hard gates
  std::vector<PerformanceGate> warnings() const;    // unsatisfied soft gates
};

GateReport gate_check(const MetricSet& metrics, std::span<const PerformanceGate> gates);

PerformanceGate gate_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const PerformanceGate& g);
nlohmann::ordered_json to_json(const GateReport& r);

}  // namespace cmml
