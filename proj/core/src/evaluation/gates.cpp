#include "cmml/evaluation/gates.hpp"

#include <stdexcept>

#include "cmml/csv.hpp"
#include "cmml/error.hpp"

namespace cmml {

std::string_view to_string(Severity s) { return s == Severity::hard ? "hard" : "soft"; }

Severity parse_severity(std::string_view text) {
  if (text == "hard") return Severity::hard;
  if (text == "soft") return Severity::soft;
  throw std::invalid_argument("unknown gate severity '" + std::string(text) + "'");
}

void PerformanceGate::validate() const {
  const auto [lo, hi] = metric_range(metric);
  if (!(threshold >= lo && threshold <= hi)) {
    throw std::invalid_argument("gate threshold " + csv::format_number(threshold) + " is outside the range of '" +
                                metric + "'");
  }
}

std::string PerformanceGate::label() const {
  return metric + " " + std::string(constraints::symbol(comparator)) + " " + csv::format_number(threshold) + " (" +
         std::string(to_string(severity)) + ")";
}

std::vector<PerformanceGate> GateReport::violations() const {
  std::vector<PerformanceGate> out;
  for (const auto& o : outcomes) {
    if (!o.satisfied && o.gate.severity == Severity::hard) out.push_back(o.gate);
  }
  return out;
}

std::vector<PerformanceGate> GateReport::warnings() const {
  std::vector<PerformanceGate> out;
  for (const auto& o : outcomes) {
    if (!o.satisfied && o.gate.severity == Severity::soft) out.push_back(o.gate);
  }
  return out;
}

GateReport gate_check(const MetricSet& metrics, std::span<const PerformanceGate> gates) {
  GateReport report;
  for (const PerformanceGate& g : gates) {
    g.validate();
    GateOutcome o{g, metrics.get(g.metric), false};
    o.satisfied = o.observed && constraints::compare(*o.observed, g.comparator, g.threshold);
    if (!o.satisfied && g.severity == Severity::hard) report.passed = false;
    report.outcomes.push_back(std::move(o));
  }
  return report;
}

PerformanceGate gate_from_json(const nlohmann::json& j) {
  PerformanceGate g;
  g.metric = j.at("metric").get<std::string>();
  const std::string op = j.value("comparator", ">=");
  bool found = false;
  for (auto c : {constraints::CmpOp::gt, constraints::CmpOp::ge, constraints::CmpOp::lt, constraints::CmpOp::le,
                 constraints::CmpOp::eq, constraints::CmpOp::ne}) {
    if (constraints::symbol(c) == op) {
      g.comparator = c;
      found = true;
    }
  }
  if (!found) throw ConfigError("unknown gate comparator '" + op + "'");
  g.threshold = j.at("threshold").get<double>();
  try {
    g.severity = parse_severity(j.value("severity", "hard"));
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return g;
}

nlohmann::ordered_json to_json(const PerformanceGate& g) {
  return {{"metric", g.metric},
          {"comparator", constraints::symbol(g.comparator)},
          {"threshold", g.threshold},
          {"severity", to_string(g.severity)}};
}

nlohmann::ordered_json to_json(const GateReport& r) {
  nlohmann::ordered_json outcomes = nlohmann::ordered_json::array();
  for (const auto& o : r.outcomes) {
    nlohmann::ordered_json j = to_json(o.gate);
    j["observed"] = o.observed ? nlohmann::ordered_json(*o.observed) : nlohmann::ordered_json(nullptr);
    j["satisfied"] = o.satisfied;
    outcomes.push_back(std::move(j));
  }
  return {{"passed", r.passed}, {"outcomes", outcomes}};
}

}  // namespace cmml
