#include "cmml/constraints/scorecard.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace cmml::constraints {

std::string_view symbol(Grade g) {
  switch (g) {
    case Grade::very_good: return "++";
    case Grade::good: return "+";
    case Grade::neutral: return "0";
    case Grade::poor: return "-";
    case Grade::very_poor: return "--";
  }
  return "0";
}

Grade parse_grade(std::string_view text) {
  if (text == "++") return Grade::very_good;
  if (text == "+") return Grade::good;
  if (text == "0") return Grade::neutral;
  if (text == "-" || text == "−") return Grade::poor;
  if (text == "--" || text == "−−") return Grade::very_poor;
  throw std::invalid_argument("unknown quality grade '" + std::string(text) + "'");
}

std::string_view to_string(Provenance p) {
  return p == Provenance::computed ? "computed" : "declared";
}

std::string_view to_string(QualityDimension d) {
  switch (d) {
    case QualityDimension::accuracy: return "Accuracy";
    case QualityDimension::relevancy: return "Relevancy";
    case QualityDimension::representation: return "Representation";
    case QualityDimension::accessibility: return "Accessibility";
  }
  return "Accuracy";
}

const std::vector<Criterion>& quality_criteria() {
  using D = QualityDimension;
  static const std::vector<Criterion> criteria = {
      {D::accuracy, "Believability"},
      {D::accuracy, "Accuracy"},
      {D::accuracy, "Objectivity"},
      {D::accuracy, kCompleteness},
      {D::accuracy, "Traceability"},
      {D::accuracy, "Reputation"},
      {D::accuracy, "Variety"},
      {D::relevancy, "Value-added"},
      {D::relevancy, "Relevancy"},
      {D::relevancy, "Timeliness"},
      {D::relevancy, "Ease of operation"},
      {D::relevancy, "Appropriate amount of data"},
      {D::relevancy, "Flexibility"},
      {D::representation, "Interpretability"},
      {D::representation, "Ease of understanding"},
      {D::representation, kConsistency},
      {D::representation, "Conciseness"},
      {D::accessibility, "Accessibility"},
      {D::accessibility, "Cost-effectiveness"},
      {D::accessibility, "Access security"},
  };
  return criteria;
}

const ScoreCell* QualityScorecard::cell(std::string_view feature, std::string_view criterion) const {
  auto f = cells.find(std::string(feature));
  if (f == cells.end()) return nullptr;
  auto c = f->second.find(std::string(criterion));
  return c == f->second.end() ? nullptr : &c->second;
}

Grade completeness_grade(double missing_fraction) {
  if (missing_fraction <= 0.0) return Grade::very_good;
  if (missing_fraction <= 0.05) return Grade::good;
  if (missing_fraction <= 0.30) return Grade::poor;
  return Grade::very_poor;
}

Grade consistency_grade(double pass_rate) {
  if (pass_rate >= 1.0) return Grade::very_good;
  if (pass_rate >= 0.75) return Grade::good;
  if (pass_rate >= 0.5) return Grade::neutral;
  if (pass_rate >= 0.25) return Grade::poor;
  return Grade::very_poor;
}

namespace {

std::string percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

bool known_criterion(std::string_view name) {
  const auto& all = quality_criteria();
  return std::any_of(all.begin(), all.end(), [&](const Criterion& c) { return c.name == name; });
}

}  // namespace

QualityScorecard quality_scorecard(const Dataset& d, const ViolationReport& report,
                                   const DeclaredGrid& declared) {
  QualityScorecard card;
  for (const auto& meta : d.features()) {
    if (meta.role == FeatureRole::input) card.features.push_back(meta.name);
  }
  for (const auto& [feature, row] : declared) {
    if (std::find(card.features.begin(), card.features.end(), feature) == card.features.end()) {
      if (!d.contains(feature)) {
        throw std::invalid_argument("declared quality grades for unknown feature '" + feature +
                                    "'");
      }
      card.features.push_back(feature);
    }
    for (const auto& [criterion, _] : row) {
      if (!known_criterion(criterion)) {
        throw std::invalid_argument("unknown quality criterion '" + criterion + "'");
      }
    }
  }

  for (const auto& [feature, row] : declared) {
    for (const auto& [criterion, grade] : row) {
      card.cells[feature][criterion] = ScoreCell{grade, Provenance::declared, std::nullopt, ""};
    }
  }

  auto put_computed = [&](const std::string& feature, std::string_view criterion, Grade grade,
                          std::string basis) {
    ScoreCell cell{grade, Provenance::computed, std::nullopt, std::move(basis)};
    auto& slot = card.cells[feature];
    if (auto it = slot.find(std::string(criterion)); it != slot.end() && it->second.grade != grade) {
      cell.declared = it->second.grade;
    }
    slot[std::string(criterion)] = std::move(cell);
  };

  const DescriptiveStats stats = descriptive_stats(d);
  for (const std::string& feature : card.features) {
    const double missing = stats.at(feature).missing_fraction;
    put_computed(feature, kCompleteness, completeness_grade(missing),
                 "missing " + percent(missing));

    std::size_t passed = 0, judged = 0;
    for (const auto& r : report.results) {
      if (r.kind != StatementKind::range && r.kind != StatementKind::rule) continue;
      if (std::find(r.features.begin(), r.features.end(), feature) == r.features.end()) continue;
      if (r.status == Status::vacuous) continue;
      ++judged;
      if (r.status == Status::pass) ++passed;
    }
    if (judged > 0) {
      const double rate = static_cast<double>(passed) / static_cast<double>(judged);
      put_computed(feature, kConsistency, consistency_grade(rate),
                   std::to_string(passed) + "/" + std::to_string(judged) + " statements pass");
    }
  }
  return card;
}

}  // namespace cmml::constraints
