#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmml/constraints/evaluator.hpp"
#include "cmml/tabular.hpp"

namespace cmml::constraints {

// ++ / + / 0 / - / --
enum class Grade { very_good, good, neutral, poor, very_poor };

std::string_view symbol(Grade g);
// Accepts ASCII and Unicode minus forms ("−", "−−").
Grade parse_grade(std::string_view text);

enum class Provenance { computed, declared };
std::string_view to_string(Provenance p);

enum class QualityDimension { accuracy, relevancy, representation, accessibility };
std::string_view to_string(QualityDimension d);

struct Criterion {
  QualityDimension dimension;
  std::string_view name;
};

// Criteria in their fixed row order, grouped by dimension.
const std::vector<Criterion>& quality_criteria();
inline constexpr std::string_view kCompleteness = "Completeness";
inline constexpr std::string_view kConsistency = "Consistency";

struct ScoreCell {
  Grade grade = Grade::neutral;
  Provenance provenance = Provenance::declared;
  // Set when a computed grade overrides a different declared one.
  std::optional<Grade> declared;
  std::string basis;
};

// feature → criterion → grade
using DeclaredGrid = std::map<std::string, std::map<std::string, Grade>>;

struct QualityScorecard {
  std::vector<std::string> features;
  std::map<std::string, std::map<std::string, ScoreCell>> cells;

  const ScoreCell* cell(std::string_view feature, std::string_view criterion) const;
};

Grade completeness_grade(double missing_fraction);
Grade consistency_grade(double pass_rate);

// Computes completeness and consistency for every input feature; copies every
// other cell from `declared`. Declared criteria must name a known criterion.
QualityScorecard quality_scorecard(const Dataset& d, const ViolationReport& report,
                                   const DeclaredGrid& declared);

}  // namespace cmml::constraints
