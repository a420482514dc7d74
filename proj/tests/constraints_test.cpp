#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cmml/constraints/evaluator.hpp"
#include "cmml/constraints/parser.hpp"
#include "cmml/constraints/scorecard.hpp"
#include "cmml/error.hpp"
#include "doc_generator.hpp"
#include "support.hpp"

namespace cmml::constraints {
namespace {

using test::pima;

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> column_values(const Dataset& d, const std::string& name) {
  std::vector<double> out;
  for (const Cell& c : d.column(name)) out.push_back(is_missing(c) ? NAN : std::get<double>(c));
  return out;
}

// ---------------------------------------------------------------- parser

TEST(Parser, ImplicationRule) {
  const ConstraintDoc doc = parse("rule C3: glucose >= 200 implies outcome == 1");
  ASSERT_EQ(doc.statements.size(), 1u);
  const Statement& s = doc.statements[0];
  EXPECT_EQ(s.kind, StatementKind::rule);
  EXPECT_EQ(s.name, "C3");
  const auto* l = std::get_if<Logical>(&s.expr().node);
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->op, Connective::implies);
  const auto& lhs = std::get<Comparison>(l->lhs->node);
  EXPECT_EQ(std::get<FeatureRef>(lhs.lhs).name, "glucose");
  EXPECT_EQ(lhs.op, CmpOp::ge);
  EXPECT_EQ(std::get<double>(lhs.rhs), 200.0);
}

TEST(Parser, RangeStatement) {
  const ConstraintDoc doc = parse("range glucose: > 0");
  const Statement& s = doc.statements.at(0);
  EXPECT_EQ(s.kind, StatementKind::range);
  EXPECT_EQ(s.bounds(), (std::vector<Bound>{{CmpOp::gt, 0.0}}));
  EXPECT_EQ(referenced_features(s), std::vector<std::string>{"glucose"});
}

TEST(Parser, PrecedenceAndOverOr) {
  const ConstraintDoc doc = parse("rule r: a > 1 or b > 2 and c > 3");
  const auto& top = std::get<Logical>(doc.statements[0].expr().node);
  EXPECT_EQ(top.op, Connective::disj);
  EXPECT_EQ(std::get<Logical>(top.rhs->node).op, Connective::conj);
}

TEST(Parser, InvariantAggregates) {
  const ConstraintDoc doc = parse(
      "invariant a: mean(Outcome) < 0.5\n"
      "invariant b: frac(Glucose < 200) == 1\n");
  EXPECT_EQ(doc.statements[0].aggregate().aggregate.kind, AggregateKind::mean);
  EXPECT_EQ(doc.statements[0].aggregate().threshold, 0.5);
  EXPECT_EQ(doc.statements[1].aggregate().aggregate.kind, AggregateKind::frac);
  EXPECT_NE(doc.statements[1].aggregate().aggregate.predicate, nullptr);
}

TEST(Parser, CommentsAndLocations) {
  const ConstraintDoc doc = parse("# header\n\n  rule r: x > 1 # tail\nderive d: x < 2\n");
  ASSERT_EQ(doc.statements.size(), 2u);
  EXPECT_EQ(doc.statements[0].location.line, 3u);
  EXPECT_EQ(doc.statements[0].location.column, 3u);
  EXPECT_EQ(doc.statements[1].location.line, 4u);
}

struct SyntaxCase {
  const char* text;
  std::size_t line;
  std::size_t column;
};

TEST(Parser, SyntaxErrorsCarryPosition) {
  const SyntaxCase cases[] = {
      {"rule X: and and", 1, 9},
      {"rule X x > 1", 1, 8},
      {"rule X: x >", 1, 12},
      {"range x: 5", 1, 10},
      {"rule a: x > 1\nrule b: (x > 1", 2, 15},
      {"rule a: x > 1\n\n   rule b: x @ 1", 3, 14},
      {"invariant i: median(x) > 1", 1, 14},
      {"invariant i: mean(x) > y", 1, 24},
      {"rule a: x > 1\nrule a: x < 5", 2, 1},
      {"rule a: x = 1", 1, 11},
      {"derive: x > 1", 1, 7},
      {"rule a: x > 1 extra", 1, 15},
      {"bogus a: x > 1", 1, 1},
      {"rule a: missing(3)", 1, 17},
      {"rule a: x > 1.2.3", 1, 13},
  };
  for (const SyntaxCase& c : cases) {
    SCOPED_TRACE(c.text);
    try {
      parse(c.text);
      ADD_FAILURE() << "expected ParseError";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), c.line);
      EXPECT_EQ(e.column(), c.column);
    }
  }
}

TEST(Parser, ExpectedTokensReported) {
  try {
    parse("rule X x > 1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::find(e.expected().begin(), e.expected().end(), "':'"), e.expected().end())
        << e.what();
  }
}

TEST(Printer, ShippedDocumentRoundTrips) {
  const std::string text = read_text(test::config_path("pima.cmc"));
  const ConstraintDoc a = parse(text);
  const std::string printed = to_source(a);
  const ConstraintDoc b = parse(printed);
  EXPECT_EQ(a, b);
  EXPECT_EQ(to_source(b), printed);
  EXPECT_GE(a.statements.size(), 10u);
}

TEST(Printer, RandomDocumentsRoundTrip) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    SCOPED_TRACE(seed);
    test::DocGenerator gen(seed);
    const std::string text = gen.document(1 + seed % 8);
    const ConstraintDoc a = parse(text);
    const ConstraintDoc b = parse(to_source(a));
    ASSERT_EQ(a, b) << text << "\n---\n" << to_source(a);
    EXPECT_EQ(to_source(a), to_source(b));
  }
}

TEST(Printer, InjectedCharacterReportsItsPosition) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    SCOPED_TRACE(seed);
    test::DocGenerator gen(seed, /*comments=*/false);
    std::string text = gen.document(1 + seed % 5);
    Rng rng(seed);
    const std::size_t at = rng.below(text.size());
    text.insert(at, 1, "@$&"[seed % 3]);
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    // Splitting "!=" or "==" strands the first character, which is reported first.
    const bool stranded = at > 0 && (text[at - 1] == '!' || text[at - 1] == '=') &&
                          (at < 2 || std::string_view("<>=!").find(text[at - 2]) == std::string_view::npos);
    if (stranded) --col;
    try {
      parse(text);
      ADD_FAILURE() << "expected ParseError for\n" << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line);
      EXPECT_EQ(e.column(), col);
    }
  }
}

// ---------------------------------------------------------------- evaluator

const ConstraintDoc& pima_rules() {
  static const ConstraintDoc doc = parse(
      "rule C1: Glucose > 0\n"
      "rule C2: Age >= 15 and Age < 120\n"
      "rule C3: Glucose >= 200 implies Outcome == 1\n");
  return doc;
}

TEST(Evaluate, PimaDomainRules) {
  const ViolationReport r = evaluate(pima_rules(), pima());

  const std::vector<double> glucose = column_values(pima(), "Glucose");
  std::vector<std::size_t> zero_rows;
  for (std::size_t i = 0; i < glucose.size(); ++i) {
    if (!(glucose[i] > 0.0)) zero_rows.push_back(i);
  }
  EXPECT_EQ(zero_rows.size(), 5u);

  EXPECT_EQ(r.at("C1").status, Status::fail);
  EXPECT_EQ(r.at("C1").violating_rows, zero_rows);
  EXPECT_EQ(r.at("C2").status, Status::pass);
  EXPECT_TRUE(r.at("C2").violating_rows.empty());
  EXPECT_EQ(r.at("C3").status, Status::vacuous);
  EXPECT_EQ(r.at("C3").antecedent_matches.value(), 0u);
}

TEST(Evaluate, MissingCellsSkipped) {
  const Dataset d = test::single_column("x", {1.0, Missing{}, -1.0, Missing{}});
  const ViolationReport r = evaluate(parse("rule pos: x > 0\nrange x: > 0"), d);
  EXPECT_EQ(r.at("pos").violating_rows, std::vector<std::size_t>{2});
  EXPECT_EQ(r.at("pos").skipped_rows, 2u);
  EXPECT_EQ(r.at("pos").evaluated_rows, 2u);
  EXPECT_EQ(r.at("x").status, Status::fail);

  const ViolationReport m = evaluate(parse("rule present: not missing(x)"), d);
  EXPECT_EQ(m.at("present").violating_rows, (std::vector<std::size_t>{1, 3}));
}

TEST(Evaluate, InvariantsObserveAggregates) {
  const Dataset d = test::single_column("x", {1.0, 2.0, 3.0, Missing{}});
  const ViolationReport r = evaluate(parse(
                                         "invariant m: mean(x) == 2\n"
                                         "invariant s: std(x) < 0.5\n"
                                         "invariant c: count(x) == 3\n"
                                         "invariant fm: frac_missing(x) == 0.25\n"
                                         "invariant f: frac(x >= 2) > 0.6\n"),
                                     d);
  EXPECT_EQ(r.at("m").status, Status::pass);
  EXPECT_DOUBLE_EQ(r.at("m").observed.value(), 2.0);
  EXPECT_EQ(r.at("s").status, Status::fail);
  EXPECT_DOUBLE_EQ(r.at("s").observed.value(), 1.0);
  EXPECT_EQ(r.at("c").status, Status::pass);
  EXPECT_EQ(r.at("fm").status, Status::pass);
  EXPECT_NEAR(r.at("f").observed.value(), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(r.at("f").status, Status::pass);
}

TEST(Evaluate, UnknownFeatureNamesStatementAndFeature) {
  try {
    evaluate(parse("rule chol: Cholesterol < 300"), pima());
    FAIL();
  } catch (const UnknownFeatureError& e) {
    EXPECT_EQ(e.feature(), "Cholesterol");
    EXPECT_NE(std::string(e.what()).find("chol"), std::string::npos);
  }
}

TEST(Evaluate, ShippedDocumentOnMarkedPima) {
  const ConstraintDoc doc = parse_file(test::config_path("pima.cmc").string());
  const std::vector<std::string> zeros{"Glucose", "BloodPressure", "SkinThickness", "Insulin", "BMI"};
  const ViolationReport r = evaluate(doc, mark_missing_zeros(pima(), zeros));
  EXPECT_EQ(r.at("C1").status, Status::pass);
  EXPECT_EQ(r.at("C1").skipped_rows, 5u);
  EXPECT_EQ(r.at("Glucose").status, Status::pass);
  // One diastolic reading of 122 exceeds the stated bound of 120.
  EXPECT_EQ(r.at("BloodPressure").violating_rows.size(), 1u);
  EXPECT_EQ(r.at("insulin_coverage").status, Status::pass);
}

// ---------------------------------------------------------------- derive

TEST(Derive, Kl1CountMatchesRowScan) {
  const Dataset out = derive_features(parse("derive kl1: Age < 30 and Glucose < 120"), pima());
  const std::vector<double> age = column_values(pima(), "Age");
  const std::vector<double> glucose = column_values(pima(), "Glucose");
  std::size_t oracle = 0;
  for (std::size_t i = 0; i < age.size(); ++i) oracle += (age[i] < 30 && glucose[i] < 120) ? 1 : 0;
  const std::vector<double> kl1 = test::numbers(out, "kl1");
  EXPECT_EQ(static_cast<std::size_t>(std::count(kl1.begin(), kl1.end(), 1.0)), oracle);
  EXPECT_EQ(out.feature("kl1").kind, FeatureKind::binary);
  EXPECT_EQ(out.feature("kl1").role, FeatureRole::derived);
}

TEST(Derive, TautologyAndOrdering) {
  const Dataset out = derive_features(parse("derive all: Age >= 0\nderive kl2: Age < 30 and Pregnancies <= 6"),
                                      pima());
  ASSERT_EQ(out.n_features(), 11u);
  EXPECT_EQ(out.feature(9).name, "all");
  EXPECT_EQ(out.feature(10).name, "kl2");
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(out.feature(i), pima().feature(i));
  const std::vector<double> all = test::numbers(out, "all");
  EXPECT_TRUE(std::all_of(all.begin(), all.end(), [](double v) { return v == 1.0; }));
}

TEST(Derive, MissingInputsGiveMissingCells) {
  const Dataset d = test::single_column("x", {1.0, Missing{}, 5.0});
  const Dataset out = derive_features(parse("derive small: x < 3"), d);
  EXPECT_EQ(out.column("small"), (Column{1.0, Missing{}, 0.0}));
}

TEST(Derive, NameCollisionRejected) {
  EXPECT_THROW(derive_features(parse("derive Age: Age > 40"), pima()), ConstraintError);
}

// ---------------------------------------------------------------- scorecard

TEST(Scorecard, CompletenessThresholds) {
  EXPECT_EQ(completeness_grade(0.0), Grade::very_good);
  EXPECT_EQ(completeness_grade(0.0456), Grade::good);
  EXPECT_EQ(completeness_grade(0.20), Grade::poor);
  EXPECT_EQ(completeness_grade(0.487), Grade::very_poor);
}

TEST(Scorecard, PimaComputedCells) {
  const std::vector<std::string> zeros{"Glucose", "BloodPressure", "SkinThickness", "Insulin", "BMI"};
  const Dataset marked = mark_missing_zeros(pima(), zeros);
  const ConstraintDoc doc = parse("range Glucose: > 0\nrange Insulin: > 0, < 1000\nrule C2: Age >= 15 and Age < 120");
  DeclaredGrid declared;
  declared["Insulin"]["Believability"] = Grade::very_good;
  declared["Insulin"]["Completeness"] = Grade::very_good;
  const QualityScorecard card = quality_scorecard(marked, evaluate(doc, marked), declared);

  const ScoreCell* insulin = card.cell("Insulin", kCompleteness);
  ASSERT_NE(insulin, nullptr);
  EXPECT_EQ(insulin->grade, Grade::very_poor);
  EXPECT_EQ(insulin->provenance, Provenance::computed);
  EXPECT_EQ(insulin->declared, Grade::very_good);
  EXPECT_EQ(card.cell("Pregnancies", kCompleteness)->grade, Grade::very_good);
  EXPECT_EQ(card.cell("BloodPressure", kCompleteness)->grade, Grade::good);
  EXPECT_EQ(card.cell("Insulin", "Believability")->provenance, Provenance::declared);
  EXPECT_EQ(card.cell("Age", kConsistency)->grade, Grade::very_good);
  EXPECT_EQ(card.cell("Pregnancies", kConsistency), nullptr);
}

TEST(Scorecard, TwentyPercentMissingIsPoor) {
  Column c(10, Cell{1.0});
  c[0] = Missing{};
  c[1] = Missing{};
  const Dataset d = test::single_column("f", c);
  const QualityScorecard card = quality_scorecard(d, ViolationReport{}, {});
  EXPECT_EQ(card.cell("f", kCompleteness)->grade, Grade::poor);
}

TEST(Scorecard, UnknownCriterionRejected) {
  DeclaredGrid declared;
  declared["Age"]["Shininess"] = Grade::good;
  EXPECT_THROW(quality_scorecard(pima(), ViolationReport{}, declared), std::invalid_argument);
}

TEST(Scorecard, CriteriaFollowFixedLayout) {
  const auto& c = quality_criteria();
  ASSERT_EQ(c.size(), 20u);
  EXPECT_EQ(c.front().name, "Believability");
  EXPECT_EQ(c.back().name, "Access security");
}

// ---------------------------------------------------------------- properties

Dataset random_constraint_dataset(Rng& rng, std::size_t n) {
  const char* names[] = {"Glucose", "Age", "BMI", "x_1", "f2"};
  std::vector<FeatureMeta> meta;
  std::vector<Column> cols;
  for (const char* name : names) {
    meta.push_back({name, FeatureKind::numeric, "", FeatureRole::input, {}});
    Column c;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.below(8) == 0) {
        c.emplace_back(Missing{});
      } else {
        c.emplace_back(static_cast<double>(static_cast<int>(rng.below(21)) - 10) / 2.0);
      }
    }
    cols.push_back(std::move(c));
  }
  meta.push_back({"Outcome", FeatureKind::binary, "", FeatureRole::target, {}});
  Column y;
  for (std::size_t i = 0; i < n; ++i) y.emplace_back(static_cast<double>(rng.below(2)));
  cols.push_back(std::move(y));
  return Dataset(std::move(meta), std::move(cols));
}

TEST(ConstraintProperties, RangeFailsExactlyAtOrBelowBound) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Dataset d = random_constraint_dataset(rng, 1 + rng.below(30));
    const double c = static_cast<double>(static_cast<int>(rng.below(11)) - 5);
    const ViolationReport r = evaluate(parse("range Age: > " + std::to_string(c)), d);
    std::vector<std::size_t> oracle;
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      const double* v = number_if(d.column("Age")[i]);
      if (v && *v <= c) oracle.push_back(i);
    }
    EXPECT_EQ(r.at("Age").violating_rows, oracle);
  }
}

TEST(ConstraintProperties, DerivedColumnsAgreeWithTheirRules) {
  Rng rng(17);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    test::DocGenerator gen(seed);
    ConstraintDoc doc = parse(gen.document(6));
    const Dataset d = random_constraint_dataset(rng, 25);
    ConstraintDoc derives;
    for (const Statement& s : doc.statements) {
      if (s.kind == StatementKind::derive) derives.statements.push_back(s);
    }
    const Dataset out = derive_features(derives, d);
    for (const Statement& s : derives.statements) {
      // "derived == 1 iff body" checked as two rules over the augmented table.
      const std::string body = to_source(s.expr());
      const ConstraintDoc check = parse("rule fwd: " + s.name + " == 1 implies (" + body +
                                        ")\nrule back: (" + body + ") implies " + s.name + " == 1");
      const ViolationReport r = evaluate(check, out);
      EXPECT_TRUE(r.at("fwd").violating_rows.empty()) << body;
      EXPECT_TRUE(r.at("back").violating_rows.empty()) << body;
      for (std::size_t i = 0; i < out.n_rows(); ++i) {
        const std::optional<bool> v = evaluate_row(s.expr(), d, i);
        const Cell& cell = out.column(s.name)[i];
        if (v) {
          EXPECT_EQ(std::get<double>(cell), *v ? 1.0 : 0.0);
        } else {
          EXPECT_TRUE(is_missing(cell));
        }
      }
    }
  }
}

TEST(ConstraintProperties, EvaluationIsPermutationEquivariant) {
  Rng rng(23);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    test::DocGenerator gen(seed + 1000);
    const ConstraintDoc doc = parse(gen.document(5));
    const Dataset d = random_constraint_dataset(rng, 20);
    std::vector<std::size_t> perm = iota_indices(d.n_rows());
    rng.shuffle(perm);
    const ViolationReport a = evaluate(doc, d);
    const ViolationReport b = evaluate(doc, d.select_rows(perm));
    ASSERT_EQ(a.results.size(), b.results.size());
    for (std::size_t s = 0; s < a.results.size(); ++s) {
      EXPECT_EQ(a.results[s].status, b.results[s].status);
      std::vector<std::size_t> mapped;
      for (std::size_t r : b.results[s].violating_rows) mapped.push_back(perm[r]);
      std::sort(mapped.begin(), mapped.end());
      EXPECT_EQ(mapped, a.results[s].violating_rows);
      if (a.results[s].observed) {
        EXPECT_NEAR(*a.results[s].observed, *b.results[s].observed, 1e-9);
      }
    }
  }
}

}  // namespace
}  // namespace cmml::constraints
