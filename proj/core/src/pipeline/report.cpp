#include "cmml/pipeline/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cmml/error.hpp"

namespace cmml::pipeline {

using ojson = nlohmann::ordered_json;

namespace {

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

template <class T>
ojson opt_text(const std::optional<T>& v) {
  return v ? ojson(std::string(to_string(*v))) : ojson(nullptr);
}

ojson spec_json(const ModelSpec& spec) {
  ojson params = ojson::object();
  for (const auto& [k, v] : spec.params) {
    if (const double* d = std::get_if<double>(&v)) {
      params[k] = *d;
    } else {
      params[k] = std::get<std::string>(v);
    }
  }
  return {{"family", to_string(spec.family)}, {"params", params}, {"label", spec.label()}};
}

constexpr std::size_t kExampleRows = 10;

}  // namespace

ojson to_json(const DescriptiveStats& stats) {
  ojson out = ojson::array();
  for (const FeatureStats& f : stats.features) {
    out.push_back({{"feature", f.name},
                   {"kind", to_string(f.kind)},
                   {"count", f.count},
                   {"present", f.present},
                   {"missing_fraction", f.missing_fraction},
                   {"mean", opt(f.mean)},
                   {"std", opt(f.std)},
                   {"min", opt(f.min)},
                   {"q25", opt(f.q25)},
                   {"median", opt(f.median)},
                   {"q75", opt(f.q75)},
                   {"max", opt(f.max)}});
  }
  return out;
}

ojson to_json(const constraints::ViolationReport& report) {
  ojson out = ojson::array();
  for (const auto& r : report.results) {
    std::vector<std::size_t> examples(r.violating_rows.begin(),
                                      r.violating_rows.begin() +
                                          static_cast<std::ptrdiff_t>(std::min(kExampleRows, r.violating_rows.size())));
    ojson j = {{"name", r.name},
               {"kind", constraints::to_string(r.kind)},
               {"status", constraints::to_string(r.status)},
               {"violations", r.violating_rows.size()},
               {"evaluated_rows", r.evaluated_rows},
               {"skipped_rows", r.skipped_rows},
               {"example_rows", examples},
               {"features", r.features}};
    j["antecedent_matches"] = r.antecedent_matches ? ojson(*r.antecedent_matches) : ojson(nullptr);
    j["observed"] = opt(r.observed);
    out.push_back(std::move(j));
  }
  return out;
}

ojson to_json(const constraints::QualityScorecard& card) {
  ojson rows = ojson::array();
  for (const auto& c : constraints::quality_criteria()) {
    ojson cells = ojson::object();
    for (const std::string& f : card.features) {
      const constraints::ScoreCell* cell = card.cell(f, c.name);
      if (!cell) {
        cells[f] = nullptr;
        continue;
      }
      ojson j = {{"grade", constraints::symbol(cell->grade)}, {"provenance", constraints::to_string(cell->provenance)}};
      if (cell->declared) j["declared"] = constraints::symbol(*cell->declared);
      if (!cell->basis.empty()) j["basis"] = cell->basis;
      cells[f] = std::move(j);
    }
    rows.push_back({{"dimension", constraints::to_string(c.dimension)}, {"criterion", c.name}, {"cells", cells}});
  }
  return {{"features", card.features}, {"rows", rows}};
}

ojson to_json(const RunReport& r) {
  ojson j;
  j["schema"] = kReportSchema;
  j[kTimestampKey] = r.generated_at;
  j["environment"] = {{"seed", r.seed}, {"config_hash", r.config_hash}, {"recipe_fit", to_string(r.recipe_fit)}};

  std::string verdict = "incomplete";
  if (r.aborted) {
    verdict = "aborted";
  } else if (r.gates) {
    verdict = r.gates->passed ? "pass" : "fail";
  }
  j["status"] = {{"verdict", verdict},
                 {"aborted", r.aborted},
                 {"abort_reason", r.abort_reason ? ojson(*r.abort_reason) : ojson(nullptr)},
                 {"exit_code", r.exit_code}};

  ojson problem = {{"title", r.problem.title}};
  for (const auto& [k, v] : r.problem.details.items()) problem[k] = v;
  j["problem"] = problem;

  ojson phases = ojson::array();
  for (std::size_t i = 0; i < r.phases.size(); ++i) {
    phases.push_back({{"index", i + 1},
                      {"phase", to_string(r.phases[i].phase)},
                      {"status", r.phases[i].status},
                      {"notes", r.phases[i].notes}});
  }
  j["phases"] = phases;

  ojson zeros = ojson::object();
  for (const auto& [f, frac] : r.zero_fractions) zeros[f] = frac;
  j["data"] = {{"target", r.target},
               {"rows", r.rows},
               {"features", r.features},
               {"zero_as_missing", zeros},
               {"stats_raw", to_json(r.raw_stats)},
               {"stats_zero_as_missing", to_json(r.marked_stats)}};

  ojson outcomes = ojson::array();
  for (const auto& o : r.constraint_outcomes) {
    outcomes.push_back({{"name", o.name}, {"severity", to_string(o.severity)}, {"status", constraints::to_string(o.status)}});
  }
  j["constraints"] = {{"source", r.constraint_source ? ojson(*r.constraint_source) : ojson(nullptr)},
                      {"outcomes", outcomes},
                      {"zero_as_missing", r.violations ? to_json(*r.violations) : ojson::array()},
                      {"raw", r.raw_violations ? to_json(*r.raw_violations) : ojson::array()}};
  j["quality"] = r.scorecard ? to_json(*r.scorecard) : ojson(nullptr);
  j["engineering"] = {{"recipe", ojson::parse(r.recipe.dump())}, {"notes", r.engineering_notes}};

  ojson board = ojson::array();
  for (std::size_t i = 0; i < r.leaderboard.size(); ++i) {
    const LeaderboardRow& row = r.leaderboard[i];
    ojson folds = ojson::array();
    for (const auto& f : row.entry.cv.folds) folds.push_back({{"size", f.test_rows.size()}, {"metrics", to_json(f.metrics)}});
    board.push_back({{"rank", i + 1},
                     {"grid_index", row.entry.grid_index},
                     {"name", row.name},
                     {"spec", spec_json(row.entry.spec)},
                     {"scale", opt_text(row.scale)},
                     {"score", opt(row.entry.score)},
                     {"summary", to_json(row.entry.cv.summary)},
                     {"folds", folds},
                     {"error", row.entry.error ? ojson(*row.entry.error) : ojson(nullptr)}});
  }
  j["models"] = {{"selection_metric", r.selection_metric}, {"leaderboard", board}};

  if (r.chosen) {
    const ChosenModel& c = *r.chosen;
    j["chosen"] = {{"name", c.name},
                   {"spec", spec_json(c.spec)},
                   {"scale", opt_text(c.scale)},
                   {"features", c.features},
                   {"cv", to_json(c.cv)},
                   {"cv_global_recipe", c.cv_global_recipe ? to_json(*c.cv_global_recipe) : ojson(nullptr)},
                   {"holdout", to_json(c.holdout)}};
  } else {
    j["chosen"] = nullptr;
  }
  j["gates"] = r.gates ? ojson(to_json(*r.gates)) : ojson(nullptr);
  return j;
}

// ------------------------------------------------------------------ markdown

namespace {

std::string num(const ojson& v, int digits = 4) {
  if (v.is_null()) return "n/a";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v.get<double>());
  return buf;
}

std::string pct(const ojson& v) {
  if (v.is_null()) return "n/a";
  return num(ojson(v.get<double>() * 100.0), 2) + "%";
}

std::string text(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Pipes would break table cells.
std::string cell(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

void table_header(std::ostringstream& out, const std::vector<std::string>& columns) {
  out << '|';
  for (const auto& c : columns) out << ' ' << c << " |";
  out << "\n|";
  for (std::size_t i = 0; i < columns.size(); ++i) out << "---|";
  out << '\n';
}

void table_row(std::ostringstream& out, const std::vector<std::string>& cells) {
  out << '|';
  for (const auto& c : cells) out << ' ' << cell(c) << " |";
  out << '\n';
}

void stats_table(std::ostringstream& out, const ojson& stats) {
  table_header(out, {"Feature", "Kind", "Present", "Missing", "Mean", "Std", "Min", "Median", "Max"});
  for (const auto& f : stats) {
    table_row(out, {text(f["feature"]), text(f["kind"]), text(f["present"]), pct(f["missing_fraction"]),
                    num(f["mean"], 3), num(f["std"], 3), num(f["min"], 3), num(f["median"], 3), num(f["max"], 3)});
  }
}

void violations_table(std::ostringstream& out, const ojson& results) {
  table_header(out, {"Statement", "Kind", "Status", "Violations", "Evaluated", "Skipped", "Observed"});
  for (const auto& s : results) {
    table_row(out, {text(s["name"]), text(s["kind"]), text(s["status"]), text(s["violations"]), text(s["evaluated_rows"]),
                    text(s["skipped_rows"]), num(s["observed"])});
  }
}

void echo(std::ostringstream& out, const std::string& key, const ojson& v) {
  if (v.is_array()) {
    out << "**" << key << "**\n\n";
    for (const auto& item : v) out << "- " << text(item) << '\n';
    out << '\n';
  } else if (v.is_object()) {
    out << "**" << key << "**\n\n";
    for (const auto& [k, item] : v.items()) out << "- " << k << ": " << text(item) << '\n';
    out << '\n';
  } else {
    out << "**" << key << "**: " << text(v) << "\n\n";
  }
}

const char* kMetricColumns[] = {"accuracy", "sensitivity", "specificity", "precision", "f1", "auc"};

}  // namespace

std::string render_stats_markdown(const DescriptiveStats& stats) {
  std::ostringstream out;
  stats_table(out, to_json(stats));
  return out.str();
}

std::string render_violations_markdown(const constraints::ViolationReport& report) {
  std::ostringstream out;
  violations_table(out, to_json(report));
  return out.str();
}

std::string render_markdown(const ojson& j) {
  std::ostringstream out;
  const ojson& problem = j.at("problem");
  out << "# Run report: " << (text(problem["title"]).empty() ? "untitled" : text(problem["title"])) << "\n\n";
  const ojson& status = j.at("status");
  out << "- Verdict: **" << text(status["verdict"]) << "** (exit code " << text(status["exit_code"]) << ")\n";
  if (!status["abort_reason"].is_null()) out << "- Aborted: " << text(status["abort_reason"]) << '\n';
  out << "- Seed: " << text(j["environment"]["seed"]) << '\n';
  out << "- Config hash: `" << text(j["environment"]["config_hash"]) << "`\n";
  out << "- Recipe fit: " << text(j["environment"]["recipe_fit"]) << '\n';
  out << "- Generated: " << text(j[kTimestampKey]) << "\n\n";

  out << "## Problem\n\n";
  for (const auto& [k, v] : problem.items()) {
    if (k != "title") echo(out, k, v);
  }

  out << "## Phases\n\n";
  table_header(out, {"#", "Phase", "Status", "Notes"});
  for (const auto& p : j.at("phases")) {
    std::string notes;
    for (const auto& n : p["notes"]) notes += (notes.empty() ? "" : "; ") + text(n);
    table_row(out, {text(p["index"]), text(p["phase"]), text(p["status"]), notes});
  }
  out << '\n';

  const ojson& data = j.at("data");
  out << "## Data\n\n" << text(data["rows"]) << " rows, " << text(data["features"]) << " features, target `"
      << text(data["target"]) << "`.\n\n";
  if (!data["zero_as_missing"].empty()) {
    table_header(out, {"Feature", "Zero fraction"});
    for (const auto& [f, v] : data["zero_as_missing"].items()) table_row(out, {f, pct(v)});
    out << '\n';
  }
  out << "### Descriptive statistics (raw)\n\n";
  stats_table(out, data["stats_raw"]);
  out << "\n### Descriptive statistics (zeros as missing)\n\n";
  stats_table(out, data["stats_zero_as_missing"]);
  out << '\n';

  const ojson& cons = j.at("constraints");
  out << "## Constraints\n\n";
  if (!cons["source"].is_null()) out << "Source: `" << text(cons["source"]) << "`\n\n";
  table_header(out, {"Statement", "Severity", "Status"});
  for (const auto& o : cons["outcomes"]) table_row(out, {text(o["name"]), text(o["severity"]), text(o["status"])});
  out << "\n### Zeros as missing\n\n";
  violations_table(out, cons["zero_as_missing"]);
  out << "\n### Raw data\n\n";
  violations_table(out, cons["raw"]);
  out << '\n';

  if (!j["quality"].is_null()) {
    const ojson& q = j["quality"];
    out << "## Data quality scorecard\n\n";
    std::vector<std::string> cols{"Dimension", "Criterion"};
    for (const auto& f : q["features"]) cols.push_back(text(f));
    table_header(out, cols);
    std::string last_dim;
    for (const auto& row : q["rows"]) {
      const std::string dim = text(row["dimension"]);
      std::vector<std::string> cells{dim == last_dim ? "" : dim, text(row["criterion"])};
      last_dim = dim;
      for (const auto& f : q["features"]) {
        const ojson& c = row["cells"][text(f)];
        if (c.is_null()) {
          cells.emplace_back("");
        } else {
          std::string g = text(c["grade"]);
          if (text(c["provenance"]) == "computed") g += "*";
          cells.push_back(g);
        }
      }
      table_row(out, cells);
    }
    out << "\n`*` computed from the data; other grades declared in the config.\n\n";
  }

  const ojson& eng = j.at("engineering");
  out << "## Engineering\n\n";
  for (const auto& s : eng["recipe"]["steps"]) {
    std::string line = text(s["op"]);
    for (const auto& [k, v] : s.items()) {
      if (k != "op") line += " " + k + "=" + text(v);
    }
    out << "1. " << line << '\n';
  }
  out << '\n';
  for (const auto& n : eng["notes"]) out << "- " << text(n) << '\n';
  if (!eng["notes"].empty()) out << '\n';

  const ojson& models = j.at("models");
  out << "## Leaderboard\n\nSelection metric: " << text(models["selection_metric"]) << "\n\n";
  std::vector<std::string> cols{"Rank", "Model", "Scale"};
  for (const char* m : kMetricColumns) cols.emplace_back(m);
  cols.emplace_back("Error");
  table_header(out, cols);
  for (const auto& e : models["leaderboard"]) {
    std::vector<std::string> cells{text(e["rank"]), text(e["spec"]["label"]), e["scale"].is_null() ? "none" : text(e["scale"])};
    for (const char* m : kMetricColumns) {
      const ojson& s = e["summary"];
      cells.push_back(s.contains(m) ? num(s[m]["mean"]) + " ± " + num(s[m]["std"]) : "n/a");
    }
    cells.push_back(text(e["error"]));
    table_row(out, cells);
  }
  out << '\n';

  if (!j["chosen"].is_null()) {
    const ojson& c = j["chosen"];
    out << "## Chosen model\n\n`" << text(c["spec"]["label"]) << "` (" << text(c["name"]) << ", "
        << (c["scale"].is_null() ? "unscaled" : text(c["scale"]) + " scaling") << ")\n\n";
    table_header(out, {"Metric", "CV mean", "CV std", "CV mean, global recipe fit", "Holdout"});
    for (const auto& [m, v] : c["cv"].items()) {
      const ojson global = c["cv_global_recipe"].is_null() || !c["cv_global_recipe"].contains(m)
                               ? ojson(nullptr)
                               : c["cv_global_recipe"][m]["mean"];
      table_row(out, {m, num(v["mean"]), num(v["std"]), num(global), num(c["holdout"][m])});
    }
    out << '\n';
  }

  if (!j["gates"].is_null()) {
    out << "## Performance gates\n\n";
    table_header(out, {"Metric", "Requirement", "Severity", "Observed", "Satisfied"});
    for (const auto& g : j["gates"]["outcomes"]) {
      table_row(out, {text(g["metric"]), text(g["comparator"]) + " " + num(g["threshold"], 2), text(g["severity"]),
                      num(g["observed"]), g["satisfied"].get<bool>() ? "yes" : "no"});
    }
    out << "\nOverall: **" << (j["gates"]["passed"].get<bool>() ? "pass" : "fail") << "**\n";
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void emit_report(const RunReport& report, const std::optional<std::filesystem::path>& json_path,
                 const std::optional<std::filesystem::path>& markdown_path) {
  const ojson doc = to_json(report);
  if (json_path) write_text(*json_path, doc.dump(2) + "\n");
  if (markdown_path) write_text(*markdown_path, render_markdown(doc));
}

}  // namespace cmml::pipeline
