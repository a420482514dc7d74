#include "cmml/pipeline/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "cmml/error.hpp"

namespace cmml::pipeline {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

template <class F>
auto config_field(const char* section, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config section '") + section + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config section '") + section + "': " + e.what());
  }
}

ParamValue param_value(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw ConfigError("model parameter '" + key + "' must be a number or a string");
}

}  // namespace

std::uint64_t parse_seed(std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("seed '" + std::string(text) + "' is not a non-negative integer");
  }
  return v;
}

PipelineConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;
  c.base_dir = base_dir;
  c.source = j;

  config_field("problem", [&] {
    const json& p = j.value("problem", json::object());
    c.problem.title = p.value("title", "");
    for (const auto& [key, value] : p.items()) {
      if (key != "title") c.problem.details[key] = value;
    }
  });

  config_field("data", [&] {
    const json& d = j.at("data");
    c.data.csv = resolve(base_dir, d.at("csv").get<std::string>());
    c.data.target = d.at("target").get<std::string>();
    const std::string task = d.value("task", "classification");
    if (task == "classification") {
      c.data.task = Task::classification;
    } else if (task == "regression") {
      c.data.task = Task::regression;
    } else {
      throw ConfigError("unknown task '" + task + "'");
    }
    c.data.zero_as_missing = d.value("zero_as_missing", std::vector<std::string>{});
  });

  config_field("constraints", [&] {
    if (!j.contains("constraints")) return;
    const json& s = j.at("constraints");
    if (s.contains("file")) c.constraints.file = resolve(base_dir, s.at("file").get<std::string>());
    const json severity = s.value("severity", json::object());
    for (const auto& [name, sev] : severity.items()) {
      c.constraints.severity[name] = parse_severity(sev.get<std::string>());
    }
    c.constraints.abort_on_hard_failure = s.value("abort_on_hard_failure", true);
  });

  config_field("quality", [&] {
    if (!j.contains("quality")) return;
    const json declared = j.at("quality").value("declared", json::object());
    for (const auto& [feature, row] : declared.items()) {
      for (const auto& [criterion, grade] : row.items()) {
        c.declared_quality[feature][criterion] = constraints::parse_grade(grade.get<std::string>());
      }
    }
  });

  config_field("engineering", [&] {
    if (!j.contains("engineering")) return;
    c.engineering = j.at("engineering");
    c.engineering_notes = c.engineering.value("notes", std::vector<std::string>{});
  });

  config_field("models", [&] {
    if (!j.contains("models") || !j.at("models").is_array() || j.at("models").empty()) {
      throw ConfigError("config needs a non-empty 'models' list");
    }
    for (const json& m : j.at("models")) {
      ModelEntry e;
      e.grid.family = parse_model_family(m.at("family").get<std::string>());
      e.name = m.value("name", std::string(to_string(e.grid.family)));
      const json params = m.value("params", json::object());
      for (const auto& [key, value] : params.items()) {
        auto& axis = e.grid.axes[key];
        if (value.is_array()) {
          if (value.empty()) throw ConfigError("parameter axis '" + key + "' is empty");
          for (const json& v : value) axis.push_back(param_value(v, key));
        } else {
          axis.push_back(param_value(value, key));
        }
      }
      if (m.contains("scale") && !m.at("scale").is_null() && m.at("scale") != "none") {
        e.scale = engineering::parse_scale_method(m.at("scale").get<std::string>());
      }
      for (const ModelSpec& s : expand(e.grid)) s.validate();
      c.models.push_back(std::move(e));
    }
  });

  config_field("validation", [&] {
    const json& v = j.value("validation", json::object());
    c.validation.k = v.value("k", std::size_t{5});
    if (v.contains("split")) {
      const json& s = v.at("split");
      c.validation.split = SplitFractions{s.at("train").get<double>(), s.at("validation").get<double>(),
                                          s.at("test").get<double>()};
      (void)split_sizes(100, c.validation.split);
    }
    if (v.contains("seed") && !v.at("seed").is_null()) {
      const json& s = v.at("seed");
      if (!s.is_number_unsigned()) throw ConfigError("validation.seed must be a non-negative integer");
      c.validation.seed = s.get<std::uint64_t>();
    }
    c.validation.selection_metric = v.value("selection_metric", "accuracy");
    (void)metric_range(c.validation.selection_metric);
    const std::string mode = v.value("recipe_fit", "per_fold");
    if (mode == "per_fold") {
      c.validation.recipe_fit = RecipeFit::per_fold;
    } else if (mode == "global") {
      c.validation.recipe_fit = RecipeFit::global;
    } else {
      throw ConfigError("unknown recipe_fit '" + mode + "'");
    }
  });

  config_field("gates", [&] {
    for (const json& g : j.value("gates", json::array())) c.gates.push_back(gate_from_json(g));
  });

  config_field("report", [&] {
    const json& r = j.value("report", json::object());
    if (r.contains("json")) c.report.json = resolve(base_dir, r.at("json").get<std::string>());
    if (r.contains("markdown")) c.report.markdown = resolve(base_dir, r.at("markdown").get<std::string>());
    if (r.contains("model")) c.report.model = resolve(base_dir, r.at("model").get<std::string>());
  });
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

std::string config_hash(const PipelineConfig& config) {
  json canonical = config.source;  // nlohmann::json objects keep keys sorted
  canonical.erase("report");
  return sha256_hex(canonical.dump());
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const PipelineConfig& config) {
  if (cli) return *cli;
  if (config.validation.seed) return *config.validation.seed;
  if (const char* env = std::getenv("CMML_SEED"); env && *env) return parse_seed(env);
  throw ConfigError("no seed: pass --seed, set validation.seed in the config, or export CMML_SEED");
}

}  // namespace cmml::pipeline
