#include "cmml/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cmml/csv.hpp"
#include "cmml/error.hpp"
#include "cmml/random.hpp"

namespace cmml {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::numeric: return "numeric";
    case FeatureKind::categorical: return "categorical";
    case FeatureKind::binary: return "binary";
  }
  return "numeric";
}

std::string_view to_string(FeatureRole role) {
  switch (role) {
    case FeatureRole::input: return "input";
    case FeatureRole::target: return "target";
    case FeatureRole::derived: return "derived";
    case FeatureRole::excluded: return "excluded";
  }
  return "input";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "numeric") return FeatureKind::numeric;
  if (text == "categorical") return FeatureKind::categorical;
  if (text == "binary") return FeatureKind::binary;
  throw std::invalid_argument("unknown feature kind '" + std::string(text) + "'");
}

FeatureRole parse_feature_role(std::string_view text) {
  if (text == "input") return FeatureRole::input;
  if (text == "target") return FeatureRole::target;
  if (text == "derived") return FeatureRole::derived;
  if (text == "excluded") return FeatureRole::excluded;
  throw std::invalid_argument("unknown feature role '" + std::string(text) + "'");
}

std::string cell_text(const Cell& c) {
  if (const double* v = std::get_if<double>(&c)) return csv::format_number(*v);
  if (const std::string* s = std::get_if<std::string>(&c)) return *s;
  return "";
}

namespace {

void check_column(const FeatureMeta& meta, const Column& column) {
  for (std::size_t r = 0; r < column.size(); ++r) {
    const Cell& c = column[r];
    if (is_missing(c)) continue;
    const bool numeric = std::holds_alternative<double>(c);
    if (meta.kind == FeatureKind::categorical && numeric) {
      throw DataError("categorical feature '" + meta.name + "' holds a number", r);
    }
    if (meta.kind != FeatureKind::categorical && !numeric) {
      throw DataError("feature '" + meta.name + "' holds non-numeric token '" +
                          std::get<std::string>(c) + "'",
                      r);
    }
    if (meta.kind == FeatureKind::binary) {
      const double v = std::get<double>(c);
      if (v != 0.0 && v != 1.0) {
        throw DataError("binary feature '" + meta.name + "' holds value " +
                            csv::format_number(v),
                        r);
      }
    }
  }
}

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value,
                                   std::chars_format::general);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

Dataset::Dataset(std::vector<FeatureMeta> features, std::vector<Column> columns)
    : features_(std::move(features)), columns_(std::move(columns)) {
  if (features_.size() != columns_.size()) {
    throw std::invalid_argument("feature and column counts differ");
  }
  std::set<std::string_view> names;
  for (const auto& f : features_) {
    if (f.name.empty()) throw DataError("empty feature name");
    if (!names.insert(f.name).second) throw DataError("duplicate feature name '" + f.name + "'");
  }
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].size() != n_rows_) {
      throw DataError("column '" + features_[i].name + "' has " +
                      std::to_string(columns_[i].size()) + " rows, expected " +
                      std::to_string(n_rows_));
    }
    check_column(features_[i], columns_[i]);
  }
}

const FeatureMeta& Dataset::feature(std::string_view name) const {
  return features_[index_of(name)];
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw UnknownFeatureError(std::string(name));
}

Dataset Dataset::with_column(FeatureMeta meta, Column values) const {
  auto features = features_;
  auto columns = columns_;
  features.push_back(std::move(meta));
  columns.push_back(std::move(values));
  return Dataset(std::move(features), std::move(columns));
}

Dataset Dataset::with_replaced_column(std::string_view name, Column values) const {
  return with_replaced_column(name, feature(name), std::move(values));
}

Dataset Dataset::with_replaced_column(std::string_view name, FeatureMeta meta,
                                      Column values) const {
  const std::size_t i = index_of(name);
  auto features = features_;
  auto columns = columns_;
  features[i] = std::move(meta);
  columns[i] = std::move(values);
  return Dataset(std::move(features), std::move(columns));
}

Dataset Dataset::with_meta(std::string_view name, FeatureMeta meta) const {
  return with_replaced_column(name, std::move(meta), columns_[index_of(name)]);
}

Dataset Dataset::with_role(std::string_view name, FeatureRole role) const {
  FeatureMeta meta = feature(name);
  meta.role = role;
  return with_meta(name, std::move(meta));
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> columns(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    columns[c].reserve(rows.size());
    for (std::size_t r : rows) {
      if (r >= n_rows_) throw std::out_of_range("row index out of range");
      columns[c].push_back(columns_[c][r]);
    }
  }
  Dataset out;
  out.features_ = features_;
  out.columns_ = std::move(columns);
  out.n_rows_ = rows.size();
  return out;
}

std::vector<double> Dataset::present_values(std::string_view name) const {
  const Column& col = column(name);
  std::vector<double> out;
  out.reserve(col.size());
  for (const Cell& c : col) {
    if (const double* v = number_if(c)) out.push_back(*v);
  }
  return out;
}

Dataset parse_csv(std::string_view text, const MetaOverrides& meta) {
  const csv::Table table = csv::parse(text);
  {
    std::set<std::string_view> seen;
    for (const auto& h : table.header) {
      if (!seen.insert(h).second) throw DataError("duplicate header name '" + h + "'");
    }
  }
  for (const auto& [name, _] : meta) {
    if (std::find(table.header.begin(), table.header.end(), name) == table.header.end()) {
      throw UnknownFeatureError("metadata override for unknown feature '" + name + "'", name);
    }
  }

  std::vector<FeatureMeta> features;
  std::vector<Column> columns;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    std::vector<std::optional<double>> parsed(table.rows.size());
    bool all_numeric = true;
    bool all_binary = true;
    bool any_present = false;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string& raw = table.rows[r][c];
      if (raw.empty()) continue;
      any_present = true;
      parsed[r] = parse_number(raw);
      if (!parsed[r]) {
        all_numeric = false;
      } else if (*parsed[r] != 0.0 && *parsed[r] != 1.0) {
        all_binary = false;
      }
    }

    FeatureMeta fm;
    fm.name = table.header[c];
    fm.kind = !all_numeric                ? FeatureKind::categorical
              : (all_binary && any_present) ? FeatureKind::binary
                                            : FeatureKind::numeric;
    if (auto it = meta.find(fm.name); it != meta.end()) {
      const FeatureOverride& o = it->second;
      if (o.kind) fm.kind = *o.kind;
      if (o.unit) fm.unit = *o.unit;
      if (o.role) fm.role = *o.role;
      if (o.ontology_uri) fm.ontology_uri = o.ontology_uri;
    }

    Column col;
    col.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string& raw = table.rows[r][c];
      if (raw.empty()) {
        col.emplace_back(Missing{});
      } else if (fm.kind == FeatureKind::categorical) {
        col.emplace_back(raw);
      } else if (parsed[r]) {
        col.emplace_back(*parsed[r]);
      } else {
        throw DataError("feature '" + fm.name + "' declared " + std::string(to_string(fm.kind)) +
                            " but row holds '" + raw + "'",
                        r);
      }
    }
    features.push_back(std::move(fm));
    columns.push_back(std::move(col));
  }
  if (features.empty()) throw DataError("header row has no columns");
  return Dataset(std::move(features), std::move(columns));
}

Dataset load_csv(const std::filesystem::path& path, const MetaOverrides& meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_csv(text, meta);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("sample std needs at least two values");
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

const FeatureStats& DescriptiveStats::at(std::string_view name) const {
  for (const auto& f : features) {
    if (f.name == name) return f;
  }
  throw UnknownFeatureError(std::string(name));
}

DescriptiveStats descriptive_stats(const Dataset& d) {
  DescriptiveStats out;
  for (std::size_t c = 0; c < d.n_features(); ++c) {
    const FeatureMeta& meta = d.feature(c);
    const Column& col = d.column(c);
    FeatureStats fs;
    fs.name = meta.name;
    fs.kind = meta.kind;
    fs.count = d.n_rows();
    for (const Cell& cell : col) {
      if (!is_missing(cell)) ++fs.present;
    }
    fs.missing_fraction =
        d.n_rows() == 0 ? 0.0
                        : static_cast<double>(d.n_rows() - fs.present) / static_cast<double>(d.n_rows());
    if (meta.kind != FeatureKind::categorical && fs.present > 0) {
      std::vector<double> values = d.present_values(meta.name);
      // Summation over sorted values keeps the result independent of row order.
      std::sort(values.begin(), values.end());
      fs.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());
      if (values.size() >= 2) fs.std = sample_std(values);
      fs.min = values.front();
      fs.max = values.back();
      fs.q25 = quantile_sorted(values, 0.25);
      fs.median = quantile_sorted(values, 0.5);
      fs.q75 = quantile_sorted(values, 0.75);
    }
    out.features.push_back(std::move(fs));
  }
  return out;
}

Dataset mark_missing_zeros(const Dataset& d, std::span<const std::string> features) {
  Dataset out = d;
  for (const std::string& name : features) {
    const FeatureMeta& meta = d.feature(name);
    if (meta.kind == FeatureKind::categorical) {
      throw std::invalid_argument("mark_missing_zeros: feature '" + name + "' is not numeric");
    }
    Column col = out.column(name);
    bool changed = false;
    for (Cell& cell : col) {
      if (const double* v = number_if(cell); v && *v == 0.0) {
        cell = Missing{};
        changed = true;
      }
    }
    if (changed) out = out.with_replaced_column(name, std::move(col));
  }
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitFractions& f) {
  const std::array<double, 3> fr{f.train, f.validation, f.test};
  for (double x : fr) {
    if (!(x > 0.0)) throw std::invalid_argument("split fractions must be positive");
  }
  if (std::abs(fr[0] + fr[1] + fr[2] - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = fr[i] * static_cast<double>(n);
    // Guard against 0.25 * 768 evaluating to 191.99999...
    const double floored = std::floor(exact + 1e-9);
    sizes[i] = static_cast<std::size_t>(floored);
    remainder[i] = exact - floored;
    assigned += sizes[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

DatasetSplit split(const Dataset& d, const SplitFractions& fractions, std::uint64_t seed) {
  const auto sizes = split_sizes(d.n_rows(), fractions);
  std::vector<std::size_t> idx = iota_indices(d.n_rows());
  Rng rng(seed);
  rng.shuffle(idx);

  DatasetSplit out;
  auto take = [&](std::size_t begin, std::size_t count) {
    std::vector<std::size_t> part(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                                  idx.begin() + static_cast<std::ptrdiff_t>(begin + count));
    std::sort(part.begin(), part.end());
    return part;
  };
  out.train_rows = take(0, sizes[0]);
  out.validation_rows = take(sizes[0], sizes[1]);
  out.test_rows = take(sizes[0] + sizes[1], sizes[2]);
  out.train = d.select_rows(out.train_rows);
  out.validation = d.select_rows(out.validation_rows);
  out.test = d.select_rows(out.test_rows);
  return out;
}

}  // namespace cmml
