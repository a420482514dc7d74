#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace cmml {

enum class FeatureKind { numeric, categorical, binary };
enum class FeatureRole { input, target, derived, excluded };

std::string_view to_string(FeatureKind kind);
std::string_view to_string(FeatureRole role);
FeatureKind parse_feature_kind(std::string_view text);
FeatureRole parse_feature_role(std::string_view text);

struct FeatureMeta {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::string unit;
  FeatureRole role = FeatureRole::input;
  std::optional<std::string> ontology_uri;

  bool operator==(const FeatureMeta&) const = default;
};

struct Missing {
  bool operator==(const Missing&) const = default;
};

// A cell is numeric, a categorical token, or MISSING. Zero is an ordinary
// numeric value; absence is a distinct state.
using Cell = std::variant<Missing, double, std::string>;
using Column = std::vector<Cell>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }
inline const double* number_if(const Cell& c) { return std::get_if<double>(&c); }
std::string cell_text(const Cell& c);

// Immutable column-oriented table. Every transform returns a new Dataset.
class Dataset {
 public:
  Dataset() = default;
  // Validates: unique names, equal column lengths, binary columns in {0,1,MISSING},
  // numeric columns hold no tokens, categorical columns hold no numbers.
  Dataset(std::vector<FeatureMeta> features, std::vector<Column> columns);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_features() const noexcept { return features_.size(); }

  const std::vector<FeatureMeta>& features() const noexcept { return features_; }
  const FeatureMeta& feature(std::size_t index) const { return features_.at(index); }
  const FeatureMeta& feature(std::string_view name) const;

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws UnknownFeatureError.
  std::size_t index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }

  const Column& column(std::size_t index) const { return columns_.at(index); }
  const Column& column(std::string_view name) const { return columns_[index_of(name)]; }
  const Cell& at(std::size_t row, std::size_t col) const { return columns_[col][row]; }

  Dataset with_column(FeatureMeta meta, Column values) const;
  Dataset with_replaced_column(std::string_view name, Column values) const;
  Dataset with_replaced_column(std::string_view name, FeatureMeta meta, Column values) const;
  Dataset with_meta(std::string_view name, FeatureMeta meta) const;
  Dataset with_role(std::string_view name, FeatureRole role) const;
  Dataset select_rows(std::span<const std::size_t> rows) const;

  // Non-missing numeric values of a column, row order preserved.
  std::vector<double> present_values(std::string_view name) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<FeatureMeta> features_;
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

struct FeatureOverride {
  std::optional<FeatureKind> kind;
  std::optional<std::string> unit;
  std::optional<FeatureRole> role;
  std::optional<std::string> ontology_uri;
};
using MetaOverrides = std::map<std::string, FeatureOverride, std::less<>>;

// Header row required. Cells parse as numbers where the whole column does,
// otherwise the column is categorical. Empty field → MISSING. A numeric column
// whose present values are all 0/1 is inferred binary.
Dataset load_csv(const std::filesystem::path& path, const MetaOverrides& meta = {});
Dataset parse_csv(std::string_view text, const MetaOverrides& meta = {});

struct FeatureStats {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::size_t count = 0;    // total rows, missing included
  std::size_t present = 0;  // non-missing rows
  double missing_fraction = 0.0;
  // Undefined (nullopt) for categorical features and when too few values.
  std::optional<double> mean, std, min, q25, median, q75, max;
};

struct DescriptiveStats {
  std::vector<FeatureStats> features;
  const FeatureStats& at(std::string_view name) const;
};

DescriptiveStats descriptive_stats(const Dataset& d);

// Linear interpolation between order statistics; `sorted` must be ascending
// and non-empty, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);
double sample_std(std::span<const double> values);

Dataset mark_missing_zeros(const Dataset& d, std::span<const std::string> features);

struct SplitFractions {
  double train = 0.5;
  double validation = 0.25;
  double test = 0.25;
};

struct DatasetSplit {
  Dataset train, validation, test;
  std::vector<std::size_t> train_rows, validation_rows, test_rows;
};

// Row counts per part by largest-remainder apportionment of n.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitFractions& fractions);
DatasetSplit split(const Dataset& d, const SplitFractions& fractions, std::uint64_t seed);

}  // namespace cmml
