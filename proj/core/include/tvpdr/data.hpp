#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tvpdr/model.hpp"

namespace tvpdr {

/// Calendar quarter, written YYYYQn.
struct Quarter {
  int year = 0;
  int quarter = 1;

  static Quarter parse(std::string_view label);
  std::string to_string() const;
  long index() const { return long(year) * 4 + (quarter - 1); }
  Quarter next() const;
  friend auto operator<=>(const Quarter& a, const Quarter& b) { return a.index() <=> b.index(); }
  friend bool operator==(const Quarter& a, const Quarter& b) = default;
};

/// Inclusive quarter span parsed from "YYYYQn:YYYYQn".
struct QuarterRange {
  Quarter first;
  Quarter last;
  static QuarterRange parse(std::string_view text);
  bool contains(const Quarter& q) const { return first <= q && q <= last; }
};

/// Transformation codes: 1 none, 2 first difference, 3 second difference,
/// 4 log, 5 log first difference, 6 log second difference.
enum class TransformCode : int { level = 1, diff = 2, diff2 = 3, log = 4, logdiff = 5, logdiff2 = 6 };

TransformCode transform_code_from_int(int code);
std::size_t transform_drop(TransformCode code);

/// Applies one transformation; leading entries lost to differencing are dropped.
/// Missing values (NaN) propagate. Log codes reject non-positive values.
std::vector<double> apply_transform(std::span<const double> series, TransformCode code);

/// pi_t = (400 / h) ln(P_t / P_{t-h}); the first h entries are dropped.
std::vector<double> inflation(std::span<const double> prices, unsigned horizon);

using Schema = std::vector<std::pair<std::string, TransformCode>>;

/// Lines `name=<code 1-6>`; blank lines and lines starting with '#' are skipped.
Schema parse_schema(std::istream& in);
Schema load_schema(const std::filesystem::path& path);

/// Quarterly series on a gap-free date index. Missing cells are NaN.
class MacroDataset {
 public:
  const std::vector<Quarter>& dates() const noexcept { return dates_; }
  std::size_t size() const noexcept { return dates_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  bool has(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
  TransformCode code(const std::string& name) const;
  std::optional<std::size_t> find_date(const Quarter& q) const;

  void set_dates(std::vector<Quarter> dates);
  /// Adds or replaces a column; must match the date count.
  void set_column(const std::string& name, std::vector<double> values,
                  TransformCode code = TransformCode::level);

  friend bool operator==(const MacroDataset&, const MacroDataset&) = default;

 private:
  std::vector<Quarter> dates_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::vector<TransformCode> codes_;
};

/// CSV with header `date,<name>,...`. Schema codes are attached to the named
/// columns; columns not in the schema keep code 1.
MacroDataset parse_csv(std::istream& in, const Schema& schema);
MacroDataset load_csv(const std::filesystem::path& path, const Schema& schema);

/// Every column transformed by its code and re-aligned to the dates (dropped
/// leading entries become missing). Codes are reset to 1 afterwards.
MacroDataset apply_schema_transforms(const MacroDataset& raw);

/// Adds `name` = a - b element-wise (e.g. unemployment gap u - u*).
MacroDataset with_difference(const MacroDataset& data, const std::string& name,
                             const std::string& a, const std::string& b);

/// Adds `name` = h-period annualized inflation computed from a price column.
MacroDataset with_inflation(const MacroDataset& data, const std::string& name,
                            const std::string& price, unsigned horizon);

/// Copy with `variable` shifted by delta on the quarters in `range`.
MacroDataset counterfactual_shift(const MacroDataset& data, const std::string& variable,
                                  double delta, const QuarterRange& range);

/// Aligned regression rows: covariates dated t (intercept first) against the
/// target dated t + h.
struct DesignProblem {
  std::vector<Quarter> dates;         ///< covariate date t of each row
  std::vector<Quarter> target_dates;  ///< t + h
  std::vector<std::string> columns;   ///< "intercept", covariates...
  std::vector<double> outcome;
  std::vector<double> rows;           ///< periods x columns
  /// Latest covariate row with all covariates observed, for forecasting.
  std::optional<Quarter> next_date;
  std::vector<double> next_row;

  std::size_t periods() const { return outcome.size(); }
  std::size_t width() const { return columns.size(); }
  std::span<const double> row(std::size_t r) const { return {rows.data() + r * width(), width()}; }
  std::optional<std::size_t> find_date(const Quarter& q) const;
  RegressionData regression() const;
  /// Rows [first, last] as a new problem.
  DesignProblem slice(std::size_t first, std::size_t last) const;
};

DesignProblem assemble_design(const MacroDataset& data, const std::string& target,
                              const std::vector<std::string>& covariates, unsigned horizon);

}  // namespace tvpdr
