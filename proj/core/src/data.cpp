#include "tvpdr/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "tvpdr/error.hpp"
#include "tvpdr/format.hpp"

namespace tvpdr {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
}

Quarter Quarter::parse(std::string_view label) {
  label = trim(label);
  if (label.size() != 6 || (label[4] != 'Q' && label[4] != 'q') ||
      !std::all_of(label.begin(), label.begin() + 4, [](char c) { return c >= '0' && c <= '9'; }) ||
      label[5] < '1' || label[5] > '4') {
    throw DataError("malformed quarter label '" + std::string(label) + "' (expected YYYYQn)");
  }
  Quarter q;
  q.year = std::stoi(std::string(label.substr(0, 4)));
  q.quarter = label[5] - '0';
  return q;
}

std::string Quarter::to_string() const {
  std::ostringstream os;
  os << year << 'Q' << quarter;
  return os.str();
}

Quarter Quarter::next() const {
  return quarter == 4 ? Quarter{year + 1, 1} : Quarter{year, quarter + 1};
}

QuarterRange QuarterRange::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw DataError("quarter range must look like 2021Q1:2021Q4");
  QuarterRange r{Quarter::parse(parts[0]), Quarter::parse(parts[1])};
  if (r.last < r.first) throw DataError("quarter range is empty: " + std::string(text));
  return r;
}

TransformCode transform_code_from_int(int code) {
  if (code < 1 || code > 6) throw DataError("transform code must be 1-6, got " + std::to_string(code));
  return static_cast<TransformCode>(code);
}

std::size_t transform_drop(TransformCode code) {
  switch (code) {
    case TransformCode::diff:
    case TransformCode::logdiff:
      return 1;
    case TransformCode::diff2:
    case TransformCode::logdiff2:
      return 2;
    default:
      return 0;
  }
}

std::vector<double> apply_transform(std::span<const double> series, TransformCode code) {
  const bool uses_log = code == TransformCode::log || code == TransformCode::logdiff ||
                        code == TransformCode::logdiff2;
  std::vector<double> x(series.begin(), series.end());
  if (uses_log) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::isnan(x[i])) continue;
      if (!(x[i] > 0.0)) {
        throw DataError("log transform of non-positive value " + format_number(x[i]) +
                        " at index " + std::to_string(i));
      }
      x[i] = std::log(x[i]);
    }
  }
  auto difference = [](const std::vector<double>& v) {
    std::vector<double> out;
    for (std::size_t i = 1; i < v.size(); ++i) out.push_back(v[i] - v[i - 1]);
    return out;
  };
  switch (code) {
    case TransformCode::level:
    case TransformCode::log:
      return x;
    case TransformCode::diff:
    case TransformCode::logdiff:
      return difference(x);
    case TransformCode::diff2:
    case TransformCode::logdiff2:
      return difference(difference(x));
  }
  return x;
}

std::vector<double> inflation(std::span<const double> prices, unsigned horizon) {
  if (horizon == 0) throw DataError("inflation horizon must be positive");
  if (prices.size() <= horizon) throw DataError("price series shorter than the horizon");
  std::vector<double> out;
  out.reserve(prices.size() - horizon);
  const double scale = 400.0 / double(horizon);
  for (std::size_t t = horizon; t < prices.size(); ++t) {
    const double now = prices[t];
    const double then = prices[t - horizon];
    if (std::isnan(now) || std::isnan(then)) {
      out.push_back(kMissing);
      continue;
    }
    if (!(now > 0.0) || !(then > 0.0)) {
      throw DataError("non-positive price at index " + std::to_string(now > 0.0 ? t - horizon : t));
    }
    out.push_back(scale * std::log(now / then));
  }
  return out;
}

Schema parse_schema(std::istream& in) {
  Schema schema;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("schema line " + std::to_string(lineno) + ": expected name=<code>");
    }
    const std::string name(trim(text.substr(0, eq)));
    int code = 0;
    try {
      code = static_cast<int>(parse_number(text.substr(eq + 1)));
    } catch (const std::invalid_argument&) {
      throw DataError("schema line " + std::to_string(lineno) + ": code is not a number");
    }
    if (!seen.insert(name).second) throw DataError("schema lists '" + name + "' twice");
    schema.emplace_back(name, transform_code_from_int(code));
  }
  return schema;
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file " + path.string());
  return parse_schema(in);
}

bool MacroDataset::has(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& MacroDataset::column(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DataError("unknown series '" + name + "'");
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

TransformCode MacroDataset::code(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DataError("unknown series '" + name + "'");
  return codes_[static_cast<std::size_t>(it - names_.begin())];
}

std::optional<std::size_t> MacroDataset::find_date(const Quarter& q) const {
  if (dates_.empty()) return std::nullopt;
  const long offset = q.index() - dates_.front().index();
  if (offset < 0 || offset >= long(dates_.size())) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

void MacroDataset::set_dates(std::vector<Quarter> dates) {
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw DataError("dates not strictly increasing at row " + std::to_string(i + 1) + " (" +
                      dates[i].to_string() + ")");
    }
    if (dates[i].index() != dates[i - 1].index() + 1) {
      throw DataError("gap in quarterly dates before " + dates[i].to_string());
    }
  }
  dates_ = std::move(dates);
  for (auto& c : columns_) c.resize(dates_.size(), kMissing);
}

void MacroDataset::set_column(const std::string& name, std::vector<double> values,
                              TransformCode code) {
  if (values.size() != dates_.size()) {
    throw DataError("column '" + name + "' has " + std::to_string(values.size()) +
                    " values for " + std::to_string(dates_.size()) + " dates");
  }
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it != names_.end()) {
    const auto i = static_cast<std::size_t>(it - names_.begin());
    columns_[i] = std::move(values);
    codes_[i] = code;
    return;
  }
  names_.push_back(name);
  columns_.push_back(std::move(values));
  codes_.push_back(code);
}

MacroDataset parse_csv(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV is empty (header row required)");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
  const auto header = split(trim(line), ',');
  if (header.empty() || trim(header[0]) != "date") {
    throw DataError("CSV header must start with 'date'");
  }
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < header.size(); ++i) {
    std::string name(trim(header[i]));
    if (name.empty()) throw DataError("CSV header has an empty column name");
    if (!seen.insert(name).second) throw DataError("duplicate column '" + name + "'");
    names.push_back(std::move(name));
  }
  for (const auto& [name, code] : schema) {
    if (!seen.count(name)) throw DataError("schema references absent column '" + name + "'");
  }

  std::vector<Quarter> dates;
  std::vector<std::vector<double>> cols(names.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    }
    const Quarter q = Quarter::parse(cells[0]);
    if (!dates.empty() && !(dates.back() < q)) {
      throw DataError("row " + std::to_string(row) + ": date " + q.to_string() +
                      " is not after " + dates.back().to_string());
    }
    dates.push_back(q);
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto cell = trim(cells[i + 1]);
      if (cell.empty()) {
        cols[i].push_back(kMissing);
        continue;
      }
      try {
        cols[i].push_back(parse_number(cell));
      } catch (const std::invalid_argument&) {
        throw DataError("row " + std::to_string(row) + ", column '" + names[i] +
                        "': non-numeric cell '" + std::string(cell) + "'");
      }
    }
  }

  MacroDataset data;
  data.set_dates(std::move(dates));
  for (std::size_t i = 0; i < names.size(); ++i) {
    TransformCode code = TransformCode::level;
    for (const auto& [n, c] : schema) {
      if (n == names[i]) code = c;
    }
    data.set_column(names[i], std::move(cols[i]), code);
  }
  return data;
}

MacroDataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file " + path.string());
  return parse_csv(in, schema);
}

MacroDataset apply_schema_transforms(const MacroDataset& raw) {
  MacroDataset out;
  out.set_dates(raw.dates());
  for (const auto& name : raw.names()) {
    const TransformCode code = raw.code(name);
    std::vector<double> t;
    try {
      t = apply_transform(raw.column(name), code);
    } catch (const DataError& e) {
      throw DataError("series '" + name + "': " + e.what());
    }
    std::vector<double> aligned(raw.size(), kMissing);
    const std::size_t drop = raw.size() - t.size();
    std::copy(t.begin(), t.end(), aligned.begin() + static_cast<std::ptrdiff_t>(drop));
    out.set_column(name, std::move(aligned));
  }
  return out;
}

MacroDataset with_difference(const MacroDataset& data, const std::string& name,
                             const std::string& a, const std::string& b) {
  const auto& x = data.column(a);
  const auto& y = data.column(b);
  std::vector<double> diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
  MacroDataset out = data;
  out.set_column(name, std::move(diff));
  return out;
}

MacroDataset with_inflation(const MacroDataset& data, const std::string& name,
                            const std::string& price, unsigned horizon) {
  const auto pi = inflation(data.column(price), horizon);
  std::vector<double> aligned(data.size(), kMissing);
  std::copy(pi.begin(), pi.end(), aligned.begin() + horizon);
  MacroDataset out = data;
  out.set_column(name, std::move(aligned));
  return out;
}

MacroDataset counterfactual_shift(const MacroDataset& data, const std::string& variable,
                                  double delta, const QuarterRange& range) {
  if (!data.has(variable)) throw DataError("unknown counterfactual variable '" + variable + "'");
  std::vector<double> values = data.column(variable);
  std::size_t touched = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!range.contains(data.dates()[i])) continue;
    ++touched;
    if (delta != 0.0) values[i] += delta;
  }
  if (touched == 0) {
    throw DataError("counterfactual range " + range.first.to_string() + ":" +
                    range.last.to_string() + " has no quarters in the sample");
  }
  MacroDataset out = data;
  out.set_column(variable, std::move(values), data.code(variable));
  return out;
}

std::optional<std::size_t> DesignProblem::find_date(const Quarter& q) const {
  const auto it = std::find(dates.begin(), dates.end(), q);
  if (it == dates.end()) return std::nullopt;
  return static_cast<std::size_t>(it - dates.begin());
}

RegressionData DesignProblem::regression() const {
  RegressionData r;
  r.outcome = outcome;
  r.covariates = rows;
  r.periods = periods();
  r.raw_columns = width();
  return r;
}

DesignProblem DesignProblem::slice(std::size_t first, std::size_t last) const {
  if (first > last || last >= periods()) throw DimensionError("design slice out of range");
  DesignProblem out;
  out.columns = columns;
  const auto b = static_cast<std::ptrdiff_t>(first);
  const auto e = static_cast<std::ptrdiff_t>(last + 1);
  out.dates.assign(dates.begin() + b, dates.begin() + e);
  out.target_dates.assign(target_dates.begin() + b, target_dates.begin() + e);
  out.outcome.assign(outcome.begin() + b, outcome.begin() + e);
  const auto w = static_cast<std::ptrdiff_t>(width());
  out.rows.assign(rows.begin() + b * w, rows.begin() + e * w);
  return out;
}

DesignProblem assemble_design(const MacroDataset& data, const std::string& target,
                              const std::vector<std::string>& covariates, unsigned horizon) {
  const auto& y = data.column(target);
  std::vector<const std::vector<double>*> xs;
  for (const auto& name : covariates) xs.push_back(&data.column(name));

  DesignProblem p;
  p.columns.push_back("intercept");
  p.columns.insert(p.columns.end(), covariates.begin(), covariates.end());
  auto covariates_complete = [&](std::size_t t) {
    return std::none_of(xs.begin(), xs.end(), [t](const auto* c) { return std::isnan((*c)[t]); });
  };
  for (std::size_t t = 0; t < data.size(); ++t) {
    if (!covariates_complete(t)) continue;
    const std::size_t target_at = t + horizon;
    if (target_at < data.size() && !std::isnan(y[target_at])) {
      p.dates.push_back(data.dates()[t]);
      p.target_dates.push_back(data.dates()[target_at]);
      p.outcome.push_back(y[target_at]);
      p.rows.push_back(1.0);
      for (const auto* c : xs) p.rows.push_back((*c)[t]);
    }
    p.next_date = data.dates()[t];
    p.next_row.assign(1, 1.0);
    for (const auto* c : xs) p.next_row.push_back((*c)[t]);
  }
  if (p.outcome.empty()) {
    throw DataError("no complete rows after aligning '" + target + "' with the covariates");
  }
  return p;
}

}  // namespace tvpdr
