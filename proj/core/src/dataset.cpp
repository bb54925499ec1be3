#include "comindex/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "comindex/csv.hpp"
#include "comindex/error.hpp"

namespace comindex {
namespace {

constexpr double kMinStdDev = 1e-12;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool is_missing(std::string_view cell) {
  cell = trim(cell);
  return cell.empty() || cell == "NA";
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.starts_with('+')) cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Range>
void require_unique(const Range& names, const char* what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      throw ValidationError(std::string("duplicate ") + what + ": " + n);
    }
  }
}

StandardizedMatrix standardize_impl(const IndicatorDataset& ds,
                                    std::span<const std::size_t> rows) {
  const std::size_t n = rows.size();
  const std::size_t p = ds.n_variables();
  if (n < 2) throw ValidationError("standardize: need at least 2 cases");
  StandardizedMatrix out{Matrix(n, p), std::vector<double>(p), std::vector<double>(p)};
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t r : rows) mean += ds.values()(r, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r : rows) {
      const double d = ds.values()(r, j) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > kMinStdDev)) {
      throw ValidationError("zero variance: " + ds.indicator_names()[j]);
    }
    out.column_means[j] = mean;
    out.column_sds[j] = sd;
    for (std::size_t i = 0; i < n; ++i) {
      out.values(i, j) = (ds.values()(rows[i], j) - mean) / sd;
    }
  }
  return out;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

IndicatorDataset::IndicatorDataset(std::vector<std::string> case_ids,
                                   std::vector<std::string> indicator_names,
                                   Matrix values,
                                   std::vector<std::optional<IndicatorTag>> tags)
    : case_ids_(std::move(case_ids)),
      indicator_names_(std::move(indicator_names)),
      values_(std::move(values)),
      tags_(std::move(tags)) {
  if (case_ids_.size() < 3) {
    throw ValidationError("dataset needs at least 3 cases, got " +
                          std::to_string(case_ids_.size()));
  }
  if (indicator_names_.size() < 2) {
    throw ValidationError("dataset needs at least 2 indicators, got " +
                          std::to_string(indicator_names_.size()));
  }
  if (values_.rows() != case_ids_.size() || values_.cols() != indicator_names_.size()) {
    throw ValidationError("dataset value matrix does not match ids and names");
  }
  require_unique(case_ids_, "case id");
  require_unique(indicator_names_, "indicator name");
  for (double v : values_.values()) {
    if (!std::isfinite(v)) throw ValidationError("dataset contains a non-finite value");
  }
  if (tags_.empty()) tags_.resize(indicator_names_.size());
  if (tags_.size() != indicator_names_.size()) {
    throw ValidationError("dataset tag count does not match indicator count");
  }
}

std::optional<std::size_t> IndicatorDataset::case_index(const std::string& id) const {
  auto it = std::find(case_ids_.begin(), case_ids_.end(), id);
  if (it == case_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - case_ids_.begin());
}

std::optional<std::size_t> IndicatorDataset::variable_index(const std::string& name) const {
  auto it = std::find(indicator_names_.begin(), indicator_names_.end(), name);
  if (it == indicator_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - indicator_names_.begin());
}

std::vector<double> IndicatorDataset::column(std::size_t variable,
                                             std::span<const std::size_t> rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(values_(r, variable));
  return out;
}

LoadedDataset parse_csv_dataset(const std::string& text, const CsvLoadOptions& options) {
  const std::vector<csv::Row> rows = csv::parse(text);
  if (rows.empty()) throw ValidationError("CSV input is empty");
  const csv::Row& header = rows.front();

  std::size_t id_col = 0;
  if (!options.id_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.id_column);
    if (it == header.end()) {
      throw ValidationError("id column '" + options.id_column + "' not found in header");
    }
    id_col = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::string> names;
  std::vector<std::size_t> value_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == id_col) continue;
    names.emplace_back(trim(header[c]));
    value_cols.push_back(c);
  }

  std::vector<std::string> ids;
  std::vector<double> values;
  std::vector<std::string> dropped;
  std::set<std::string> seen_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    const std::size_t line = r + 1;  // header is row 1
    if (row.size() != header.size()) {
      throw ValidationError("row " + std::to_string(line) + " has " +
                            std::to_string(row.size()) + " fields, header has " +
                            std::to_string(header.size()));
    }
    std::string id(trim(row[id_col]));
    if (id.empty()) throw ValidationError("row " + std::to_string(line) + ": empty case id");
    if (!seen_ids.insert(id).second) throw ValidationError("duplicate case id: " + id);

    std::vector<double> parsed;
    parsed.reserve(value_cols.size());
    bool has_missing = false;
    for (std::size_t k = 0; k < value_cols.size(); ++k) {
      const std::string& cell = row[value_cols[k]];
      if (is_missing(cell)) {
        if (options.missing == MissingPolicy::kError) {
          throw ValidationError("missing value at row " + std::to_string(line) +
                                ", column \"" + names[k] + "\"");
        }
        has_missing = true;
        parsed.push_back(0.0);
        continue;
      }
      auto v = parse_number(cell);
      if (!v) {
        throw ValidationError("non-numeric value \"" + cell + "\" at row " +
                              std::to_string(line) + ", column \"" + names[k] + "\"");
      }
      parsed.push_back(*v);
    }
    if (has_missing) {
      dropped.push_back(id);
      continue;
    }
    ids.push_back(std::move(id));
    values.insert(values.end(), parsed.begin(), parsed.end());
  }

  if (ids.size() < 3) {
    std::string msg = "need at least 3 complete cases, got " + std::to_string(ids.size());
    if (!dropped.empty()) {
      msg += " after listwise deletion of " + std::to_string(dropped.size());
    }
    throw ValidationError(msg);
  }
  const std::size_t n = ids.size();
  const std::size_t p = names.size();
  LoadedDataset out{
      IndicatorDataset(std::move(ids), std::move(names), Matrix(n, p, std::move(values))),
      {}};
  if (!dropped.empty()) {
    std::string msg = "listwise deletion dropped " + std::to_string(dropped.size()) +
                      " case(s) with missing values:";
    for (const auto& id : dropped) msg += " " + id;
    out.warnings.push_back(std::move(msg));
  }
  return out;
}

LoadedDataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& options) {
  return parse_csv_dataset(read_file(path), options);
}

IndicatorDataset attach_metadata(const IndicatorDataset& ds,
                                 const std::filesystem::path& path) {
  const std::vector<csv::Row> rows = csv::parse(read_file(path));
  if (rows.empty()) throw ValidationError("metadata file is empty: " + path.string());
  std::vector<std::optional<IndicatorTag>> tags = ds.tags();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    if (row.size() < 2) {
      throw ValidationError("metadata row " + std::to_string(r + 1) +
                            " needs indicator,theme[,subtheme]");
    }
    const std::string name(trim(row[0]));
    auto idx = ds.variable_index(name);
    if (!idx) {
      throw ValidationError("metadata names unknown indicator '" + name +
                            "' (did you mean '" +
                            nearest_match(name, ds.indicator_names()) + "'?)");
    }
    tags[*idx] = IndicatorTag{std::string(trim(row[1])),
                              row.size() > 2 ? std::string(trim(row[2])) : std::string()};
  }
  return IndicatorDataset(ds.case_ids(), ds.indicator_names(), ds.values(), std::move(tags));
}

StandardizedMatrix standardize(const IndicatorDataset& ds) {
  std::vector<std::size_t> rows(ds.n_cases());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return standardize_impl(ds, rows);
}

StandardizedMatrix standardize_rows(const IndicatorDataset& ds,
                                    std::span<const std::size_t> rows) {
  for (std::size_t r : rows) {
    if (r >= ds.n_cases()) throw ValidationError("standardize_rows: row out of range");
  }
  return standardize_impl(ds, rows);
}

IndicatorDataset select_variables(const IndicatorDataset& ds,
                                  std::span<const std::string> names) {
  std::vector<std::size_t> cols;
  cols.reserve(names.size());
  for (const auto& name : names) {
    auto idx = ds.variable_index(name);
    if (!idx) {
      throw ValidationError("unknown variable '" + name + "' (did you mean '" +
                            nearest_match(name, ds.indicator_names()) + "'?)");
    }
    cols.push_back(*idx);
  }
  if (cols.empty()) throw ValidationError("select_variables: no variables requested");
  Matrix values(ds.n_cases(), cols.size());
  std::vector<std::optional<IndicatorTag>> tags;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    tags.push_back(ds.tags()[cols[k]]);
    for (std::size_t i = 0; i < ds.n_cases(); ++i) values(i, k) = ds.values()(i, cols[k]);
  }
  return IndicatorDataset(ds.case_ids(), std::vector<std::string>(names.begin(), names.end()),
                          std::move(values), std::move(tags));
}

std::string nearest_match(const std::string& name, std::span<const std::string> candidates) {
  std::string best;
  std::size_t best_distance = std::string::npos;
  for (const auto& c : candidates) {
    const std::size_t d = edit_distance(name, c);
    if (d < best_distance) {
      best_distance = d;
      best = c;
    }
  }
  return best;
}

}  // namespace comindex
