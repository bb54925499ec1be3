#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "comindex/matrix.hpp"

namespace comindex {

struct IndicatorTag {
  std::string theme;
  std::string subtheme;

  friend bool operator==(const IndicatorTag&, const IndicatorTag&) = default;
};

// Cases x indicators table. Immutable once built; the constructor checks
// shape, uniqueness of ids and names, and finiteness.
class IndicatorDataset {
 public:
  IndicatorDataset(std::vector<std::string> case_ids,
                   std::vector<std::string> indicator_names, Matrix values,
                   std::vector<std::optional<IndicatorTag>> tags = {});

  std::size_t n_cases() const noexcept { return case_ids_.size(); }
  std::size_t n_variables() const noexcept { return indicator_names_.size(); }

  const std::vector<std::string>& case_ids() const noexcept { return case_ids_; }
  const std::vector<std::string>& indicator_names() const noexcept {
    return indicator_names_;
  }
  const Matrix& values() const noexcept { return values_; }
  const std::vector<std::optional<IndicatorTag>>& tags() const noexcept { return tags_; }

  std::optional<std::size_t> case_index(const std::string& id) const;
  std::optional<std::size_t> variable_index(const std::string& name) const;

  // Values of one indicator for the listed case rows.
  std::vector<double> column(std::size_t variable,
                             std::span<const std::size_t> rows) const;

  friend bool operator==(const IndicatorDataset&, const IndicatorDataset&) = default;

 private:
  std::vector<std::string> case_ids_;
  std::vector<std::string> indicator_names_;
  Matrix values_;
  std::vector<std::optional<IndicatorTag>> tags_;
};

struct StandardizedMatrix {
  Matrix values;                     // z-scores
  std::vector<double> column_means;  // original units
  std::vector<double> column_sds;    // sample (n - 1) definition
};

enum class MissingPolicy { kError, kListwise };

struct CsvLoadOptions {
  std::string id_column;  // empty: first column
  MissingPolicy missing = MissingPolicy::kError;
};

struct LoadedDataset {
  IndicatorDataset dataset;
  std::vector<std::string> warnings;
};

LoadedDataset load_csv(const std::filesystem::path& path,
                       const CsvLoadOptions& options = {});
LoadedDataset parse_csv_dataset(const std::string& text,
                                const CsvLoadOptions& options = {});

// Attaches theme/subtheme tags from a CSV with columns
// indicator,theme,subtheme. Unknown indicators are rejected.
IndicatorDataset attach_metadata(const IndicatorDataset& ds,
                                 const std::filesystem::path& path);

StandardizedMatrix standardize(const IndicatorDataset& ds);
// Standardizes only the listed rows; the result has one row per entry.
StandardizedMatrix standardize_rows(const IndicatorDataset& ds,
                                    std::span<const std::size_t> rows);

IndicatorDataset select_variables(const IndicatorDataset& ds,
                                  std::span<const std::string> names);

// Closest candidate by edit distance; empty if `candidates` is empty.
std::string nearest_match(const std::string& name,
                          std::span<const std::string> candidates);

}  // namespace comindex
