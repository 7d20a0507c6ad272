#pragma once

#include "ifbls/linalg.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ifbls {

/// Raw comma-separated text. `lines` keeps each data row exactly as read so a
/// file can be written back byte-for-byte.
struct CsvTable {
  std::vector<std::string> header;  // empty when the file has no header row
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> lines;
};

struct Dataset {
  std::string name;
  Matrix x;
  std::vector<std::string> labels;
  std::vector<std::string> class_labels;  // sorted, distinct
  std::vector<std::string> feature_names;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
  /// Position of each label within class_labels.
  std::vector<int> class_indices() const;
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Label column chosen by header name or 0-based index. Default: last column.
using ColumnRef = std::variant<std::monostate, std::string, int>;

CsvTable read_csv_table(const std::filesystem::path& path, bool header);
CsvTable parse_csv_table(const std::string& text, bool header);
void write_csv_table(const std::filesystem::path& path, const CsvTable& table);

/// Index of the label column within the table, or throws Error(parse_error).
std::size_t resolve_label_column(const CsvTable& table, const ColumnRef& label_column);

/// Features parsed as doubles; label cells kept verbatim.
Dataset table_to_dataset(const CsvTable& table, const ColumnRef& label_column,
                         std::string name);

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column = {},
                 bool header = true);

/// Parses every cell as a feature, optionally dropping one column. Accepts an
/// empty table (zero rows).
Matrix table_to_features(const CsvTable& table, std::optional<std::size_t> drop_column = {});

std::vector<std::string> sorted_classes(const std::vector<std::string>& labels);

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // fold index per sample
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

/// Shuffles 0..n-1 with a seeded generator, then deals samples round-robin.
FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed);

struct NoiseResult {
  Dataset data;
  std::vector<std::size_t> corrupted_rows;  // ascending
};

/// Corrupts round(level/100 * N) randomly chosen samples: each feature gets
/// zero-mean Gaussian noise whose sigma is that feature's dataset-wide sample
/// standard deviation. Labels and all other rows are untouched.
NoiseResult inject_gaussian_noise(const Dataset& ds, double level_percent, std::uint64_t seed);

/// Stable hash of file contents (FNV-1a 64), hex encoded.
std::string content_fingerprint(const std::filesystem::path& path);
std::string fingerprint_bytes(std::string_view bytes);

/// Shortest round-tripping decimal representation.
std::string format_double(double v);

}  // namespace ifbls
