#include "ifbls/data_io.hpp"

#include "ifbls/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace ifbls {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string column_name(const CsvTable& table, std::size_t col) {
  if (col < table.header.size()) return table.header[col];
  return std::to_string(col + 1);
}

// Uniform integer in [0, bound) by rejection; identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v;
  do {
    v = gen();
  } while (v >= limit);
  return v % bound;
}

// Box-Muller on 53-bit uniforms; std::normal_distribution is not portable.
double standard_normal(std::mt19937_64& gen) {
  const double u1 = (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

std::vector<int> Dataset::class_indices() const {
  std::vector<int> idx(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::lower_bound(class_labels.begin(), class_labels.end(), labels[i]);
    idx[i] = static_cast<int>(it - class_labels.begin());
  }
  return idx;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.name = name;
  out.feature_names = feature_names;
  out.class_labels = class_labels;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

CsvTable parse_csv_table(const std::string& text, bool header) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (first && header) {
      table.header = split_row(line);
      first = false;
      continue;
    }
    first = false;
    table.cells.push_back(split_row(line));
    table.lines.push_back(line);
  }
  return table;
}

CsvTable read_csv_table(const std::filesystem::path& path, bool header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_table(buf.str(), header);
}

void write_csv_table(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::io_error, "cannot write '" + path.string() + "'");
  }
  if (!table.header.empty()) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      out << (j ? "," : "") << table.header[j];
    }
    out << '\n';
  }
  for (const auto& line : table.lines) out << line << '\n';
}

std::size_t resolve_label_column(const CsvTable& table, const ColumnRef& label_column) {
  const std::size_t width =
      !table.header.empty() ? table.header.size() : (table.cells.empty() ? 0 : table.cells[0].size());
  if (width == 0) {
    throw Error(ErrorKind::parse_error, "empty file: no columns");
  }
  if (std::holds_alternative<std::monostate>(label_column)) return width - 1;
  if (const auto* idx = std::get_if<int>(&label_column)) {
    if (*idx < 0 || static_cast<std::size_t>(*idx) >= width) {
      throw Error(ErrorKind::parse_error, "label column index " + std::to_string(*idx) +
                                              " is out of range for " + std::to_string(width) +
                                              " columns");
    }
    return static_cast<std::size_t>(*idx);
  }
  const auto& name = std::get<std::string>(label_column);
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    throw Error(ErrorKind::parse_error, "label column '" + name + "' not found in header");
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

Matrix table_to_features(const CsvTable& table, std::optional<std::size_t> drop_column) {
  if (table.cells.empty()) {
    const std::size_t width = table.header.size();
    const std::size_t d = width - (drop_column && width > 0 ? 1 : 0);
    return Matrix(0, static_cast<Eigen::Index>(d));
  }
  const std::size_t width = table.header.empty() ? table.cells[0].size() : table.header.size();
  const std::size_t d = width - (drop_column ? 1 : 0);
  Matrix x(static_cast<Eigen::Index>(table.cells.size()), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < table.cells.size(); ++r) {
    const auto& row = table.cells[r];
    if (row.size() != width) {
      throw Error(ErrorKind::parse_error, "row " + std::to_string(r + 1) + " has " +
                                              std::to_string(row.size()) + " cells, expected " +
                                              std::to_string(width));
    }
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (drop_column && j == *drop_column) continue;
      const auto v = parse_number(row[j]);
      if (!v) {
        throw Error(ErrorKind::parse_error, "row " + std::to_string(r + 1) + ", column " +
                                                column_name(table, j) + ": cannot parse '" +
                                                row[j] + "' as a number");
      }
      x(static_cast<Eigen::Index>(r), c++) = *v;
    }
  }
  return x;
}

std::vector<std::string> sorted_classes(const std::vector<std::string>& labels) {
  const std::set<std::string> distinct(labels.begin(), labels.end());
  return {distinct.begin(), distinct.end()};
}

Dataset table_to_dataset(const CsvTable& table, const ColumnRef& label_column, std::string name) {
  if (table.cells.empty()) {
    throw Error(ErrorKind::parse_error, "empty file: no data rows");
  }
  const std::size_t label_col = resolve_label_column(table, label_column);
  Dataset ds;
  ds.name = std::move(name);
  ds.x = table_to_features(table, label_col);
  ds.labels.reserve(table.cells.size());
  for (const auto& row : table.cells) ds.labels.push_back(row[label_col]);
  ds.class_labels = sorted_classes(ds.labels);
  const std::size_t width = table.header.empty() ? table.cells[0].size() : table.header.size();
  for (std::size_t j = 0; j < width; ++j) {
    if (j != label_col) ds.feature_names.push_back(column_name(table, j));
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column, bool header) {
  return table_to_dataset(read_csv_table(path, header), label_column, path.stem().string());
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(i);
  return out;
}

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) {
    throw Error(ErrorKind::invalid_argument, "k-fold needs k >= 2, got " + std::to_string(k));
  }
  if (static_cast<std::size_t>(k) > n) {
    throw Error(ErrorKind::invalid_argument, "k = " + std::to_string(k) +
                                                 " folds exceeds the " + std::to_string(n) +
                                                 " available samples");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 gen(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[uniform_below(gen, i)]);
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    plan.assignments[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return plan;
}

NoiseResult inject_gaussian_noise(const Dataset& ds, double level_percent, std::uint64_t seed) {
  if (!(level_percent >= 0.0 && level_percent <= 100.0)) {
    throw Error(ErrorKind::invalid_argument, "noise level must be in [0, 100]");
  }
  NoiseResult result{ds, {}};
  const auto n = static_cast<std::size_t>(ds.size());
  const auto count = static_cast<std::size_t>(std::llround(level_percent / 100.0 * static_cast<double>(n)));
  if (count == 0 || n == 0) return result;

  Vector sigma = Vector::Zero(ds.dim());
  if (n > 1) {
    const Eigen::RowVectorXd mean = ds.x.colwise().mean();
    sigma = ((ds.x.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n - 1))
                .sqrt()
                .transpose();
  }

  std::mt19937_64 gen(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(order[i], order[i + uniform_below(gen, n - i)]);
  }
  result.corrupted_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(result.corrupted_rows.begin(), result.corrupted_rows.end());

  for (const auto r : result.corrupted_rows) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
      result.data.x(static_cast<Eigen::Index>(r), j) += sigma(j) * standard_normal(gen);
    }
  }
  return result;
}

std::string fingerprint_bytes(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string content_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return fingerprint_bytes(buf.str());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace ifbls
