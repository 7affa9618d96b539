#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace modecause {

// Cell marker produced when a response matched one of the codebook's
// invalid labels ("I don't know", ...). clean() drops rows containing it.
inline constexpr int kInvalidCode = std::numeric_limits<int>::min();

enum class VarKind { kBinary, kOrdinal };

struct Level {
  int code;
  std::string label;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kOrdinal;
  std::vector<Level> levels;                 // ordered by code
  std::set<std::string> invalid_labels;

  int min_code() const { return levels.front().code; }
  int max_code() const { return levels.back().code; }
  bool valid_code(int code) const { return code >= min_code() && code <= max_code(); }
  int level_index(int code) const;           // throws on invalid code
};

// Variable dictionary: names, kinds, code/label pairs and the responses to
// drop. Codes of one variable are distinct and contiguous from their minimum.
class Codebook {
 public:
  Codebook() = default;
  explicit Codebook(std::vector<Variable> variables);

  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(const std::string& name) const;
  bool has_variable(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;

  std::string to_json() const;
  static Codebook from_json(const std::string& text);

 private:
  std::vector<Variable> variables_;
};

// The Table 1 survey dictionary (the shipped default).
Codebook table1_codebook();

// Integer-coded tabular data. Column order is fixed at construction and all
// downstream indices refer to it. Rows are stored row-major.
class CodedDataset {
 public:
  CodedDataset(std::shared_ptr<const Codebook> codebook,
               std::vector<std::string> columns, std::vector<int> cells);

  std::size_t n_rows() const { return columns_.empty() ? 0 : cells_.size() / columns_.size(); }
  std::size_t n_cols() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t column_index(const std::string& name) const;
  const Codebook& codebook() const { return *codebook_; }
  std::shared_ptr<const Codebook> codebook_ptr() const { return codebook_; }
  const Variable& column_variable(std::size_t col) const;

  int cell(std::size_t row, std::size_t col) const { return cells_[row * columns_.size() + col]; }
  std::span<const int> row(std::size_t r) const {
    return std::span<const int>(cells_.data() + r * columns_.size(), columns_.size());
  }
  std::vector<int> column(std::size_t col) const;

  CodedDataset select_rows(std::span<const std::size_t> rows) const;
  CodedDataset select_columns(const std::vector<std::string>& names) const;
  CodedDataset concat_rows(const CodedDataset& other) const;

 private:
  std::shared_ptr<const Codebook> codebook_;
  std::vector<std::string> columns_;
  std::vector<int> cells_;  // row-major
};

struct SplitSpec {
  std::vector<std::pair<std::string, double>> fractions;  // (name, fraction in (0,1])
  std::string stratify_on;
  std::uint64_t seed = 0;
};

CodedDataset load_csv(const std::string& path, const Codebook& codebook);
CodedDataset parse_dataset_csv(const std::string& text, const Codebook& codebook);

// Drops every row containing an invalid-response marker or an out-of-range
// code. Row order is preserved; an empty result is legal.
CodedDataset clean(const CodedDataset& data);

// Disjoint, exhaustive partition of the rows. Within each stratum the part
// sizes match the fractions to within one row (largest-remainder rounding,
// remainders going to parts with the largest fractional quota, ties broken
// by larger fraction then part order).
std::vector<CodedDataset> stratified_split(const CodedDataset& data, const SplitSpec& spec);

// One synthetic-row record, kept for auditability of the interpolation.
struct SmoteRecord {
  std::size_t donor_row;
  std::size_t neighbor_row;
  double u;
  std::vector<double> interpolated;  // pre-rounding feature values
  std::vector<int> rounded;          // final row (class column included)
};

struct SmoteResult {
  CodedDataset data;                 // input rows followed by synthetic rows
  std::vector<SmoteRecord> synthetic;
};

SmoteResult smote_detailed(const CodedDataset& data, const std::string& class_var,
                           int k, std::uint64_t seed);
CodedDataset smote(const CodedDataset& data, const std::string& class_var,
                   int k, std::uint64_t seed);

// Folds a set of mutually exclusive binary indicator columns into one
// categorical target column (codes 0..k-1 in the given order, labeled by the
// source variable names). Rows where several indicators are set take the
// first; rows where none is set are dropped.
CodedDataset collapse_binary_classes(const CodedDataset& data,
                                     const std::vector<std::string>& class_vars,
                                     const std::string& target_name);

}  // namespace modecause
