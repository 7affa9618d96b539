#include "modecause/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "modecause/csv.hpp"
#include "modecause/rng.hpp"
#include "modecause/util.hpp"

namespace modecause {

int Variable::level_index(int code) const {
  if (!valid_code(code))
    throw std::invalid_argument("invalid code " + std::to_string(code) + " for variable " + name);
  return code - min_code();
}

Codebook::Codebook(std::vector<Variable> variables) : variables_(std::move(variables)) {
  std::set<std::string> seen;
  for (const auto& v : variables_) {
    if (!seen.insert(v.name).second)
      throw std::invalid_argument("codebook: duplicate variable " + v.name);
    if (v.levels.size() < 2)
      throw std::invalid_argument("codebook: variable " + v.name + " needs at least 2 levels");
    if (v.kind == VarKind::kBinary && v.levels.size() != 2)
      throw std::invalid_argument("codebook: binary variable " + v.name + " must have exactly 2 levels");
    for (std::size_t i = 1; i < v.levels.size(); ++i) {
      if (v.levels[i].code != v.levels[i - 1].code + 1)
        throw std::invalid_argument("codebook: codes of " + v.name +
                                    " must be contiguous and ascending");
    }
  }
}

const Variable& Codebook::variable(const std::string& name) const {
  return variables_[index_of(name)];
}

bool Codebook::has_variable(const std::string& name) const {
  for (const auto& v : variables_)
    if (v.name == name) return true;
  return false;
}

std::size_t Codebook::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return i;
  throw std::invalid_argument("codebook: unknown variable " + name);
}

std::string Codebook::to_json() const {
  nlohmann::ordered_json j;
  j["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : variables_) {
    nlohmann::ordered_json jv;
    jv["name"] = v.name;
    jv["kind"] = v.kind == VarKind::kBinary ? "binary" : "ordinal";
    jv["levels"] = nlohmann::ordered_json::array();
    for (const auto& lv : v.levels) jv["levels"].push_back({lv.code, lv.label});
    if (!v.invalid_labels.empty())
      jv["invalid_labels"] = std::vector<std::string>(v.invalid_labels.begin(), v.invalid_labels.end());
    j["variables"].push_back(jv);
  }
  return j.dump(2) + "\n";
}

Codebook Codebook::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::set<std::string> shared_invalid;
  if (j.contains("invalid_labels"))
    for (const auto& s : j.at("invalid_labels")) shared_invalid.insert(s.get<std::string>());
  std::vector<Variable> vars;
  for (const auto& jv : j.at("variables")) {
    Variable v;
    v.name = jv.at("name").get<std::string>();
    const std::string kind = jv.at("kind").get<std::string>();
    if (kind == "binary") v.kind = VarKind::kBinary;
    else if (kind == "ordinal") v.kind = VarKind::kOrdinal;
    else throw std::invalid_argument("codebook: unknown kind " + kind + " for " + v.name);
    for (const auto& jl : jv.at("levels"))
      v.levels.push_back({jl.at(0).get<int>(), jl.at(1).get<std::string>()});
    std::sort(v.levels.begin(), v.levels.end(),
              [](const Level& a, const Level& b) { return a.code < b.code; });
    v.invalid_labels = shared_invalid;
    if (jv.contains("invalid_labels"))
      for (const auto& s : jv.at("invalid_labels")) v.invalid_labels.insert(s.get<std::string>());
    vars.push_back(std::move(v));
  }
  return Codebook(std::move(vars));
}

namespace {

Variable make_var(std::string name, VarKind kind, std::vector<Level> levels) {
  Variable v;
  v.name = std::move(name);
  v.kind = kind;
  v.levels = std::move(levels);
  v.invalid_labels = {"not ascertained", "I don't know", "I prefer not to answer",
                      "appropriate skip"};
  return v;
}

}  // namespace

Codebook table1_codebook() {
  std::vector<Variable> vars;
  vars.push_back(make_var("hhinc", VarKind::kOrdinal,
                          {{1, "Less than $15,000"},
                           {2, "$15,000 to $24,999"},
                           {3, "$25,000 to $29,999"},
                           {4, "$30,000 to $34,999"},
                           {5, "$35,000 to $49,999"},
                           {6, "$50,000 to $59,999"},
                           {7, "$60,000 to $74,999"},
                           {8, "$75,000 to $99,999"},
                           {9, "$100,000 to $149,999"},
                           {10, "$150,000 or more"}}));
  vars.push_back(make_var("sex", VarKind::kBinary, {{1, "Male"}, {2, "Female"}}));
  vars.push_back(make_var("race_x", VarKind::kBinary, {{0, "White"}, {1, "Non-white"}}));
  vars.push_back(make_var("hhveh_x", VarKind::kBinary, {{0, "No vehicle"}, {1, "Have a vehicle"}}));
  vars.push_back(make_var("hhsize_x", VarKind::kOrdinal,
                          {{1, "1 person"}, {2, "2 persons"}, {3, "2+ persons"}}));
  vars.push_back(make_var("age_x", VarKind::kOrdinal,
                          {{1, "16-29 years"}, {2, "30-44 years"}, {3, "45-64 years"}, {4, "64+ years"}}));
  vars.push_back(make_var("distance_x", VarKind::kOrdinal,
                          {{1, "Less than or equal to 0.25 mile"},
                           {2, "Greater than 0.25 mile and less than equal to 0.5 mile"},
                           {3, "Greater than 0.5 mile and less than equal to 1 mile"},
                           {4, "Greater than 1 mile and less than equal to 2.5 miles"},
                           {5, "Greater than 2.5 miles and less than equal to 5 miles"},
                           {6, "Greater than 5 miles and less than equal to 10 miles"},
                           {7, "Greater than 10 miles and less than equal to 25 miles"},
                           {8, "Greater than 25 miles"}}));
  vars.push_back(make_var("work_purp", VarKind::kBinary, {{0, "Non work related"}, {1, "Work related"}}));
  vars.push_back(make_var("Car", VarKind::kBinary, {{0, "No"}, {1, "Yes"}}));
  vars.push_back(make_var("Public", VarKind::kBinary, {{0, "No"}, {1, "Yes"}}));
  vars.push_back(make_var("Walk", VarKind::kBinary, {{0, "No"}, {1, "Yes"}}));
  return Codebook(std::move(vars));
}

CodedDataset::CodedDataset(std::shared_ptr<const Codebook> codebook,
                           std::vector<std::string> columns, std::vector<int> cells)
    : codebook_(std::move(codebook)), columns_(std::move(columns)), cells_(std::move(cells)) {
  if (!codebook_) throw std::invalid_argument("dataset: null codebook");
  for (const auto& c : columns_) codebook_->index_of(c);  // must exist
  if (!columns_.empty() && cells_.size() % columns_.size() != 0)
    throw std::invalid_argument("dataset: cell count not a multiple of column count");
}

std::size_t CodedDataset::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw std::invalid_argument("dataset: unknown column " + name);
}

const Variable& CodedDataset::column_variable(std::size_t col) const {
  return codebook_->variable(columns_[col]);
}

std::vector<int> CodedDataset::column(std::size_t col) const {
  std::vector<int> out(n_rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = cell(r, col);
  return out;
}

CodedDataset CodedDataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<int> cells;
  cells.reserve(rows.size() * n_cols());
  for (std::size_t r : rows) {
    const auto src = row(r);
    cells.insert(cells.end(), src.begin(), src.end());
  }
  return CodedDataset(codebook_, columns_, std::move(cells));
}

CodedDataset CodedDataset::select_columns(const std::vector<std::string>& names) const {
  std::vector<std::size_t> cols;
  for (const auto& name : names) cols.push_back(column_index(name));
  std::vector<int> cells;
  cells.reserve(n_rows() * cols.size());
  for (std::size_t r = 0; r < n_rows(); ++r)
    for (std::size_t c : cols) cells.push_back(cell(r, c));
  return CodedDataset(codebook_, names, std::move(cells));
}

CodedDataset CodedDataset::concat_rows(const CodedDataset& other) const {
  if (other.columns_ != columns_) throw std::invalid_argument("dataset: column mismatch in concat");
  std::vector<int> cells = cells_;
  cells.insert(cells.end(), other.cells_.begin(), other.cells_.end());
  return CodedDataset(codebook_, columns_, std::move(cells));
}

namespace {

bool parse_int(const std::string& s, int* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) return false;
  *out = static_cast<int>(v);
  return true;
}

}  // namespace

CodedDataset parse_dataset_csv(const std::string& text, const Codebook& codebook) {
  const CsvTable table = parse_csv(text);
  if (table.records.empty()) throw std::runtime_error("csv: missing header row");
  const auto& header = table.records.front();

  std::vector<std::size_t> col_of_var;  // position in the csv, per codebook variable
  std::vector<std::string> columns;
  for (const auto& v : codebook.variables()) {
    auto it = std::find(header.begin(), header.end(), v.name);
    if (it == header.end())
      throw std::runtime_error("csv: missing variable column " + v.name);
    col_of_var.push_back(static_cast<std::size_t>(it - header.begin()));
    columns.push_back(v.name);
  }

  std::vector<int> cells;
  cells.reserve((table.records.size() - 1) * columns.size());
  for (std::size_t r = 1; r < table.records.size(); ++r) {
    const auto& rec = table.records[r];
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const Variable& var = codebook.variables()[j];
      if (col_of_var[j] >= rec.size())
        throw std::runtime_error("csv: row " + std::to_string(r) + " is missing column " + var.name);
      const std::string& cell = rec[col_of_var[j]];
      int code;
      if (parse_int(cell, &code)) {
        cells.push_back(code);
        continue;
      }
      bool matched = false;
      for (const auto& lv : var.levels) {
        if (lv.label == cell) {
          cells.push_back(lv.code);
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (var.invalid_labels.count(cell)) {
        cells.push_back(kInvalidCode);
        continue;
      }
      throw std::runtime_error("csv: row " + std::to_string(r) + ", column " + var.name +
                               ": cannot decode '" + cell + "'");
    }
  }
  auto cb = std::make_shared<Codebook>(codebook);
  return CodedDataset(std::move(cb), std::move(columns), std::move(cells));
}

CodedDataset load_csv(const std::string& path, const Codebook& codebook) {
  return parse_dataset_csv(read_text_file(path), codebook);
}

CodedDataset clean(const CodedDataset& data) {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    bool ok = true;
    for (std::size_t c = 0; c < data.n_cols(); ++c) {
      const int v = data.cell(r, c);
      if (v == kInvalidCode || !data.column_variable(c).valid_code(v)) {
        ok = false;
        break;
      }
    }
    if (ok) keep.push_back(r);
  }
  return data.select_rows(keep);
}

std::vector<CodedDataset> stratified_split(const CodedDataset& data, const SplitSpec& spec) {
  if (spec.fractions.empty()) throw std::invalid_argument("split: no fractions given");
  double sum = 0.0;
  for (const auto& [name, f] : spec.fractions) {
    if (f <= 0.0 || f > 1.0) throw std::invalid_argument("split: fraction out of (0,1] for " + name);
    sum += f;
  }
  if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("split: fractions must sum to 1");

  const std::size_t class_col = data.column_index(spec.stratify_on);
  const std::size_t k = spec.fractions.size();

  std::map<int, std::vector<std::size_t>> strata;  // class code -> row indices
  for (std::size_t r = 0; r < data.n_rows(); ++r) strata[data.cell(r, class_col)].push_back(r);

  Rng rng(spec.seed);
  std::vector<std::vector<std::size_t>> parts(k);
  for (auto& [code, rows] : strata) {
    if (rows.size() < k)
      throw std::runtime_error("split: stratum " + std::to_string(code) + " has " +
                               std::to_string(rows.size()) + " rows, fewer than the " +
                               std::to_string(k) + " parts");
    const auto perm = rng.permutation(rows.size());

    // Largest-remainder apportionment of the stratum across parts.
    std::vector<std::size_t> count(k);
    std::vector<double> remainder(k);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const double quota = spec.fractions[i].second * static_cast<double>(rows.size());
      count[i] = static_cast<std::size_t>(std::floor(quota + 1e-12));
      remainder[i] = quota - static_cast<double>(count[i]);
      assigned += count[i];
    }
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
      if (spec.fractions[a].second != spec.fractions[b].second)
        return spec.fractions[a].second > spec.fractions[b].second;
      return a < b;
    });
    for (std::size_t i = 0; assigned < rows.size(); ++i) {
      ++count[order[i % k]];
      ++assigned;
    }

    std::size_t pos = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t c = 0; c < count[i]; ++c) parts[i].push_back(rows[perm[pos++]]);
  }

  std::vector<CodedDataset> out;
  out.reserve(k);
  for (auto& rows : parts) {
    std::sort(rows.begin(), rows.end());
    out.push_back(data.select_rows(rows));
  }
  return out;
}

SmoteResult smote_detailed(const CodedDataset& data, const std::string& class_var,
                           int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("smote: k must be >= 1");
  const std::size_t class_col = data.column_index(class_var);
  const std::size_t m = data.n_cols();

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t r = 0; r < data.n_rows(); ++r) by_class[data.cell(r, class_col)].push_back(r);
  if (by_class.size() < 2) throw std::invalid_argument("smote: class variable needs >= 2 classes");

  std::size_t majority = 0;
  for (const auto& [code, rows] : by_class) majority = std::max(majority, rows.size());

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < m; ++c)
    if (c != class_col) feature_cols.push_back(c);

  Rng rng(seed);
  std::vector<int> cells;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    const auto src = data.row(r);
    cells.insert(cells.end(), src.begin(), src.end());
  }

  std::vector<SmoteRecord> records;
  for (const auto& [code, rows] : by_class) {
    const std::size_t need = majority - rows.size();
    if (need == 0) continue;
    if (rows.size() < static_cast<std::size_t>(k) + 1)
      throw std::runtime_error("smote: class " + std::to_string(code) + " has " +
                               std::to_string(rows.size()) + " rows, fewer than k+1 = " +
                               std::to_string(k + 1));

    // k nearest same-class neighbors of each class row, ties broken by row index.
    std::vector<std::vector<std::size_t>> knn(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<std::pair<double, std::size_t>> dist;
      dist.reserve(rows.size() - 1);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (j == i) continue;
        double d2 = 0.0;
        for (std::size_t c : feature_cols) {
          const double diff = static_cast<double>(data.cell(rows[i], c)) -
                              static_cast<double>(data.cell(rows[j], c));
          d2 += diff * diff;
        }
        dist.emplace_back(d2, rows[j]);
      }
      std::sort(dist.begin(), dist.end());
      for (int t = 0; t < k; ++t) knn[i].push_back(dist[static_cast<std::size_t>(t)].second);
    }

    for (std::size_t s = 0; s < need; ++s) {
      const std::size_t di = static_cast<std::size_t>(rng.below(rows.size()));
      const std::size_t donor = rows[di];
      const std::size_t neighbor = knn[di][static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(k)))];
      const double u = rng.real();

      SmoteRecord rec;
      rec.donor_row = donor;
      rec.neighbor_row = neighbor;
      rec.u = u;
      rec.rounded.resize(m);
      for (std::size_t c = 0; c < m; ++c) {
        if (c == class_col) {
          rec.rounded[c] = code;
          continue;
        }
        const double x = static_cast<double>(data.cell(donor, c));
        const double z = static_cast<double>(data.cell(neighbor, c));
        const double value = x + u * (z - x);
        rec.interpolated.push_back(value);
        const Variable& var = data.column_variable(c);
        const long r = std::lround(value);
        rec.rounded[c] = static_cast<int>(std::clamp(r, static_cast<long>(var.min_code()),
                                                     static_cast<long>(var.max_code())));
      }
      cells.insert(cells.end(), rec.rounded.begin(), rec.rounded.end());
      records.push_back(std::move(rec));
    }
  }

  CodedDataset out(data.codebook_ptr(), data.columns(), std::move(cells));
  return SmoteResult{std::move(out), std::move(records)};
}

CodedDataset smote(const CodedDataset& data, const std::string& class_var,
                   int k, std::uint64_t seed) {
  return smote_detailed(data, class_var, k, seed).data;
}

CodedDataset collapse_binary_classes(const CodedDataset& data,
                                     const std::vector<std::string>& class_vars,
                                     const std::string& target_name) {
  if (class_vars.size() < 2) throw std::invalid_argument("collapse: need >= 2 class variables");
  std::vector<std::size_t> class_cols;
  for (const auto& v : class_vars) class_cols.push_back(data.column_index(v));

  std::vector<Variable> vars;
  std::vector<std::size_t> keep_cols;
  for (std::size_t c = 0; c < data.n_cols(); ++c) {
    if (std::find(class_cols.begin(), class_cols.end(), c) != class_cols.end()) continue;
    keep_cols.push_back(c);
    vars.push_back(data.column_variable(c));
  }
  Variable target;
  target.name = target_name;
  target.kind = class_vars.size() == 2 ? VarKind::kBinary : VarKind::kOrdinal;
  for (std::size_t i = 0; i < class_vars.size(); ++i)
    target.levels.push_back({static_cast<int>(i), class_vars[i]});
  vars.push_back(target);

  auto cb = std::make_shared<Codebook>(std::move(vars));
  std::vector<std::string> columns;
  for (std::size_t c : keep_cols) columns.push_back(data.columns()[c]);
  columns.push_back(target_name);

  std::vector<int> cells;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    int label = -1;
    for (std::size_t i = 0; i < class_cols.size(); ++i) {
      if (data.cell(r, class_cols[i]) == 1) {
        label = static_cast<int>(i);
        break;
      }
    }
    if (label < 0) continue;  // no indicator set
    for (std::size_t c : keep_cols) cells.push_back(data.cell(r, c));
    cells.push_back(label);
  }
  return CodedDataset(std::move(cb), std::move(columns), std::move(cells));
}

}  // namespace modecause
