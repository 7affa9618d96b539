#include "modecause/citest.hpp"

#include <algorithm>
#include <stdexcept>

#include "modecause/special.hpp"

namespace modecause {

namespace {

constexpr long kMinCellExpectation = 5;  // stratum needs 5 * cells rows to be tested

void check_pair(const CodedDataset& data, const std::string& x, const std::string& y,
                const std::vector<std::string>& z) {
  if (x == y) throw std::invalid_argument("citest: x and y must differ");
  data.column_index(x);
  data.column_index(y);
  for (const auto& v : z) {
    if (v == x || v == y)
      throw std::invalid_argument("citest: conditioning set contains " + v);
    data.column_index(v);
  }
}

// X2 and dof of one stratum's contingency table; dof counts only rows and
// columns with nonzero marginals.
std::pair<double, long> pearson(const std::vector<std::vector<long>>& counts) {
  const std::size_t r = counts.size();
  const std::size_t c = r ? counts[0].size() : 0;
  std::vector<double> row_sum(r, 0.0), col_sum(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      row_sum[i] += static_cast<double>(counts[i][j]);
      col_sum[j] += static_cast<double>(counts[i][j]);
      total += static_cast<double>(counts[i][j]);
    }
  if (total == 0.0) return {0.0, 0};
  long r_nz = 0, c_nz = 0;
  for (double s : row_sum)
    if (s > 0.0) ++r_nz;
  for (double s : col_sum)
    if (s > 0.0) ++c_nz;
  double x2 = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (row_sum[i] == 0.0) continue;
    for (std::size_t j = 0; j < c; ++j) {
      if (col_sum[j] == 0.0) continue;
      const double expected = row_sum[i] * col_sum[j] / total;
      const double diff = static_cast<double>(counts[i][j]) - expected;
      x2 += diff * diff / expected;
    }
  }
  return {x2, (r_nz - 1) * (c_nz - 1)};
}

}  // namespace

std::vector<std::vector<long>> contingency_table(const CodedDataset& data, const std::string& x,
                                                 const std::string& y,
                                                 const std::map<std::string, int>& z_assignment) {
  std::vector<std::string> z;
  for (const auto& [name, code] : z_assignment) z.push_back(name);
  check_pair(data, x, y, z);

  const std::size_t xc = data.column_index(x);
  const std::size_t yc = data.column_index(y);
  const Variable& xv = data.column_variable(xc);
  const Variable& yv = data.column_variable(yc);
  std::vector<std::pair<std::size_t, int>> cond;
  for (const auto& [name, code] : z_assignment) cond.emplace_back(data.column_index(name), code);

  std::vector<std::vector<long>> counts(xv.levels.size(), std::vector<long>(yv.levels.size(), 0));
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    bool match = true;
    for (const auto& [col, code] : cond) {
      if (data.cell(r, col) != code) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    counts[static_cast<std::size_t>(xv.level_index(data.cell(r, xc)))]
          [static_cast<std::size_t>(yv.level_index(data.cell(r, yc)))]++;
  }
  return counts;
}

CiResult chi_square_ci(const CodedDataset& data, const std::string& x, const std::string& y,
                       const std::vector<std::string>& z, double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("citest: alpha must be in (0,1)");
  check_pair(data, x, y, z);

  const std::size_t xc = data.column_index(x);
  const std::size_t yc = data.column_index(y);
  const Variable& xv = data.column_variable(xc);
  const Variable& yv = data.column_variable(yc);
  const std::size_t xl = xv.levels.size();
  const std::size_t yl = yv.levels.size();
  const long min_rows = kMinCellExpectation * static_cast<long>(xl * yl);

  // Conditioning columns in name order, so strata are grouped and summed the
  // same way no matter how the caller ordered z or the dataset's columns.
  std::vector<std::string> z_sorted = z;
  std::sort(z_sorted.begin(), z_sorted.end());
  std::vector<std::size_t> z_cols;
  for (const auto& v : z_sorted) z_cols.push_back(data.column_index(v));

  std::map<std::vector<int>, std::vector<long>> strata;  // z codes -> flat counts
  std::vector<int> key(z_cols.size());
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t i = 0; i < z_cols.size(); ++i) key[i] = data.cell(r, z_cols[i]);
    auto& flat = strata[key];
    if (flat.empty()) flat.assign(xl * yl, 0);
    flat[static_cast<std::size_t>(xv.level_index(data.cell(r, xc))) * yl +
         static_cast<std::size_t>(yv.level_index(data.cell(r, yc)))]++;
  }

  CiResult res;
  bool any_tested = false;
  for (const auto& [codes, flat] : strata) {
    long stratum_rows = 0;
    for (long v : flat) stratum_rows += v;
    if (stratum_rows < min_rows) continue;
    std::vector<std::vector<long>> counts(xl, std::vector<long>(yl));
    for (std::size_t i = 0; i < xl; ++i)
      for (std::size_t j = 0; j < yl; ++j) counts[i][j] = flat[i * yl + j];
    const auto [x2, dof] = pearson(counts);
    res.statistic += x2;
    res.dof += dof;
    any_tested = true;
  }

  res.informative = any_tested && res.dof >= 1;
  if (res.informative) {
    res.p_value = chi_square_survival(res.statistic, static_cast<double>(res.dof));
    res.independent = res.p_value > alpha;
  } else {
    res.p_value = 1.0;
    res.independent = false;
  }
  return res;
}

}  // namespace modecause
