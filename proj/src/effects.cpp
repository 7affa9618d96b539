#include "modecause/effects.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "modecause/csv.hpp"
#include "modecause/rng.hpp"
#include "modecause/util.hpp"

namespace modecause {

namespace {
constexpr int kMinLeaf = 5;
constexpr double kMinGain = 1e-12;
}  // namespace

void DmlConfig::validate() const {
  if (n_folds < 2) throw std::invalid_argument("dml: n_folds must be >= 2");
  if (gb_stages < 1) throw std::invalid_argument("dml: gb_stages must be >= 1");
  if (gb_depth < 1) throw std::invalid_argument("dml: gb_depth must be >= 1");
  if (gb_rate <= 0.0 || gb_rate > 1.0) throw std::invalid_argument("dml: gb_rate must be in (0,1]");
  if (lasso_lambda < 0.0) throw std::invalid_argument("dml: lasso_lambda must be >= 0");
}

std::set<std::string> adjustment_set(const MixedGraph& g, const std::string& treatment,
                                     const std::string& outcome) {
  if (treatment == outcome) throw std::invalid_argument("adjustment_set: treatment equals outcome");
  if (!g.is_acyclic()) throw std::invalid_argument("adjustment_set: directed part has a cycle");
  const auto undirected = g.undirected_neighbors(treatment);
  if (!undirected.empty())
    throw std::runtime_error("adjustment_set: undirected edge at treatment " + treatment + ": " +
                             treatment + " - " + *undirected.begin());
  return g.parents(treatment);
}

double GradientBoost::Tree::predict(const std::vector<double>& row) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

GradientBoost::Tree GradientBoost::fit_tree(const std::vector<std::vector<double>>& x,
                                            const std::vector<double>& residual,
                                            int max_depth) const {
  Tree tree;
  const std::size_t n_features = x.empty() ? 0 : x[0].size();

  struct Work {
    std::vector<std::size_t> rows;
    int depth;
    int node;
  };

  std::vector<std::size_t> all(x.size());
  std::iota(all.begin(), all.end(), 0);
  tree.nodes.push_back(Node{});
  std::vector<Work> stack{{std::move(all), 0, 0}};

  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();

    double sum = 0.0;
    for (std::size_t r : w.rows) sum += residual[r];
    const double mean = sum / static_cast<double>(w.rows.size());

    Node& node = tree.nodes[static_cast<std::size_t>(w.node)];
    node.value = mean;
    node.feature = -1;
    if (w.depth >= max_depth || w.rows.size() < 2 * kMinLeaf) continue;

    // Best split by SSE reduction; ties resolved toward the first feature
    // and the smallest threshold.
    double best_gain = kMinGain;
    int best_feature = -1;
    double best_threshold = 0.0;
    const double parent_score = sum * sum / static_cast<double>(w.rows.size());

    std::vector<std::pair<double, double>> vals(w.rows.size());  // (x, residual)
    for (std::size_t f = 0; f < n_features; ++f) {
      for (std::size_t i = 0; i < w.rows.size(); ++i)
        vals[i] = {x[w.rows[i]][f], residual[w.rows[i]]};
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left_sum += vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = vals.size() - nl;
        if (nl < kMinLeaf || nr < kMinLeaf) continue;
        const double right_sum = sum - left_sum;
        const double score = left_sum * left_sum / static_cast<double>(nl) +
                             right_sum * right_sum / static_cast<double>(nr);
        const double gain = score - parent_score;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
        }
      }
    }
    if (best_feature < 0) continue;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : w.rows) {
      if (x[r][static_cast<std::size_t>(best_feature)] <= best_threshold) left_rows.push_back(r);
      else right_rows.push_back(r);
    }
    const int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(Node{});
    const int right_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(Node{});
    Node& parent = tree.nodes[static_cast<std::size_t>(w.node)];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left_id;
    parent.right = right_id;
    stack.push_back({std::move(right_rows), w.depth + 1, right_id});
    stack.push_back({std::move(left_rows), w.depth + 1, left_id});
  }
  return tree;
}

GradientBoost::GradientBoost(const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y, const DmlConfig& config) {
  config.validate();
  if (x.empty() || y.empty()) throw std::invalid_argument("gradient boost: empty input");
  if (x.size() != y.size()) throw std::invalid_argument("gradient boost: size mismatch");
  rate_ = config.gb_rate;

  base_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  std::vector<double> residual(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - base_;

  for (int s = 0; s < config.gb_stages; ++s) {
    Tree tree = fit_tree(x, residual, config.gb_depth);
    if (tree.nodes.size() == 1) break;  // no usable split left
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] -= rate_ * tree.predict(x[i]);
    trees_.push_back(std::move(tree));
  }
}

double GradientBoost::predict(const std::vector<double>& row) const {
  double v = base_;
  for (const Tree& t : trees_) v += rate_ * t.predict(row);
  return v;
}

std::vector<double> GradientBoost::predict_all(const std::vector<std::vector<double>>& x) const {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = predict(x[i]);
  return out;
}

GradientBoost gradient_boost_fit(const std::vector<std::vector<double>>& x,
                                 const std::vector<double>& y, const DmlConfig& config) {
  return GradientBoost(x, y, config);
}

double lasso_fit(const std::vector<double>& x, const std::vector<double>& y, double lambda) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("lasso: need equal-length vectors with >= 2 points");
  if (lambda < 0.0) throw std::invalid_argument("lasso: lambda must be >= 0");
  const double n = static_cast<double>(x.size());
  double xx = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    xy += x[i] * y[i];
  }
  if (xx == 0.0 || std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }))
    throw std::invalid_argument("lasso: x is constant");
  const double c = xy / n;
  const double a = xx / n;
  const double soft = std::fabs(c) > lambda ? (c > 0 ? c - lambda : c + lambda) : 0.0;
  return soft / a;
}

namespace {

// Fold ids per row: a seeded permutation chopped into contiguous chunks, in
// canonical (sorted row index) form within each fold.
std::vector<int> fold_assignment(std::size_t n, int k, std::uint64_t seed) {
  Rng rng(seed);
  const auto perm = rng.permutation(n);
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i)
    fold[perm[i]] = static_cast<int>(i * static_cast<std::size_t>(k) / n);
  return fold;
}

}  // namespace

double dml_ate(const CodedDataset& data, const std::string& treatment, const std::string& outcome,
               const std::set<std::string>& z, const DmlConfig& config) {
  config.validate();
  if (z.count(treatment) || z.count(outcome))
    throw std::invalid_argument("dml: treatment/outcome cannot be in z");
  const std::size_t n = data.n_rows();
  if (n < static_cast<std::size_t>(10 * config.n_folds))
    throw std::invalid_argument("dml: need at least 10 rows per fold");

  const std::size_t t_col = data.column_index(treatment);
  const std::size_t o_col = data.column_index(outcome);
  std::vector<std::size_t> z_cols;
  for (const auto& v : z) z_cols.push_back(data.column_index(v));

  std::vector<double> t_vals(n), o_vals(n);
  for (std::size_t r = 0; r < n; ++r) {
    t_vals[r] = static_cast<double>(data.cell(r, t_col));
    o_vals[r] = static_cast<double>(data.cell(r, o_col));
  }
  if (std::all_of(t_vals.begin(), t_vals.end(), [&](double v) { return v == t_vals[0]; }))
    throw std::runtime_error("dml: treatment " + treatment + " is constant in the data");

  std::vector<std::vector<double>> features(n, std::vector<double>(z_cols.size()));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < z_cols.size(); ++j)
      features[r][j] = static_cast<double>(data.cell(r, z_cols[j]));

  const std::vector<int> fold = fold_assignment(n, config.n_folds, config.seed);
  std::vector<double> t_res(n), o_res(n);

  for (int f = 0; f < config.n_folds; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t r = 0; r < n; ++r)
      (fold[r] == f ? test_rows : train_rows).push_back(r);

    if (z_cols.empty()) {
      double t_mean = 0.0, o_mean = 0.0;
      for (std::size_t r : train_rows) {
        t_mean += t_vals[r];
        o_mean += o_vals[r];
      }
      t_mean /= static_cast<double>(train_rows.size());
      o_mean /= static_cast<double>(train_rows.size());
      for (std::size_t r : test_rows) {
        t_res[r] = t_vals[r] - t_mean;
        o_res[r] = o_vals[r] - o_mean;
      }
      continue;
    }

    std::vector<std::vector<double>> xtr;
    std::vector<double> ttr, otr;
    xtr.reserve(train_rows.size());
    for (std::size_t r : train_rows) {
      xtr.push_back(features[r]);
      ttr.push_back(t_vals[r]);
      otr.push_back(o_vals[r]);
    }
    const GradientBoost mt(xtr, ttr, config);
    const GradientBoost mo(xtr, otr, config);
    for (std::size_t r : test_rows) {
      t_res[r] = t_vals[r] - mt.predict(features[r]);
      o_res[r] = o_vals[r] - mo.predict(features[r]);
    }
  }

  double t_ss = 0.0, o_ss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    t_ss += t_res[r] * t_res[r];
    o_ss += o_res[r] * o_res[r];
  }
  const double t_scale = std::sqrt(t_ss / static_cast<double>(n));
  const double o_scale = std::sqrt(o_ss / static_cast<double>(n));
  if (t_scale == 0.0)
    throw std::runtime_error("dml: treatment residuals are constant zero for " + treatment);
  if (o_scale == 0.0) return 0.0;

  std::vector<double> ts(n), os(n);
  for (std::size_t r = 0; r < n; ++r) {
    ts[r] = t_res[r] / t_scale;
    os[r] = o_res[r] / o_scale;
  }
  return lasso_fit(ts, os, config.lasso_lambda) * o_scale / t_scale;
}

double EffectsTable::at(const std::string& cause, const std::string& effect) const {
  const auto ci = std::find(variables.begin(), variables.end(), cause);
  const auto ei = std::find(variables.begin(), variables.end(), effect);
  if (ci == variables.end() || ei == variables.end())
    throw std::invalid_argument("effects table: unknown variable");
  return values[static_cast<std::size_t>(ci - variables.begin())]
               [static_cast<std::size_t>(ei - variables.begin())];
}

std::string EffectsTable::to_csv(int decimals) const {
  std::string out;
  std::vector<std::string> header{"cause"};
  header.insert(header.end(), variables.begin(), variables.end());
  out += format_csv_row(header);
  for (std::size_t i = 0; i < variables.size(); ++i) {
    std::vector<std::string> row{variables[i]};
    for (std::size_t j = 0; j < variables.size(); ++j) {
      if (i == j) row.push_back("-");
      else if (decimals < 0) row.push_back(format_full(values[i][j]));
      else row.push_back(format_fixed(values[i][j], decimals));
    }
    out += format_csv_row(row);
  }
  return out;
}

EffectsTable total_effects_table(const MixedGraph& g, const CodedDataset& data,
                                 const DmlConfig& config) {
  config.validate();
  if (!g.is_acyclic()) throw std::invalid_argument("effects: directed part has a cycle");
  for (const auto& v : g.nodes()) data.column_index(v);

  EffectsTable table;
  table.variables = g.nodes();
  const std::size_t m = table.variables.size();
  table.values.assign(m, std::vector<double>(m, 0.0));
  table.has_path.assign(m, std::vector<bool>(m, false));

  for (std::size_t i = 0; i < m; ++i) {
    const std::string& cause = table.variables[i];
    const auto reachable = g.descendants(cause);
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const std::string& effect = table.variables[j];
      if (!reachable.count(effect)) continue;  // structural zero stays exact
      table.has_path[i][j] = true;
      const auto zset = adjustment_set(g, cause, effect);
      table.values[i][j] = dml_ate(data, cause, effect, zset, config);
    }
  }
  return table;
}

}  // namespace modecause
