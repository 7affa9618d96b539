#include "modecause/explain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modecause/csv.hpp"
#include "modecause/util.hpp"

namespace modecause {

ScoreFn mlp_score_fn(const MlpModel& model) {
  return [&model](std::span<const int> row) {
    std::vector<double> features(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) features[i] = static_cast<double>(row[i]);
    return model.forward(features);
  };
}

double shapley_weight(int s_size, int f_size) {
  if (f_size < 1 || s_size < 0 || s_size > f_size - 1)
    throw std::invalid_argument("shapley_weight: sizes out of range");
  // f_size <= 15 keeps every factorial exact in double arithmetic.
  double num = 1.0;
  for (int i = 2; i <= s_size; ++i) num *= static_cast<double>(i);
  for (int i = 2; i <= f_size - s_size - 1; ++i) num *= static_cast<double>(i);
  double den = 1.0;
  for (int i = 2; i <= f_size; ++i) den *= static_cast<double>(i);
  return num / den;
}

namespace {

std::vector<double> coalition_values_all(const ScoreFn& model, std::span<const int> instance,
                                         const CodedDataset& background, unsigned mask) {
  const std::size_t f = instance.size();
  std::vector<int> hybrid(f);
  std::vector<double> mean;
  for (std::size_t b = 0; b < background.n_rows(); ++b) {
    const auto bg = background.row(b);
    for (std::size_t i = 0; i < f; ++i)
      hybrid[i] = (mask & (1u << i)) ? instance[i] : bg[i];
    const auto scores = model(hybrid);
    if (mean.empty()) mean.assign(scores.size(), 0.0);
    if (scores.size() != mean.size())
      throw std::runtime_error("explain: model returned inconsistent class counts");
    for (std::size_t c = 0; c < scores.size(); ++c) mean[c] += scores[c];
  }
  const double inv = 1.0 / static_cast<double>(background.n_rows());
  for (double& v : mean) v *= inv;
  return mean;
}

}  // namespace

double coalition_value(const ScoreFn& model, std::span<const int> instance,
                       const std::vector<int>& s, const CodedDataset& background,
                       int class_index) {
  if (background.n_rows() == 0) throw std::invalid_argument("explain: empty background");
  unsigned mask = 0;
  for (int i : s) {
    if (i < 0 || static_cast<std::size_t>(i) >= instance.size())
      throw std::invalid_argument("explain: feature index out of range");
    mask |= 1u << i;
  }
  const auto values = coalition_values_all(model, instance, background, mask);
  if (class_index < 0 || static_cast<std::size_t>(class_index) >= values.size())
    throw std::invalid_argument("explain: class index out of range");
  return values[static_cast<std::size_t>(class_index)];
}

ShapExplanation exact_shap_all(const ScoreFn& model, int n_classes,
                               std::span<const int> instance, const CodedDataset& background) {
  const std::size_t f = instance.size();
  if (f == 0 || f > 15) throw std::invalid_argument("explain: feature count must be in 1..15");
  if (background.n_rows() == 0) throw std::invalid_argument("explain: empty background");
  if (background.n_cols() != f) throw std::invalid_argument("explain: background width mismatch");

  const std::size_t n_masks = static_cast<std::size_t>(1) << f;
  // v[mask][class]: mean model score with the masked features taken from the
  // instance.
  std::vector<std::vector<double>> v(n_masks);
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    v[mask] = coalition_values_all(model, instance, background, static_cast<unsigned>(mask));
    if (v[mask].size() != static_cast<std::size_t>(n_classes))
      throw std::runtime_error("explain: model returned wrong class count");
  }

  std::vector<double> weight_of_size(f);
  for (std::size_t s = 0; s < f; ++s)
    weight_of_size[s] = shapley_weight(static_cast<int>(s), static_cast<int>(f));

  ShapExplanation out;
  out.phi.assign(static_cast<std::size_t>(n_classes), std::vector<double>(f, 0.0));
  out.base_value = v[0];
  out.full_value = v[n_masks - 1];

  for (std::size_t i = 0; i < f; ++i) {
    const std::size_t bit = static_cast<std::size_t>(1) << i;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      const double w = weight_of_size[static_cast<std::size_t>(__builtin_popcountll(mask))];
      for (int c = 0; c < n_classes; ++c)
        out.phi[static_cast<std::size_t>(c)][i] +=
            w * (v[mask | bit][static_cast<std::size_t>(c)] - v[mask][static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

std::vector<double> exact_shap(const ScoreFn& model, std::span<const int> instance,
                               const CodedDataset& background, int class_index) {
  const int n_classes = static_cast<int>(model(instance).size());
  if (class_index < 0 || class_index >= n_classes)
    throw std::invalid_argument("explain: class index out of range");
  const auto all = exact_shap_all(model, n_classes, instance, background);
  return all.phi[static_cast<std::size_t>(class_index)];
}

ShapSummary mean_abs_shap(const ScoreFn& model, int n_classes, const CodedDataset& data,
                          const CodedDataset& background,
                          std::vector<ShapExplanation>* per_instance) {
  if (data.n_rows() == 0) throw std::invalid_argument("explain: no rows to explain");
  const std::size_t f = data.n_cols();
  ShapSummary summary;
  summary.feature_names = data.columns();
  summary.mean_abs.assign(static_cast<std::size_t>(n_classes), std::vector<double>(f, 0.0));
  summary.instances = data.n_rows();
  if (per_instance) per_instance->clear();

  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    const auto expl = exact_shap_all(model, n_classes, data.row(r), background);
    for (int c = 0; c < n_classes; ++c)
      for (std::size_t i = 0; i < f; ++i)
        summary.mean_abs[static_cast<std::size_t>(c)][i] +=
            std::fabs(expl.phi[static_cast<std::size_t>(c)][i]);
    if (per_instance) per_instance->push_back(expl);
  }
  const double inv = 1.0 / static_cast<double>(data.n_rows());
  for (auto& row : summary.mean_abs)
    for (double& v : row) v *= inv;

  summary.ranking.resize(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    auto& order = summary.ranking[static_cast<std::size_t>(c)];
    order.resize(f);
    for (std::size_t i = 0; i < f; ++i) order[i] = i;
    const auto& vals = summary.mean_abs[static_cast<std::size_t>(c)];
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  }
  return summary;
}

std::string ShapSummary::to_csv(const std::vector<std::string>& class_names) const {
  std::string out;
  out += format_csv_row({"class", "feature", "mean_abs_shap", "rank"});
  for (std::size_t c = 0; c < mean_abs.size(); ++c) {
    for (std::size_t pos = 0; pos < ranking[c].size(); ++pos) {
      const std::size_t i = ranking[c][pos];
      out += format_csv_row({class_names[c], feature_names[i], format_full(mean_abs[c][i]),
                             std::to_string(pos + 1)});
    }
  }
  return out;
}

}  // namespace modecause
