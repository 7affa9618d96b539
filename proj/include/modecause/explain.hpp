#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "modecause/dataset.hpp"
#include "modecause/predictor.hpp"

namespace modecause {

// Anything that scores a coded feature row per class. The scores need not be
// probabilities; attribution only cares about the numbers.
using ScoreFn = std::function<std::vector<double>(std::span<const int>)>;

ScoreFn mlp_score_fn(const MlpModel& model);

// Exact Shapley coefficient |S|! (|F|-|S|-1)! / |F|!.
double shapley_weight(int s_size, int f_size);

// Mean model score over the background rows of the hybrid vector that takes
// the features in s from the instance and everything else from the
// background row (interventional masking).
double coalition_value(const ScoreFn& model, std::span<const int> instance,
                       const std::vector<int>& s, const CodedDataset& background,
                       int class_index);

// Exact Shapley attribution by full coalition enumeration (feature count
// capped at 15). phi[i] sums the weighted marginal contributions of feature
// i over every subset of the remaining features.
std::vector<double> exact_shap(const ScoreFn& model, std::span<const int> instance,
                               const CodedDataset& background, int class_index);

struct ShapExplanation {
  std::vector<std::vector<double>> phi;  // [class][feature]
  std::vector<double> base_value;        // [class], mean score on background
  std::vector<double> full_value;        // [class], score on the instance
};

// All classes at once; one model evaluation pass per coalition.
ShapExplanation exact_shap_all(const ScoreFn& model, int n_classes,
                               std::span<const int> instance, const CodedDataset& background);

struct ShapSummary {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> mean_abs;         // [class][feature]
  std::vector<std::vector<std::size_t>> ranking;     // [class], feature indices, descending
  std::size_t instances = 0;

  std::string to_csv(const std::vector<std::string>& class_names) const;
};

// Per-class mean |phi| over the data rows. When per_instance is given it
// receives every row's full explanation in data order.
ShapSummary mean_abs_shap(const ScoreFn& model, int n_classes, const CodedDataset& data,
                          const CodedDataset& background,
                          std::vector<ShapExplanation>* per_instance = nullptr);

}  // namespace modecause
