#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "modecause/dataset.hpp"
#include "modecause/graph.hpp"

namespace modecause {

struct DmlConfig {
  int n_folds = 2;
  int gb_stages = 100;
  int gb_depth = 3;
  double gb_rate = 0.1;
  double lasso_lambda = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

// Backdoor covariates for the total effect of treatment on outcome under the
// discovered graph: the treatment's parents. Errors if an undirected edge
// touches the treatment, since its parent set is then ambiguous.
std::set<std::string> adjustment_set(const MixedGraph& g, const std::string& treatment,
                                     const std::string& outcome);

// Stagewise sum of depth-limited regression trees on squared-loss residuals.
class GradientBoost {
 public:
  GradientBoost(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                const DmlConfig& config);
  double predict(const std::vector<double>& row) const;
  std::vector<double> predict_all(const std::vector<std::vector<double>>& x) const;

 private:
  struct Node {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0; // goes left when value <= threshold
    double value = 0.0;
    int left = -1, right = -1;
  };
  struct Tree {
    std::vector<Node> nodes;
    double predict(const std::vector<double>& row) const;
  };

  Tree fit_tree(const std::vector<std::vector<double>>& x, const std::vector<double>& residual,
                int max_depth) const;

  double base_ = 0.0;
  double rate_ = 0.1;
  std::vector<Tree> trees_;
};

GradientBoost gradient_boost_fit(const std::vector<std::vector<double>>& x,
                                 const std::vector<double>& y, const DmlConfig& config);

// argmin_b sum(y - b*x)^2 / (2n) + lambda*|b|; no intercept. Closed-form
// soft-thresholded least squares. Errors when x is constant.
double lasso_fit(const std::vector<double>& x, const std::vector<double>& y, double lambda);

// Double machine learning ATE per one-code increment of the treatment:
// K-fold cross-fitted nuisances (gradient boosting of outcome and treatment
// on z; fold means when z is empty), then the lasso slope of pooled outcome
// residuals on pooled treatment residuals, fitted on standardized residuals
// and mapped back to the original scale.
double dml_ate(const CodedDataset& data, const std::string& treatment, const std::string& outcome,
               const std::set<std::string>& z, const DmlConfig& config);

struct EffectsTable {
  std::vector<std::string> variables;          // causes = effects = graph nodes
  std::vector<std::vector<double>> values;     // [cause][effect]; diagonal unused
  std::vector<std::vector<bool>> has_path;     // directed path in the graph

  double at(const std::string& cause, const std::string& effect) const;
  std::string to_csv(int decimals) const;      // decimals < 0 -> full precision
};

// One DML estimate per ordered (cause, effect) pair with a directed path;
// exactly 0.0 where the graph has none.
EffectsTable total_effects_table(const MixedGraph& g, const CodedDataset& data,
                                 const DmlConfig& config);

}  // namespace modecause
