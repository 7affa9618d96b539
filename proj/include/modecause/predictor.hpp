#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "modecause/dataset.hpp"

namespace modecause {

double selu(double x);

struct MlpConfig {
  int hidden_units = 28;
  double learning_rate = 0.0005;
  int batch_size = 32;
  int max_epochs = 200;
  int patience = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

// Single-hidden-layer softmax classifier. Weights are row-major:
// w1[h*inputs + i], w2[c*hidden + h].
class MlpModel {
 public:
  MlpModel() = default;
  MlpModel(int inputs, int hidden, std::vector<std::string> class_labels, std::uint64_t seed);

  int inputs() const { return inputs_; }
  int hidden() const { return hidden_; }
  int classes() const { return static_cast<int>(class_labels_.size()); }
  const std::vector<std::string>& class_labels() const { return class_labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  void set_feature_names(std::vector<std::string> names) { feature_names_ = std::move(names); }

  std::vector<double>& w1() { return w1_; }
  std::vector<double>& b1() { return b1_; }
  std::vector<double>& w2() { return w2_; }
  std::vector<double>& b2() { return b2_; }
  const std::vector<double>& w1() const { return w1_; }
  const std::vector<double>& b1() const { return b1_; }
  const std::vector<double>& w2() const { return w2_; }
  const std::vector<double>& b2() const { return b2_; }

  std::vector<double> forward(std::span<const double> features) const;  // class probabilities

  // Mean cross-entropy over a batch; fills (if non-null) the gradient of the
  // loss with respect to every parameter, laid out as w1|b1|w2|b2.
  double loss_and_gradient(const std::vector<std::vector<double>>& x,
                           const std::vector<int>& y, std::vector<double>* grad) const;

  std::vector<double> parameters() const;        // w1|b1|w2|b2
  void set_parameters(std::span<const double> p);

  const std::vector<double>& train_loss_history() const { return train_loss_; }
  const std::vector<double>& val_loss_history() const { return val_loss_; }

  std::string to_json(const MlpConfig& config) const;
  static MlpModel from_json(const std::string& text);

 private:
  friend MlpModel train_mlp(const CodedDataset&, const CodedDataset&, const std::string&,
                            const MlpConfig&);
  int inputs_ = 0;
  int hidden_ = 0;
  std::vector<std::string> class_labels_;
  std::vector<std::string> feature_names_;
  std::vector<double> w1_, b1_, w2_, b2_;
  std::vector<double> train_loss_, val_loss_;
};

// Trains on the given dataset with target_var as the class column and every
// other column as a feature. Adaptive-moment (0.9, 0.999) minibatch descent
// on softmax cross-entropy; stops after `patience` epochs without validation
// improvement, restoring the best-validation weights. An empty validation
// set disables early stopping.
MlpModel train_mlp(const CodedDataset& train, const CodedDataset& val,
                   const std::string& target_var, const MlpConfig& config);

// Softmax probabilities per row; columns must match the training schema.
std::vector<std::vector<double>> predict(const MlpModel& model, const CodedDataset& data);

// argmax class indices, ties to the lowest class index.
std::vector<int> predict_classes(const MlpModel& model, const CodedDataset& data);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual);

// Stratified k-fold cross validation; SMOTE is applied to each fold's
// training portion only. Returns the k test-fold accuracies.
std::vector<double> cross_validate(const CodedDataset& data, const std::string& target_var,
                                   int k, int smote_k, const MlpConfig& config);

}  // namespace modecause
