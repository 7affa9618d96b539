#include "modecause/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "modecause/rng.hpp"

namespace modecause {

namespace {
constexpr double kSeluLambda = 1.0507009873554805;
constexpr double kSeluAlpha = 1.6732632423543772;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
}  // namespace

double selu(double x) {
  return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * (std::exp(x) - 1.0);
}

namespace {
double selu_grad(double x) {
  return x > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
}
}  // namespace

void MlpConfig::validate() const {
  if (hidden_units < 1) throw std::invalid_argument("mlp: hidden_units must be >= 1");
  if (learning_rate <= 0.0) throw std::invalid_argument("mlp: learning_rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("mlp: batch_size must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("mlp: max_epochs must be >= 1");
  if (patience < 1) throw std::invalid_argument("mlp: patience must be >= 1");
}

MlpModel::MlpModel(int inputs, int hidden, std::vector<std::string> class_labels,
                   std::uint64_t seed)
    : inputs_(inputs), hidden_(hidden), class_labels_(std::move(class_labels)) {
  const int classes = static_cast<int>(class_labels_.size());
  if (inputs < 1 || hidden < 1 || classes < 2)
    throw std::invalid_argument("mlp: bad layer sizes");
  w1_.resize(static_cast<std::size_t>(hidden) * inputs);
  b1_.assign(static_cast<std::size_t>(hidden), 0.0);
  w2_.resize(static_cast<std::size_t>(classes) * hidden);
  b2_.assign(static_cast<std::size_t>(classes), 0.0);

  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(inputs));
  for (double& w : w1_) w = rng.gaussian() * s1;
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& w : w2_) w = rng.gaussian() * s2;
}

std::vector<double> MlpModel::forward(std::span<const double> features) const {
  if (static_cast<int>(features.size()) != inputs_)
    throw std::invalid_argument("mlp: feature width mismatch");
  const int classes = this->classes();
  std::vector<double> h(static_cast<std::size_t>(hidden_));
  for (int j = 0; j < hidden_; ++j) {
    double z = b1_[static_cast<std::size_t>(j)];
    for (int i = 0; i < inputs_; ++i)
      z += w1_[static_cast<std::size_t>(j) * inputs_ + i] * features[static_cast<std::size_t>(i)];
    h[static_cast<std::size_t>(j)] = selu(z);
  }
  std::vector<double> logits(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    double z = b2_[static_cast<std::size_t>(c)];
    for (int j = 0; j < hidden_; ++j)
      z += w2_[static_cast<std::size_t>(c) * hidden_ + j] * h[static_cast<std::size_t>(j)];
    logits[static_cast<std::size_t>(c)] = z;
  }
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double denom = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    denom += v;
  }
  for (double& v : logits) v /= denom;
  return logits;
}

double MlpModel::loss_and_gradient(const std::vector<std::vector<double>>& x,
                                   const std::vector<int>& y, std::vector<double>* grad) const {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("mlp: bad batch");
  const int classes = this->classes();
  const std::size_t nw1 = w1_.size(), nb1 = b1_.size(), nw2 = w2_.size(), nb2 = b2_.size();
  if (grad) grad->assign(nw1 + nb1 + nw2 + nb2, 0.0);

  const double inv_b = 1.0 / static_cast<double>(x.size());
  double loss = 0.0;
  std::vector<double> pre(static_cast<std::size_t>(hidden_));
  std::vector<double> h(static_cast<std::size_t>(hidden_));
  std::vector<double> logits(static_cast<std::size_t>(classes));

  for (std::size_t r = 0; r < x.size(); ++r) {
    const auto& row = x[r];
    for (int j = 0; j < hidden_; ++j) {
      double z = b1_[static_cast<std::size_t>(j)];
      for (int i = 0; i < inputs_; ++i)
        z += w1_[static_cast<std::size_t>(j) * inputs_ + i] * row[static_cast<std::size_t>(i)];
      pre[static_cast<std::size_t>(j)] = z;
      h[static_cast<std::size_t>(j)] = selu(z);
    }
    for (int c = 0; c < classes; ++c) {
      double z = b2_[static_cast<std::size_t>(c)];
      for (int j = 0; j < hidden_; ++j)
        z += w2_[static_cast<std::size_t>(c) * hidden_ + j] * h[static_cast<std::size_t>(j)];
      logits[static_cast<std::size_t>(c)] = z;
    }
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double denom = 0.0;
    for (int c = 0; c < classes; ++c) denom += std::exp(logits[static_cast<std::size_t>(c)] - mx);
    const double log_denom = std::log(denom) + mx;
    const int target = y[r];
    if (target < 0 || target >= classes) throw std::invalid_argument("mlp: label out of range");
    loss += (log_denom - logits[static_cast<std::size_t>(target)]) * inv_b;

    if (!grad) continue;
    std::vector<double> dlogit(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) {
      const double p = std::exp(logits[static_cast<std::size_t>(c)] - log_denom);
      dlogit[static_cast<std::size_t>(c)] = (p - (c == target ? 1.0 : 0.0)) * inv_b;
    }
    double* gw1 = grad->data();
    double* gb1 = gw1 + nw1;
    double* gw2 = gb1 + nb1;
    double* gb2 = gw2 + nw2;
    std::vector<double> dh(static_cast<std::size_t>(hidden_), 0.0);
    for (int c = 0; c < classes; ++c) {
      const double d = dlogit[static_cast<std::size_t>(c)];
      gb2[c] += d;
      for (int j = 0; j < hidden_; ++j) {
        gw2[static_cast<std::size_t>(c) * hidden_ + j] += d * h[static_cast<std::size_t>(j)];
        dh[static_cast<std::size_t>(j)] += d * w2_[static_cast<std::size_t>(c) * hidden_ + j];
      }
    }
    for (int j = 0; j < hidden_; ++j) {
      const double dp = dh[static_cast<std::size_t>(j)] * selu_grad(pre[static_cast<std::size_t>(j)]);
      gb1[j] += dp;
      for (int i = 0; i < inputs_; ++i)
        gw1[static_cast<std::size_t>(j) * inputs_ + i] += dp * row[static_cast<std::size_t>(i)];
    }
  }
  return loss;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> p;
  p.reserve(w1_.size() + b1_.size() + w2_.size() + b2_.size());
  p.insert(p.end(), w1_.begin(), w1_.end());
  p.insert(p.end(), b1_.begin(), b1_.end());
  p.insert(p.end(), w2_.begin(), w2_.end());
  p.insert(p.end(), b2_.begin(), b2_.end());
  return p;
}

void MlpModel::set_parameters(std::span<const double> p) {
  if (p.size() != w1_.size() + b1_.size() + w2_.size() + b2_.size())
    throw std::invalid_argument("mlp: parameter size mismatch");
  std::size_t off = 0;
  std::copy(p.begin() + off, p.begin() + off + w1_.size(), w1_.begin());
  off += w1_.size();
  std::copy(p.begin() + off, p.begin() + off + b1_.size(), b1_.begin());
  off += b1_.size();
  std::copy(p.begin() + off, p.begin() + off + w2_.size(), w2_.begin());
  off += w2_.size();
  std::copy(p.begin() + off, p.begin() + off + b2_.size(), b2_.begin());
}

namespace {

struct Matrixized {
  std::vector<std::vector<double>> x;
  std::vector<int> y;  // class level indices
  std::vector<std::string> feature_names;
};

Matrixized matrixize(const CodedDataset& data, const std::string& target_var,
                     const std::vector<std::string>* feature_order = nullptr) {
  const std::size_t target_col = data.column_index(target_var);
  const Variable& target = data.column_variable(target_col);
  Matrixized m;
  if (feature_order) {
    m.feature_names = *feature_order;
  } else {
    for (std::size_t c = 0; c < data.n_cols(); ++c)
      if (c != target_col) m.feature_names.push_back(data.columns()[c]);
  }
  std::vector<std::size_t> cols;
  for (const auto& name : m.feature_names) cols.push_back(data.column_index(name));
  m.x.resize(data.n_rows());
  m.y.resize(data.n_rows());
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    m.x[r].reserve(cols.size());
    for (std::size_t c : cols) m.x[r].push_back(static_cast<double>(data.cell(r, c)));
    m.y[r] = target.level_index(data.cell(r, target_col));
  }
  return m;
}

}  // namespace

MlpModel train_mlp(const CodedDataset& train, const CodedDataset& val,
                   const std::string& target_var, const MlpConfig& config) {
  config.validate();
  if (train.n_rows() == 0) throw std::invalid_argument("train_mlp: empty training set");
  const Variable& target = train.column_variable(train.column_index(target_var));

  Matrixized tr = matrixize(train, target_var);
  Matrixized va = matrixize(val, target_var, &tr.feature_names);

  std::vector<long> counts(target.levels.size(), 0);
  for (int y : tr.y) ++counts[static_cast<std::size_t>(y)];
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] == 0)
      throw std::runtime_error("train_mlp: class " + target.levels[c].label +
                               " absent from training data");

  std::vector<std::string> labels;
  for (const auto& lv : target.levels) labels.push_back(lv.label);
  MlpModel model(static_cast<int>(tr.feature_names.size()), config.hidden_units, labels,
                 config.seed);
  model.set_feature_names(tr.feature_names);

  Rng rng = Rng::derive(config.seed, 0x7261696eULL);  // training shuffle stream
  const std::size_t n = tr.x.size();
  const std::size_t n_params = model.parameters().size();
  std::vector<double> m1(n_params, 0.0), m2(n_params, 0.0);
  std::vector<double> grad;
  long step = 0;

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_params = model.parameters();
  int epochs_since_best = 0;
  const bool early_stop = va.x.size() > 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto perm = rng.permutation(n);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      std::vector<std::vector<double>> bx;
      std::vector<int> by;
      bx.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        bx.push_back(tr.x[perm[i]]);
        by.push_back(tr.y[perm[i]]);
      }
      model.loss_and_gradient(bx, by, &grad);

      ++step;
      auto params = model.parameters();
      const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
      for (std::size_t p = 0; p < n_params; ++p) {
        m1[p] = kAdamBeta1 * m1[p] + (1.0 - kAdamBeta1) * grad[p];
        m2[p] = kAdamBeta2 * m2[p] + (1.0 - kAdamBeta2) * grad[p] * grad[p];
        params[p] -= config.learning_rate * (m1[p] / bc1) / (std::sqrt(m2[p] / bc2) + kAdamEps);
      }
      model.set_parameters(params);
    }

    model.train_loss_.push_back(model.loss_and_gradient(tr.x, tr.y, nullptr));
    if (early_stop) {
      const double vl = model.loss_and_gradient(va.x, va.y, nullptr);
      model.val_loss_.push_back(vl);
      if (vl < best_val) {
        best_val = vl;
        best_params = model.parameters();
        epochs_since_best = 0;
      } else if (++epochs_since_best >= config.patience) {
        break;
      }
    }
  }
  if (early_stop) model.set_parameters(best_params);
  return model;
}

std::vector<std::vector<double>> predict(const MlpModel& model, const CodedDataset& data) {
  std::vector<std::size_t> cols;
  for (const auto& name : model.feature_names()) cols.push_back(data.column_index(name));
  std::vector<std::vector<double>> out(data.n_rows());
  std::vector<double> row(cols.size());
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      row[i] = static_cast<double>(data.cell(r, cols[i]));
    out[r] = model.forward(row);
  }
  return out;
}

std::vector<int> predict_classes(const MlpModel& model, const CodedDataset& data) {
  const auto probs = predict(model, data);
  std::vector<int> out(probs.size());
  for (std::size_t r = 0; r < probs.size(); ++r) {
    int best = 0;
    for (std::size_t c = 1; c < probs[r].size(); ++c)
      if (probs[r][c] > probs[r][static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    out[r] = best;
  }
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("accuracy: empty vectors");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == actual[i]) ++hits;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::vector<double> cross_validate(const CodedDataset& data, const std::string& target_var,
                                   int k, int smote_k, const MlpConfig& config) {
  if (k < 2) throw std::invalid_argument("cross_validate: k must be >= 2");
  const std::size_t target_col = data.column_index(target_var);
  const Variable& target = data.column_variable(target_col);

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t r = 0; r < data.n_rows(); ++r) by_class[data.cell(r, target_col)].push_back(r);
  for (const auto& [code, rows] : by_class)
    if (rows.size() < static_cast<std::size_t>(k))
      throw std::runtime_error("cross_validate: class " + target.levels[static_cast<std::size_t>(
                                   target.level_index(code))].label +
                               " has fewer rows than folds");

  // Stratified folds: shuffle within each class, deal into k chunks.
  Rng rng = Rng::derive(config.seed, 0x666f6c64ULL);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (const auto& [code, rows] : by_class) {
    const auto perm = rng.permutation(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      folds[i * static_cast<std::size_t>(k) / rows.size()].push_back(rows[perm[i]]);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());

  std::vector<double> accuracies;
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows;
    for (int g = 0; g < k; ++g)
      if (g != f)
        train_rows.insert(train_rows.end(), folds[static_cast<std::size_t>(g)].begin(),
                          folds[static_cast<std::size_t>(g)].end());
    std::sort(train_rows.begin(), train_rows.end());

    CodedDataset train_part = data.select_rows(train_rows);
    CodedDataset test_part = data.select_rows(folds[static_cast<std::size_t>(f)]);

    // Carve a validation slice for early stopping, then balance the rest.
    SplitSpec spec;
    spec.fractions = {{"fit", 0.9}, {"val", 0.1}};
    spec.stratify_on = target_var;
    spec.seed = Rng::derive(config.seed, static_cast<std::uint64_t>(f)).next_u64();
    auto parts = stratified_split(train_part, spec);
    CodedDataset fit_part = smote(parts[0], target_var, smote_k,
                                  Rng::derive(config.seed, 1000 + static_cast<std::uint64_t>(f)).next_u64());

    MlpConfig fold_config = config;
    fold_config.seed = Rng::derive(config.seed, 2000 + static_cast<std::uint64_t>(f)).next_u64();
    const MlpModel model = train_mlp(fit_part, parts[1], target_var, fold_config);

    std::vector<int> actual;
    for (std::size_t r = 0; r < test_part.n_rows(); ++r)
      actual.push_back(target.level_index(test_part.cell(r, test_part.column_index(target_var))));
    accuracies.push_back(accuracy(predict_classes(model, test_part), actual));
  }
  return accuracies;
}

std::string MlpModel::to_json(const MlpConfig& config) const {
  nlohmann::ordered_json j;
  j["inputs"] = inputs_;
  j["hidden"] = hidden_;
  j["class_labels"] = class_labels_;
  j["feature_names"] = feature_names_;
  j["w1"] = w1_;
  j["b1"] = b1_;
  j["w2"] = w2_;
  j["b2"] = b2_;
  j["train_loss"] = train_loss_;
  j["val_loss"] = val_loss_;
  j["config"] = {{"hidden_units", config.hidden_units},
                 {"learning_rate", config.learning_rate},
                 {"batch_size", config.batch_size},
                 {"max_epochs", config.max_epochs},
                 {"patience", config.patience},
                 {"seed", config.seed}};
  return j.dump(2) + "\n";
}

MlpModel MlpModel::from_json(const std::string& text) {
  // Tolerate a provenance comment line ahead of the JSON body.
  std::string body = text;
  if (body.starts_with("//") || body.starts_with("#"))
    body = body.substr(body.find('\n') + 1);
  const auto j = nlohmann::json::parse(body);
  MlpModel m;
  m.inputs_ = j.at("inputs").get<int>();
  m.hidden_ = j.at("hidden").get<int>();
  m.class_labels_ = j.at("class_labels").get<std::vector<std::string>>();
  m.feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
  m.w1_ = j.at("w1").get<std::vector<double>>();
  m.b1_ = j.at("b1").get<std::vector<double>>();
  m.w2_ = j.at("w2").get<std::vector<double>>();
  m.b2_ = j.at("b2").get<std::vector<double>>();
  m.train_loss_ = j.at("train_loss").get<std::vector<double>>();
  m.val_loss_ = j.at("val_loss").get<std::vector<double>>();
  if (m.w1_.size() != static_cast<std::size_t>(m.inputs_) * m.hidden_ ||
      m.w2_.size() != m.class_labels_.size() * static_cast<std::size_t>(m.hidden_))
    throw std::runtime_error("mlp: corrupt model file");
  return m;
}

}  // namespace modecause
