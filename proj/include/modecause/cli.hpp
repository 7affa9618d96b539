#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modecause/effects.hpp"
#include "modecause/predictor.hpp"

namespace modecause {

struct RunConfig {
  std::string input_path;
  std::string preset;
  std::string codebook_path;
  std::string knowledge_path;
  std::string graph_path;
  std::string effects_path;
  std::string shap_path;
  std::string out_dir;

  std::size_t n = 1000;
  double alpha = 0.05;
  DmlConfig dml;
  MlpConfig mlp;
  int smote_k = 5;
  int cv_folds = 5;
  std::size_t shap_background = 100;
  std::size_t shap_instances = 500;
  std::uint64_t seed = 0;
  bool seed_set = false;

  void load_json(const std::string& text);   // config file; flags override later
  std::string canonical() const;             // semantic fields only, for the hash
};

namespace cli {

// Entry point shared by the binary and the tests. Returns the process exit
// code; errors are printed to stderr as a single "error: ..." line.
int run(const std::vector<std::string>& args);

}  // namespace cli
}  // namespace modecause
