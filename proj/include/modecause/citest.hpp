#pragma once

#include <map>
#include <string>
#include <vector>

#include "modecause/dataset.hpp"

namespace modecause {

struct CiResult {
  double statistic = 0.0;
  long dof = 0;
  double p_value = 1.0;
  bool independent = false;  // p_value > alpha, and only when informative
  bool informative = false;  // false when the data was too sparse to test
};

// Co-occurrence counts of x and y among rows matching the conditioning
// assignment, indexed by codebook level.
std::vector<std::vector<long>> contingency_table(const CodedDataset& data, const std::string& x,
                                                 const std::string& y,
                                                 const std::map<std::string, int>& z_assignment);

// Pearson chi-square of x against y, stratified over the observed
// assignments of z. Strata with fewer than 5 * (#cells) rows are skipped;
// each tested stratum contributes (r-1)(c-1) dof over its nonzero marginals.
CiResult chi_square_ci(const CodedDataset& data, const std::string& x, const std::string& y,
                       const std::vector<std::string>& z, double alpha);

}  // namespace modecause
