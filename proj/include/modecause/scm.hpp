#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "modecause/dataset.hpp"
#include "modecause/graph.hpp"
#include "modecause/rng.hpp"

namespace modecause {

// One node's conditional probability table. Rows are indexed by the parent
// assignment in mixed radix over the parents' level counts, listed parents
// first and the last parent varying fastest.
struct ScmNode {
  std::string name;
  std::vector<int> levels;           // the node's codes, ascending
  std::vector<std::string> parents;  // fixed order, defines cpt row indexing
  std::vector<std::vector<double>> cpt;  // cpt[row][level index]
};

// Ground-truth discrete structural causal model: a DAG plus one CPT per
// node. Sampling, exact joints and do-operator effects are all derived from
// it, which is what makes it usable as a validation oracle.
class DiscreteSCM {
 public:
  explicit DiscreteSCM(std::vector<ScmNode> nodes);

  const std::vector<ScmNode>& scm_nodes() const { return nodes_; }
  const ScmNode& node(const std::string& name) const;
  const Dag& dag() const { return dag_; }
  std::size_t state_space_size() const;

  std::string to_json() const;
  static DiscreteSCM from_json(const std::string& text);

  // A codebook over the SCM variables (ordinal, labels = code text), so that
  // sampled datasets plug into the rest of the toolkit.
  Codebook codebook() const;

 private:
  std::vector<ScmNode> nodes_;
  std::vector<std::size_t> topo_order_;  // indices into nodes_
  Dag dag_;
  friend CodedDataset sample(const DiscreteSCM&, std::size_t, std::uint64_t);

  static Dag build_dag(const std::vector<ScmNode>& nodes);
};

// Ancestral sampling, one independent substream per row so chunked parallel
// sampling reproduces the serial result.
CodedDataset sample(const DiscreteSCM& scm, std::size_t n, std::uint64_t seed);

// Full joint distribution, assignments in mixed radix over the node levels
// (node order as in the SCM, last node fastest).
struct JointTable {
  std::vector<std::string> vars;
  std::vector<std::vector<int>> levels;
  std::vector<double> probs;

  std::size_t index_of_var(const std::string& name) const;
  std::size_t n_states() const { return probs.size(); }
  void state_at(std::size_t flat, std::vector<int>* out) const;
};

JointTable exact_joint(const DiscreteSCM& scm);

// E[outcome | do(treatment=t1)] - E[outcome | do(treatment=t0)], by
// enumerating the mutilated joint. Outcome codes are treated as numeric.
double true_ate(const DiscreteSCM& scm, const std::string& treatment, const std::string& outcome,
                int t1, int t0);

// Survey-like presets over the Table 1 variables: northlike, westlike,
// southlike. Small canonical structures for validation: chain (A->B->C),
// fork (A<-B->C), collider (A->C<-B), diamond (A->B->D, A->C->D),
// confounded (Z->T, Z->O, T->O), null (Z->T, Z->O), indep (A, B, C).
DiscreteSCM make_survey_scm(const std::string& preset);
DiscreteSCM make_canonical_scm(const std::string& preset);
bool is_survey_preset(const std::string& name);
bool is_canonical_preset(const std::string& name);

// Conditional mutual information I(a; b | z) in nats from an exact joint.
double conditional_mutual_information(const JointTable& joint, const std::string& a,
                                      const std::string& b, const std::set<std::string>& z);

// Random DAG + CPTs with entries bounded away from 0 and 1. Level counts
// drawn from {2, 3}.
DiscreteSCM random_scm(std::size_t n_nodes, double edge_prob, Rng& rng);

// Draws random SCMs until every non-d-separated singleton triple carries
// CMI > cmi_floor (redrawing CPTs screens out near-unfaithful draws).
DiscreteSCM faithful_random_scm(std::size_t n_nodes, double edge_prob, double cmi_floor,
                                Rng& rng, int max_attempts = 50);

}  // namespace modecause
