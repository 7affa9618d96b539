#include "modecause/scm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <json.hpp>

namespace modecause {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::size_t rows_for_parents(const std::vector<ScmNode>& nodes,
                             const std::map<std::string, std::size_t>& index,
                             const ScmNode& node) {
  std::size_t rows = 1;
  for (const auto& p : node.parents) {
    auto it = index.find(p);
    if (it == index.end())
      throw std::invalid_argument("scm: node " + node.name + " has unknown parent " + p);
    rows *= nodes[it->second].levels.size();
  }
  return rows;
}

}  // namespace

DiscreteSCM::DiscreteSCM(std::vector<ScmNode> nodes)
    : nodes_(std::move(nodes)), dag_(build_dag(nodes_)) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index.emplace(nodes_[i].name, i).second)
      throw std::invalid_argument("scm: duplicate node " + nodes_[i].name);
  }
  for (const auto& node : nodes_) {
    if (node.levels.size() < 2)
      throw std::invalid_argument("scm: node " + node.name + " needs >= 2 levels");
    for (std::size_t i = 1; i < node.levels.size(); ++i)
      if (node.levels[i] != node.levels[i - 1] + 1)
        throw std::invalid_argument("scm: levels of " + node.name + " must be contiguous");
    const std::size_t rows = rows_for_parents(nodes_, index, node);
    if (node.cpt.size() != rows)
      throw std::invalid_argument("scm: cpt of " + node.name + " has " +
                                  std::to_string(node.cpt.size()) + " rows, expected " +
                                  std::to_string(rows));
    for (const auto& row : node.cpt) {
      if (row.size() != node.levels.size())
        throw std::invalid_argument("scm: cpt row width mismatch for " + node.name);
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0 || p > 1.0)
          throw std::invalid_argument("scm: probability out of [0,1] for " + node.name);
        sum += p;
      }
      if (std::fabs(sum - 1.0) > kRowSumTolerance)
        throw std::invalid_argument("scm: cpt row of " + node.name + " sums to " +
                                    std::to_string(sum));
    }
  }

  // Topological order, lowest node index first among the ready ones.
  std::vector<int> pending(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    pending[i] = static_cast<int>(nodes_[i].parents.size());
  std::vector<bool> done(nodes_.size(), false);
  while (topo_order_.size() < nodes_.size()) {
    bool progressed = false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (done[i] || pending[i] != 0) continue;
      topo_order_.push_back(i);
      done[i] = true;
      progressed = true;
      for (std::size_t j = 0; j < nodes_.size(); ++j)
        for (const auto& p : nodes_[j].parents)
          if (p == nodes_[i].name) --pending[j];
      break;
    }
    if (!progressed) throw std::invalid_argument("scm: parent structure has a cycle");
  }
}

Dag DiscreteSCM::build_dag(const std::vector<ScmNode>& nodes) {
  std::vector<std::string> names;
  for (const auto& n : nodes) names.push_back(n.name);
  MixedGraph g(names);
  for (const auto& n : nodes)
    for (const auto& p : n.parents) g.add_directed_edge(p, n.name);
  return Dag(std::move(g));
}

const ScmNode& DiscreteSCM::node(const std::string& name) const {
  for (const auto& n : nodes_)
    if (n.name == name) return n;
  throw std::invalid_argument("scm: unknown node " + name);
}

std::size_t DiscreteSCM::state_space_size() const {
  std::size_t total = 1;
  for (const auto& n : nodes_) {
    if (total > 1000000 / n.levels.size() + 1) return 1000001;
    total *= n.levels.size();
  }
  return total;
}

Codebook DiscreteSCM::codebook() const {
  std::vector<Variable> vars;
  for (const auto& n : nodes_) {
    Variable v;
    v.name = n.name;
    v.kind = n.levels.size() == 2 ? VarKind::kBinary : VarKind::kOrdinal;
    for (int code : n.levels) v.levels.push_back({code, std::to_string(code)});
    vars.push_back(std::move(v));
  }
  return Codebook(std::move(vars));
}

std::string DiscreteSCM::to_json() const {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : nodes_) {
    nlohmann::ordered_json jn;
    jn["name"] = n.name;
    jn["levels"] = n.levels;
    jn["parents"] = n.parents;
    jn["cpt"] = n.cpt;
    j["nodes"].push_back(jn);
  }
  return j.dump(2) + "\n";
}

DiscreteSCM DiscreteSCM::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<ScmNode> nodes;
  for (const auto& jn : j.at("nodes")) {
    ScmNode n;
    n.name = jn.at("name").get<std::string>();
    n.levels = jn.at("levels").get<std::vector<int>>();
    n.parents = jn.at("parents").get<std::vector<std::string>>();
    n.cpt = jn.at("cpt").get<std::vector<std::vector<double>>>();
    nodes.push_back(std::move(n));
  }
  return DiscreteSCM(std::move(nodes));
}

CodedDataset sample(const DiscreteSCM& scm, std::size_t n, std::uint64_t seed) {
  const auto& nodes = scm.nodes_;
  const std::size_t m = nodes.size();

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m; ++i) index[nodes[i].name] = i;
  std::vector<std::vector<std::size_t>> parent_idx(m);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& p : nodes[i].parents) parent_idx[i].push_back(index.at(p));

  std::vector<int> cells(n * m);
  std::vector<int> level_index(m);
  for (std::size_t r = 0; r < n; ++r) {
    Rng rng = Rng::derive(seed, r);
    for (std::size_t t : scm.topo_order_) {
      const ScmNode& node = nodes[t];
      std::size_t row = 0;
      for (std::size_t pi : parent_idx[t])
        row = row * nodes[pi].levels.size() + static_cast<std::size_t>(level_index[pi]);
      const int li = rng.categorical(node.cpt[row]);
      level_index[t] = li;
      cells[r * m + t] = node.levels[static_cast<std::size_t>(li)];
    }
  }

  auto cb = std::make_shared<Codebook>(scm.codebook());
  std::vector<std::string> columns;
  for (const auto& node : nodes) columns.push_back(node.name);
  return CodedDataset(std::move(cb), std::move(columns), std::move(cells));
}

std::size_t JointTable::index_of_var(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return i;
  throw std::invalid_argument("joint: unknown variable " + name);
}

void JointTable::state_at(std::size_t flat, std::vector<int>* out) const {
  out->resize(vars.size());
  for (std::size_t i = vars.size(); i-- > 0;) {
    const std::size_t l = levels[i].size();
    (*out)[i] = levels[i][flat % l];
    flat /= l;
  }
}

JointTable exact_joint(const DiscreteSCM& scm) {
  if (scm.state_space_size() > 1000000)
    throw std::runtime_error("exact_joint: state space exceeds 10^6");
  const auto& nodes = scm.scm_nodes();
  const std::size_t m = nodes.size();

  JointTable joint;
  std::size_t total = 1;
  for (const auto& n : nodes) {
    joint.vars.push_back(n.name);
    joint.levels.push_back(n.levels);
    total *= n.levels.size();
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m; ++i) index[nodes[i].name] = i;
  std::vector<std::vector<std::size_t>> parent_idx(m);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& p : nodes[i].parents) parent_idx[i].push_back(index.at(p));

  joint.probs.resize(total);
  std::vector<std::size_t> li(m, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t i = m; i-- > 0;) {
      li[i] = rem % nodes[i].levels.size();
      rem /= nodes[i].levels.size();
    }
    double p = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t row = 0;
      for (std::size_t pi : parent_idx[i]) row = row * nodes[pi].levels.size() + li[pi];
      p *= nodes[i].cpt[row][li[i]];
    }
    joint.probs[flat] = p;
  }
  return joint;
}

double true_ate(const DiscreteSCM& scm, const std::string& treatment, const std::string& outcome,
                int t1, int t0) {
  if (treatment == outcome) throw std::invalid_argument("true_ate: treatment equals outcome");
  const ScmNode& t_node = scm.node(treatment);
  scm.node(outcome);
  auto check_code = [&](int code) {
    if (std::find(t_node.levels.begin(), t_node.levels.end(), code) == t_node.levels.end())
      throw std::invalid_argument("true_ate: code " + std::to_string(code) +
                                  " is not a level of " + treatment);
  };
  check_code(t1);
  check_code(t0);

  // Interventions on the treatment cannot move the outcome without a
  // directed path; return an exact zero rather than a rounding residue.
  if (!scm.dag().graph().has_directed_path(treatment, outcome)) return 0.0;

  auto expected_outcome = [&](int forced) {
    std::vector<ScmNode> nodes = scm.scm_nodes();
    for (auto& n : nodes) {
      if (n.name != treatment) continue;
      const std::size_t li = static_cast<std::size_t>(
          std::find(n.levels.begin(), n.levels.end(), forced) - n.levels.begin());
      for (auto& row : n.cpt) {
        std::fill(row.begin(), row.end(), 0.0);
        row[li] = 1.0;
      }
    }
    const DiscreteSCM mutilated(std::move(nodes));
    const JointTable joint = exact_joint(mutilated);
    const std::size_t oc = joint.index_of_var(outcome);
    double e = 0.0;
    std::vector<int> state;
    for (std::size_t s = 0; s < joint.n_states(); ++s) {
      if (joint.probs[s] == 0.0) continue;
      joint.state_at(s, &state);
      e += joint.probs[s] * static_cast<double>(state[oc]);
    }
    return e;
  };

  return expected_outcome(t1) - expected_outcome(t0);
}

double conditional_mutual_information(const JointTable& joint, const std::string& a,
                                      const std::string& b, const std::set<std::string>& z) {
  const std::size_t ai = joint.index_of_var(a);
  const std::size_t bi = joint.index_of_var(b);
  if (a == b || z.count(a) || z.count(b))
    throw std::invalid_argument("cmi: a, b, z must be disjoint");
  std::vector<std::size_t> zi;
  for (const auto& v : z) zi.push_back(joint.index_of_var(v));

  std::map<std::vector<int>, double> p_abz, p_az, p_bz, p_z;
  std::vector<int> state;
  for (std::size_t s = 0; s < joint.n_states(); ++s) {
    const double p = joint.probs[s];
    if (p == 0.0) continue;
    joint.state_at(s, &state);
    std::vector<int> kz;
    for (std::size_t i : zi) kz.push_back(state[i]);
    std::vector<int> kaz = kz, kbz = kz, kabz = kz;
    kaz.push_back(state[ai]);
    kbz.push_back(state[bi]);
    kabz.push_back(state[ai]);
    kabz.push_back(state[bi]);
    p_z[kz] += p;
    p_az[kaz] += p;
    p_bz[kbz] += p;
    p_abz[kabz] += p;
  }

  double cmi = 0.0;
  for (const auto& [key, p] : p_abz) {
    std::vector<int> kz(key.begin(), key.end() - 2);
    std::vector<int> kaz = kz, kbz = kz;
    kaz.push_back(key[key.size() - 2]);
    kbz.push_back(key[key.size() - 1]);
    cmi += p * std::log(p * p_z.at(kz) / (p_az.at(kaz) * p_bz.at(kbz)));
  }
  return cmi;
}

namespace {

std::vector<double> bernoulli_row(double p1) { return {1.0 - p1, p1}; }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> normalized(std::vector<double> w) {
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  // Make the row sum exactly 1 in double arithmetic.
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) acc += w[i];
  w.back() = 1.0 - acc;
  return w;
}

// Discretized normal over the codes lo..hi.
std::vector<double> discretized_normal(int lo, int hi, double mu, double sigma) {
  std::vector<double> w;
  for (int k = lo; k <= hi; ++k) {
    const double zscore = (static_cast<double>(k) - mu) / sigma;
    w.push_back(std::exp(-0.5 * zscore * zscore));
  }
  return normalized(std::move(w));
}

struct ScmBuilder {
  std::vector<ScmNode> nodes;
  std::map<std::string, std::vector<int>> levels_of;

  void root(const std::string& name, std::vector<int> levels, std::vector<double> probs) {
    ScmNode n;
    n.name = name;
    n.levels = levels;
    n.cpt.push_back(normalized(std::move(probs)));
    levels_of[name] = std::move(levels);
    nodes.push_back(std::move(n));
  }

  // CPT rows generated over all parent assignments, last parent fastest;
  // row(codes) must return a probability vector over the node's levels.
  void child(const std::string& name, std::vector<int> levels,
             std::vector<std::string> parents,
             const std::function<std::vector<double>(const std::vector<int>&)>& row) {
    ScmNode n;
    n.name = name;
    n.levels = levels;
    n.parents = parents;
    std::vector<std::size_t> sizes;
    for (const auto& p : parents) sizes.push_back(levels_of.at(p).size());
    std::size_t total = 1;
    for (std::size_t s : sizes) total *= s;
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::vector<int> codes(parents.size());
      std::size_t rem = flat;
      for (std::size_t i = parents.size(); i-- > 0;) {
        codes[i] = levels_of.at(parents[i])[rem % sizes[i]];
        rem /= sizes[i];
      }
      n.cpt.push_back(normalized(row(codes)));
    }
    levels_of[name] = std::move(levels);
    nodes.push_back(std::move(n));
  }

  DiscreteSCM build() { return DiscreteSCM(std::move(nodes)); }
};

std::vector<int> range_levels(int lo, int hi) {
  std::vector<int> l;
  for (int c = lo; c <= hi; ++c) l.push_back(c);
  return l;
}

DiscreteSCM build_survey(const std::string& preset) {
  const std::vector<int> bin = {0, 1};
  ScmBuilder b;

  if (preset == "northlike") {
    b.root("sex", {1, 2}, {0.4625, 0.5375});
    b.root("race_x", bin, {0.8586, 0.1414});
    b.root("hhsize_x", {1, 2, 3}, {0.283, 0.437, 0.28});
    b.root("age_x", {1, 2, 3, 4}, {0.314, 0.451, 0.2059, 0.0291});
    b.root("work_purp", bin, {0.7125, 0.2875});
    b.child("hhinc", range_levels(1, 10), {"race_x", "hhsize_x", "age_x"}, [](const std::vector<int>& c) {
      const double mu = 5.6 + 1.0 * (c[1] - 2) - 2.3 * c[0] + 0.6 * (c[2] - 2);
      return discretized_normal(1, 10, mu, 2.2);
    });
    b.child("hhveh_x", bin, {"hhsize_x"}, [](const std::vector<int>& c) {
      const double p[] = {0.55, 0.78, 0.88};
      return bernoulli_row(p[c[0] - 1]);
    });
    b.child("distance_x", range_levels(1, 8), {"work_purp"}, [](const std::vector<int>& c) {
      if (c[0] == 0) return normalized({0.16, 0.16, 0.14, 0.16, 0.14, 0.14, 0.07, 0.03});
      return normalized({0.04, 0.07, 0.10, 0.16, 0.19, 0.26, 0.13, 0.05});
    });
  } else if (preset == "westlike") {
    b.root("sex", {1, 2}, {0.4192, 0.5808});
    b.root("race_x", bin, {0.7212, 0.2788});
    b.root("age_x", {1, 2, 3, 4}, {0.3288, 0.5201, 0.1447, 0.0065});
    b.root("work_purp", bin, {0.7132, 0.2868});
    b.child("hhsize_x", {1, 2, 3}, {"race_x"}, [](const std::vector<int>& c) {
      if (c[0] == 0) return normalized({0.26, 0.50, 0.24});
      return normalized({0.10, 0.36, 0.54});
    });
    b.child("hhinc", range_levels(1, 10), {"race_x", "hhsize_x"}, [](const std::vector<int>& c) {
      const double mu = 6.0 - 2.4 * c[0] + 0.7 * (c[1] - 2);
      return discretized_normal(1, 10, mu, 2.2);
    });
    b.child("hhveh_x", bin, {"hhsize_x", "hhinc"}, [](const std::vector<int>& c) {
      return bernoulli_row(sigmoid(1.15 + 0.75 * (c[0] - 2) + 0.45 * (c[1] - 5.5)));
    });
    b.root("distance_x", range_levels(1, 8),
           {0.1165, 0.1251, 0.1295, 0.2051, 0.2206, 0.0995, 0.0767, 0.0271});
  } else if (preset == "southlike") {
    b.root("sex", {1, 2}, {0.3728, 0.6272});
    b.root("race_x", bin, {0.3616, 0.6384});
    b.root("hhsize_x", {1, 2, 3}, {0.239, 0.2896, 0.4714});
    b.root("age_x", {1, 2, 3, 4}, {0.2688, 0.3712, 0.3137, 0.0463});
    b.root("work_purp", bin, {0.758, 0.242});
    b.child("hhinc", range_levels(1, 10), {"race_x", "hhsize_x", "age_x"}, [](const std::vector<int>& c) {
      const double mu = 5.2 + 0.6 * (c[1] - 2) - 1.9 * c[0] + 0.6 * (c[2] - 2);
      return discretized_normal(1, 10, mu, 2.4);
    });
    b.child("hhveh_x", bin, {"race_x", "hhsize_x", "hhinc"}, [](const std::vector<int>& c) {
      return bernoulli_row(sigmoid(1.6 + 0.5 * (c[1] - 2) + 0.15 * (c[2] - 5.5) - 0.7 * c[0]));
    });
    b.child("distance_x", range_levels(1, 8), {"work_purp"}, [](const std::vector<int>& c) {
      if (c[0] == 0) return normalized({0.0857, 0.0846, 0.1174, 0.1757, 0.1574, 0.1829, 0.1678, 0.0285});
      return normalized({0.03, 0.05, 0.09, 0.16, 0.18, 0.24, 0.19, 0.06});
    });
  } else {
    throw std::invalid_argument("unknown survey preset: " + preset);
  }

  // Mode indicators, driven by vehicle ownership and trip distance (race
  // also enters walking in the southlike preset).
  b.child("Car", bin, {"hhveh_x", "distance_x"}, [](const std::vector<int>& c) {
    return bernoulli_row(sigmoid(-3.4 + 3.5 * c[0] + 0.33 * (c[1] - 3)));
  });
  b.child("Public", bin, {"hhveh_x", "distance_x"}, [](const std::vector<int>& c) {
    return bernoulli_row(sigmoid(1.1 - 2.8 * c[0] + 0.30 * (c[1] - 5)));
  });
  if (preset == "southlike") {
    b.child("Walk", bin, {"race_x", "hhveh_x", "distance_x"}, [](const std::vector<int>& c) {
      return bernoulli_row(sigmoid(3.0 - 1.5 * c[1] - 1.10 * (c[2] - 1) - 0.8 * c[0]));
    });
  } else {
    b.child("Walk", bin, {"hhveh_x", "distance_x"}, [](const std::vector<int>& c) {
      return bernoulli_row(sigmoid(3.0 - 1.5 * c[0] - 1.10 * (c[1] - 1)));
    });
  }
  return b.build();
}

}  // namespace

bool is_survey_preset(const std::string& name) {
  return name == "northlike" || name == "westlike" || name == "southlike";
}

bool is_canonical_preset(const std::string& name) {
  return name == "chain" || name == "fork" || name == "collider" || name == "diamond" ||
         name == "confounded" || name == "null" || name == "indep";
}

DiscreteSCM make_survey_scm(const std::string& preset) {
  if (!is_survey_preset(preset)) throw std::invalid_argument("unknown survey preset: " + preset);
  return build_survey(preset);
}

DiscreteSCM make_canonical_scm(const std::string& preset) {
  const std::vector<int> bin = {0, 1};
  ScmBuilder b;
  auto shift = [](const std::vector<int>& c) {
    return bernoulli_row(c[0] == 1 ? 0.8 : 0.2);
  };
  auto join = [](const std::vector<int>& c) {
    return bernoulli_row(0.1 + 0.35 * c[0] + 0.35 * c[1]);
  };

  if (preset == "chain") {
    b.root("A", bin, {0.5, 0.5});
    b.child("B", bin, {"A"}, shift);
    b.child("C", bin, {"B"}, shift);
  } else if (preset == "fork") {
    b.root("B", bin, {0.5, 0.5});
    b.child("A", bin, {"B"}, shift);
    b.child("C", bin, {"B"}, shift);
  } else if (preset == "collider") {
    b.root("A", bin, {0.5, 0.5});
    b.root("B", bin, {0.5, 0.5});
    b.child("C", bin, {"A", "B"}, join);
  } else if (preset == "diamond") {
    b.root("A", bin, {0.5, 0.5});
    b.child("B", bin, {"A"}, shift);
    b.child("C", bin, {"A"}, shift);
    b.child("D", bin, {"B", "C"}, join);
  } else if (preset == "confounded") {
    b.root("Z", bin, {0.5, 0.5});
    b.child("T", bin, {"Z"}, [](const std::vector<int>& c) {
      return bernoulli_row(c[0] == 1 ? 0.7 : 0.3);
    });
    b.child("O", bin, {"Z", "T"}, [](const std::vector<int>& c) {
      return bernoulli_row(0.2 + 0.5 * c[1] + 0.2 * c[0]);
    });
  } else if (preset == "null") {
    b.root("Z", bin, {0.5, 0.5});
    b.child("T", bin, {"Z"}, [](const std::vector<int>& c) {
      return bernoulli_row(c[0] == 1 ? 0.7 : 0.3);
    });
    b.child("O", bin, {"Z"}, [](const std::vector<int>& c) {
      return bernoulli_row(c[0] == 1 ? 0.7 : 0.3);
    });
  } else if (preset == "indep") {
    b.root("A", bin, {0.5, 0.5});
    b.root("B", bin, {0.6, 0.4});
    b.root("C", bin, {0.4, 0.6});
  } else {
    throw std::invalid_argument("unknown canonical preset: " + preset);
  }
  return b.build();
}

DiscreteSCM random_scm(std::size_t n_nodes, double edge_prob, Rng& rng) {
  if (n_nodes < 2) throw std::invalid_argument("random_scm: need >= 2 nodes");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n_nodes; ++i) names.push_back("X" + std::to_string(i));

  std::vector<std::vector<std::size_t>> parents(n_nodes);
  for (std::size_t j = 1; j < n_nodes; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (rng.real() < edge_prob) parents[j].push_back(i);

  std::vector<std::size_t> level_count(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) level_count[i] = 2 + rng.below(2);

  std::vector<ScmNode> nodes;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    ScmNode n;
    n.name = names[i];
    for (std::size_t l = 0; l < level_count[i]; ++l) n.levels.push_back(static_cast<int>(l));
    std::size_t rows = 1;
    for (std::size_t p : parents[i]) {
      n.parents.push_back(names[p]);
      rows *= level_count[p];
    }
    // Weight ranges chosen so every normalized entry lands in [0.1, 0.9].
    const double lo = level_count[i] == 2 ? 1.0 : 2.0;
    const double hi = 9.0;
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> w(level_count[i]);
      for (double& v : w) v = lo + rng.real() * (hi - lo);
      double sum = 0.0;
      for (double v : w) sum += v;
      for (double& v : w) v /= sum;
      double acc = 0.0;
      for (std::size_t t = 0; t + 1 < w.size(); ++t) acc += w[t];
      w.back() = 1.0 - acc;
      n.cpt.push_back(std::move(w));
    }
    nodes.push_back(std::move(n));
  }
  return DiscreteSCM(std::move(nodes));
}

DiscreteSCM faithful_random_scm(std::size_t n_nodes, double edge_prob, double cmi_floor,
                                Rng& rng, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    DiscreteSCM scm = random_scm(n_nodes, edge_prob, rng);
    const JointTable joint = exact_joint(scm);
    const auto& names = scm.dag().nodes();
    const std::size_t n = names.size();

    bool faithful = true;
    for (std::size_t ai = 0; ai < n && faithful; ++ai) {
      for (std::size_t bi = ai + 1; bi < n && faithful; ++bi) {
        std::vector<std::string> rest;
        for (std::size_t k = 0; k < n; ++k)
          if (k != ai && k != bi) rest.push_back(names[k]);
        const std::size_t subsets = static_cast<std::size_t>(1) << rest.size();
        for (std::size_t mask = 0; mask < subsets && faithful; ++mask) {
          std::set<std::string> z;
          for (std::size_t k = 0; k < rest.size(); ++k)
            if (mask & (static_cast<std::size_t>(1) << k)) z.insert(rest[k]);
          if (!d_separated(scm.dag(), {names[ai]}, {names[bi]}, z) &&
              conditional_mutual_information(joint, names[ai], names[bi], z) <= cmi_floor)
            faithful = false;
        }
      }
    }
    if (faithful) return scm;
  }
  throw std::runtime_error("faithful_random_scm: no faithful draw within attempt budget");
}

}  // namespace modecause
