#include "modecause/discovery.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace modecause {

bool Knowledge::orientation_allowed(const std::string& from, const std::string& to) const {
  if (sinks.count(from)) return false;    // sinks cause nothing
  if (sources.count(to)) return false;    // sources are caused by nothing
  if (forbidden.count({from, to})) return false;
  return true;
}

void Knowledge::validate() const {
  for (const auto& s : sinks)
    if (sources.count(s))
      throw std::invalid_argument("knowledge: " + s + " is both sink and source");
  for (const auto& [a, b] : required_orientations) {
    if (!orientation_allowed(a, b))
      throw std::invalid_argument("knowledge: required orientation " + a + " -> " + b +
                                  " contradicts the forbidden rules");
  }
}

std::string Knowledge::to_json() const {
  nlohmann::ordered_json j;
  j["sinks"] = std::vector<std::string>(sinks.begin(), sinks.end());
  j["sources"] = std::vector<std::string>(sources.begin(), sources.end());
  j["forbidden"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : forbidden) j["forbidden"].push_back({a, b});
  j["required_orientations"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : required_orientations) j["required_orientations"].push_back({a, b});
  return j.dump(2) + "\n";
}

Knowledge Knowledge::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Knowledge k;
  if (j.contains("sinks"))
    for (const auto& s : j.at("sinks")) k.sinks.insert(s.get<std::string>());
  if (j.contains("sources"))
    for (const auto& s : j.at("sources")) k.sources.insert(s.get<std::string>());
  if (j.contains("forbidden"))
    for (const auto& p : j.at("forbidden"))
      k.forbidden.insert({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
  if (j.contains("required_orientations"))
    for (const auto& p : j.at("required_orientations"))
      k.required_orientations.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
  k.validate();
  return k;
}

Knowledge Knowledge::table1_default() {
  Knowledge k;
  k.sinks = {"Car", "Public", "Walk"};
  k.sources = {"sex", "race_x", "age_x"};
  k.forbidden = {{"sex", "hhsize_x"}, {"age_x", "hhsize_x"}, {"hhinc", "hhsize_x"},
                 {"hhveh_x", "hhinc"}};
  k.required_orientations = {{"work_purp", "distance_x"}, {"hhsize_x", "hhinc"}};
  k.validate();
  return k;
}

namespace {

std::pair<std::string, std::string> pair_key(const std::string& a, const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// All size-l subsets of candidates, enumerated lexicographically by
// candidate position.
void for_each_subset(const std::vector<std::string>& candidates, std::size_t l,
                     const std::function<bool(const std::vector<std::string>&)>& fn) {
  if (l > candidates.size()) return;
  std::vector<std::size_t> pick(l);
  for (std::size_t i = 0; i < l; ++i) pick[i] = i;
  std::vector<std::string> subset(l);
  while (true) {
    for (std::size_t i = 0; i < l; ++i) subset[i] = candidates[pick[i]];
    if (fn(subset)) return;
    // advance combination
    std::size_t i = l;
    while (i-- > 0) {
      if (pick[i] + (l - i) < candidates.size()) {
        ++pick[i];
        for (std::size_t j = i + 1; j < l; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
    if (l == 0) return;
  }
}

}  // namespace

PcSkeletonResult pc_skeleton(const CodedDataset& data, double alpha, const Knowledge& knowledge) {
  if (data.n_cols() < 2) throw std::invalid_argument("pc_skeleton: need >= 2 variables");
  if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("pc_skeleton: alpha in (0,1)");
  knowledge.validate();

  const std::vector<std::string>& vars = data.columns();
  const std::size_t n = vars.size();
  MixedGraph g(vars);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      // A pair forbidden in both directions can never carry an edge.
      if (!knowledge.orientation_allowed(vars[i], vars[j]) &&
          !knowledge.orientation_allowed(vars[j], vars[i]))
        continue;
      g.add_undirected_edge(vars[i], vars[j]);
    }

  PcSkeletonResult result{std::move(g), {}, 0};
  MixedGraph& skeleton = result.skeleton;

  for (std::size_t l = 0;; ++l) {
    // PC-stable: freeze the adjacency sets for this level.
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& v : vars) {
      const auto nb = skeleton.neighbors(v);
      adj[v] = std::vector<std::string>(nb.begin(), nb.end());
      // neighbor lists in variable-index order for reproducible enumeration
      std::sort(adj[v].begin(), adj[v].end(), [&](const std::string& a, const std::string& b) {
        return data.column_index(a) < data.column_index(b);
      });
    }

    bool any_candidate = false;
    std::vector<std::pair<std::string, std::string>> removals;

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::string& a = vars[i];
        const std::string& b = vars[j];
        if (!skeleton.has_undirected_edge(a, b)) continue;

        bool removed = false;
        for (int side = 0; side < 2 && !removed; ++side) {
          const std::string& from = side == 0 ? a : b;
          const std::string& other = side == 0 ? b : a;
          std::vector<std::string> candidates;
          for (const auto& v : adj[from])
            if (v != other) candidates.push_back(v);
          if (candidates.size() < l) continue;
          any_candidate = true;
          for_each_subset(candidates, l, [&](const std::vector<std::string>& s) {
            ++result.tests_performed;
            const CiResult ci = chi_square_ci(data, a, b, s, alpha);
            if (ci.informative && ci.independent) {
              removals.emplace_back(a, b);
              result.sepsets[pair_key(a, b)] = s;
              removed = true;
              return true;
            }
            return false;
          });
        }
      }
    }

    for (const auto& [a, b] : removals) skeleton.remove_edge(a, b);
    if (!any_candidate) break;  // every remaining edge has fewer neighbors than l
  }
  return result;
}

MixedGraph orient_colliders(const MixedGraph& skeleton, const SepSets& sepsets,
                            const Knowledge& knowledge) {
  MixedGraph g = skeleton;
  const auto& nodes = g.nodes();
  for (std::size_t bi = 0; bi < nodes.size(); ++bi) {
    const std::string& b = nodes[bi];
    for (std::size_t ai = 0; ai < nodes.size(); ++ai) {
      for (std::size_t ci = ai + 1; ci < nodes.size(); ++ci) {
        if (ai == bi || ci == bi) continue;
        const std::string& a = nodes[ai];
        const std::string& c = nodes[ci];
        if (!g.adjacent(a, b) || !g.adjacent(c, b) || g.adjacent(a, c)) continue;
        const auto it = sepsets.find(pair_key(a, c));
        if (it == sepsets.end()) continue;  // pair never separated by a test
        if (std::find(it->second.begin(), it->second.end(), b) != it->second.end()) continue;
        if (!knowledge.orientation_allowed(a, b) || !knowledge.orientation_allowed(c, b)) continue;
        if (g.has_undirected_edge(a, b)) g.orient(a, b);
        if (g.has_undirected_edge(c, b)) g.orient(c, b);
      }
    }
  }
  return g;
}

namespace {

// Orients from->to, erroring if the edge is already directed the other way.
void force_direction(MixedGraph& g, const std::string& from, const std::string& to) {
  if (g.has_directed_edge(from, to)) return;
  if (g.has_directed_edge(to, from))
    throw std::runtime_error("knowledge contradiction: edge between " + from + " and " + to +
                             " is forced in both directions");
  g.orient(from, to);
}

}  // namespace

MixedGraph apply_meek_rules(const MixedGraph& input, const Knowledge& knowledge) {
  knowledge.validate();
  MixedGraph g = input;
  const auto& nodes = g.nodes();

  auto allowed = [&](const std::string& from, const std::string& to) {
    return knowledge.orientation_allowed(from, to);
  };

  bool changed = true;
  while (changed) {
    changed = false;

    // Knowledge: undirected edges incident to a sink or source have only one
    // legal direction.
    for (const auto& [a, b] : g.undirected_edges()) {
      const bool ab = allowed(a, b);
      const bool ba = allowed(b, a);
      if (ab && !ba && (knowledge.sinks.count(b) || knowledge.sources.count(a))) {
        force_direction(g, a, b);
        changed = true;
      } else if (ba && !ab && (knowledge.sinks.count(a) || knowledge.sources.count(b))) {
        force_direction(g, b, a);
        changed = true;
      } else if (!ab && !ba) {
        throw std::runtime_error("knowledge contradiction: edge between " + a + " and " + b +
                                 " has no legal direction");
      }
    }

    // R1: a->b — c with a, c non-adjacent  =>  b->c
    for (const auto& b : nodes) {
      for (const auto& a : g.parents(b)) {
        for (const auto& c : g.undirected_neighbors(b)) {
          if (c == a || g.adjacent(a, c) || !allowed(b, c)) continue;
          g.orient(b, c);
          changed = true;
        }
      }
    }
    // R2: a->b->c with a — c  =>  a->c
    for (const auto& b : nodes) {
      for (const auto& a : g.parents(b)) {
        for (const auto& c : g.children(b)) {
          if (c == a || !g.has_undirected_edge(a, c) || !allowed(a, c)) continue;
          g.orient(a, c);
          changed = true;
        }
      }
    }
    // R3: a — b, a — c, a — d, c->b, d->b, c and d non-adjacent  =>  a->b
    for (const auto& a : nodes) {
      const auto un = g.undirected_neighbors(a);
      for (const auto& b : un) {
        std::vector<std::string> spouses;
        for (const auto& c : un)
          if (c != b && g.has_directed_edge(c, b)) spouses.push_back(c);
        bool fired = false;
        for (std::size_t i = 0; i < spouses.size() && !fired; ++i)
          for (std::size_t j = i + 1; j < spouses.size() && !fired; ++j)
            if (!g.adjacent(spouses[i], spouses[j]) && allowed(a, b)) {
              g.orient(a, b);
              changed = true;
              fired = true;
            }
      }
    }
    // R4: a — b, a — c (or a adjacent c), d->c->b... standard form:
    // a — d, d->c, c->b, a — b, a adjacent c, b and d non-adjacent => a->b
    for (const auto& a : nodes) {
      for (const auto& b : g.undirected_neighbors(a)) {
        bool fired = false;
        for (const auto& c : g.parents(b)) {
          if (fired) break;
          if (c == a || !g.adjacent(a, c)) continue;
          for (const auto& d : g.parents(c)) {
            if (d == a || d == b) continue;
            if (!g.has_undirected_edge(a, d)) continue;
            if (g.adjacent(b, d)) continue;
            if (!allowed(a, b)) continue;
            g.orient(a, b);
            changed = true;
            fired = true;
            break;
          }
        }
      }
    }
  }

  if (!g.is_acyclic()) {
    const auto cycle = g.find_cycle();
    std::string msg = "orientation produced a directed cycle:";
    for (const auto& v : cycle) msg += " " + v;
    throw std::runtime_error(msg);
  }
  return g;
}

DiscoveryReport discover_with_report(const CodedDataset& data, double alpha,
                                     const Knowledge& knowledge) {
  PcSkeletonResult sk = pc_skeleton(data, alpha, knowledge);
  MixedGraph g = orient_colliders(sk.skeleton, sk.sepsets, knowledge);
  g = apply_meek_rules(g, knowledge);
  for (const auto& [a, b] : knowledge.required_orientations) {
    if (!g.has_node(a) || !g.has_node(b) || !g.has_undirected_edge(a, b)) continue;
    // A data-driven mis-orientation elsewhere can make the required direction
    // close a directed cycle; the edge is then left undirected and reported.
    if (g.has_directed_path(b, a)) continue;
    g.orient(a, b);
  }

  DiscoveryReport report{std::move(g), std::move(sk.sepsets), sk.tests_performed, {}};
  report.residual_undirected = report.graph.undirected_edges();
  return report;
}

MixedGraph discover(const CodedDataset& data, double alpha, const Knowledge& knowledge) {
  return discover_with_report(data, alpha, knowledge).graph;
}

}  // namespace modecause
