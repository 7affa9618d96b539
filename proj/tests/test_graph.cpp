#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "modecause/graph.hpp"
#include "modecause/rng.hpp"

using namespace modecause;

namespace {

MixedGraph north_structure() {
  MixedGraph g({"hhinc", "sex", "race_x", "hhveh_x", "hhsize_x", "age_x", "distance_x",
                "work_purp", "Car", "Public", "Walk"});
  g.add_directed_edge("work_purp", "distance_x");
  for (const auto& mode : {"Car", "Public", "Walk"}) {
    g.add_directed_edge("distance_x", mode);
    g.add_directed_edge("hhveh_x", mode);
  }
  g.add_directed_edge("hhsize_x", "hhveh_x");
  g.add_directed_edge("hhsize_x", "hhinc");
  g.add_directed_edge("race_x", "hhinc");
  g.add_directed_edge("age_x", "hhinc");
  return g;
}

// Every d-separation statement over singleton pairs, as a flat bitset-like
// listing. Two DAGs are Markov equivalent iff these agree.
std::vector<bool> dsep_relation(const Dag& dag) {
  const auto& nodes = dag.nodes();
  const std::size_t n = nodes.size();
  std::vector<bool> rel;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      std::vector<std::string> rest;
      for (std::size_t k = 0; k < n; ++k)
        if (k != a && k != b) rest.push_back(nodes[k]);
      for (std::size_t mask = 0; mask < (1u << rest.size()); ++mask) {
        std::set<std::string> z;
        for (std::size_t k = 0; k < rest.size(); ++k)
          if (mask & (1u << k)) z.insert(rest[k]);
        rel.push_back(d_separated(dag, {nodes[a]}, {nodes[b]}, z));
      }
    }
  }
  return rel;
}

// Reference CPDAG: enumerate all acyclic orientations of g's skeleton and
// keep the ones whose full d-separation relation matches g's.
MixedGraph cpdag_by_dsep_enumeration(const Dag& dag) {
  const MixedGraph& g = dag.graph();
  const auto& nodes = g.nodes();
  const auto edges = g.directed_edges();
  const auto truth = dsep_relation(dag);

  std::vector<int> forward(edges.size(), 0);
  int members = 0;
  for (std::size_t mask = 0; mask < (1u << edges.size()); ++mask) {
    MixedGraph cand(nodes);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (mask & (1u << e)) cand.add_directed_edge(edges[e].first, edges[e].second);
      else cand.add_directed_edge(edges[e].second, edges[e].first);
    }
    if (!cand.is_acyclic()) continue;
    if (dsep_relation(Dag(cand)) != truth) continue;
    ++members;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (mask & (1u << e)) ++forward[e];
  }
  MixedGraph out(nodes);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (forward[e] == members) out.add_directed_edge(edges[e].first, edges[e].second);
    else if (forward[e] == 0) out.add_directed_edge(edges[e].second, edges[e].first);
    else out.add_undirected_edge(edges[e].first, edges[e].second);
  }
  return out;
}

}  // namespace

TEST_CASE("acyclicity") {
  MixedGraph empty({"A", "B", "C"});
  CHECK(empty.is_acyclic());

  MixedGraph cyc({"A", "B", "C"});
  cyc.add_directed_edge("A", "B");
  cyc.add_directed_edge("B", "C");
  cyc.add_directed_edge("C", "A");
  CHECK_FALSE(cyc.is_acyclic());
  const auto cycle = cyc.find_cycle();
  CHECK(cycle.size() == 4);
  CHECK(cycle.front() == cycle.back());

  CHECK(north_structure().is_acyclic());
}

TEST_CASE("graph edge bookkeeping") {
  MixedGraph g({"A", "B", "C"});
  g.add_directed_edge("A", "B");
  g.add_undirected_edge("B", "C");
  CHECK(g.adjacent("A", "B"));
  CHECK(g.adjacent("C", "B"));
  CHECK_FALSE(g.adjacent("A", "C"));
  CHECK_THROWS(g.add_directed_edge("A", "B"));   // duplicate
  CHECK_THROWS(g.add_undirected_edge("B", "A")); // pair already used
  CHECK_THROWS(g.add_directed_edge("A", "A"));   // self loop
  g.orient("B", "C");
  CHECK(g.has_directed_edge("B", "C"));
  CHECK(g.undirected_edges().empty());
  g.remove_edge("B", "C");
  CHECK_FALSE(g.adjacent("B", "C"));
}

TEST_CASE("parents") {
  MixedGraph ab({"A", "B"});
  ab.add_directed_edge("A", "B");
  CHECK(ab.parents("B") == std::set<std::string>{"A"});
  CHECK(ab.parents("A").empty());

  MixedGraph lone({"A", "B"});
  CHECK(lone.parents("A").empty());
  CHECK_THROWS(lone.parents("Z"));

  const auto north = north_structure();
  CHECK(north.parents("hhinc") == std::set<std::string>{"hhsize_x", "race_x", "age_x"});
  CHECK(north.parents("Car") == std::set<std::string>{"hhveh_x", "distance_x"});
}

TEST_CASE("path blocking on chains and colliders") {
  MixedGraph chain({"A", "B", "C"});
  chain.add_directed_edge("A", "B");
  chain.add_directed_edge("B", "C");
  const Dag dchain(chain);
  CHECK(path_blocked(dchain, {"A", "B", "C"}, {"B"}));
  CHECK_FALSE(path_blocked(dchain, {"A", "B", "C"}, {}));

  MixedGraph coll({"A", "B", "C"});
  coll.add_directed_edge("A", "B");
  coll.add_directed_edge("C", "B");
  const Dag dcoll(coll);
  CHECK(path_blocked(dcoll, {"A", "B", "C"}, {}));        // collider outside z blocks
  CHECK_FALSE(path_blocked(dcoll, {"A", "B", "C"}, {"B"}));  // conditioning opens it

  CHECK_THROWS(path_blocked(dchain, {"A", "C"}, {}));  // non-adjacent hop
}

TEST_CASE("collider with conditioned descendant opens the path") {
  MixedGraph g({"A", "B", "C", "D"});
  g.add_directed_edge("A", "B");
  g.add_directed_edge("C", "B");
  g.add_directed_edge("B", "D");
  const Dag dag(g);
  CHECK_FALSE(path_blocked(dag, {"A", "B", "C"}, {"D"}));
  CHECK(path_blocked(dag, {"A", "B", "C"}, {}));
}

TEST_CASE("d-separation basics") {
  MixedGraph disc({"A", "B"});
  CHECK(d_separated(Dag(disc), {"A"}, {"B"}, {}));

  MixedGraph fork({"A", "B", "C"});
  fork.add_directed_edge("B", "A");
  fork.add_directed_edge("B", "C");
  const Dag dfork(fork);
  CHECK(d_separated(dfork, {"A"}, {"C"}, {"B"}));
  CHECK_FALSE(d_separated(dfork, {"A"}, {"C"}, {}));

  CHECK_THROWS(d_separated(dfork, {"A"}, {"A"}, {}));
  CHECK_THROWS(d_separated(dfork, {}, {"A"}, {}));
}

TEST_CASE("diamond keeps an open path around the conditioned branch") {
  MixedGraph g({"A", "B", "C", "D"});
  g.add_directed_edge("A", "B");
  g.add_directed_edge("B", "D");
  g.add_directed_edge("A", "C");
  g.add_directed_edge("C", "D");
  const Dag dag(g);
  CHECK_FALSE(d_separated(dag, {"A"}, {"D"}, {"B"}));  // path through C stays open
  CHECK(d_separated(dag, {"A"}, {"D"}, {"B", "C"}));
}

TEST_CASE("d_separated is symmetric in a and b") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.below(2);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
    MixedGraph g(names);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.real() < 0.4) g.add_directed_edge(names[i], names[j]);
    const Dag dag(g);
    const std::string a = names[rng.below(n)];
    std::string b = names[rng.below(n)];
    while (b == a) b = names[rng.below(n)];
    std::set<std::string> z;
    for (const auto& v : names)
      if (v != a && v != b && rng.real() < 0.3) z.insert(v);
    CHECK(d_separated(dag, {a}, {b}, z) == d_separated(dag, {b}, {a}, z));
  }
}

TEST_CASE("local Markov condition holds on random dags") {
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 3 + rng.below(3);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
    MixedGraph g(names);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.real() < 0.5) g.add_directed_edge(names[i], names[j]);
    const Dag dag(g);
    for (const auto& x : names) {
      const auto pa = dag.parents(x);
      const auto desc = dag.descendants(x);
      std::set<std::string> nondesc;
      for (const auto& v : names)
        if (v != x && !desc.count(v) && !pa.count(v)) nondesc.insert(v);
      if (nondesc.empty()) continue;
      CHECK(d_separated(dag, {x}, nondesc, pa));
    }
  }
}

TEST_CASE("cpdag of canonical three-node structures") {
  MixedGraph chain({"A", "B", "C"});
  chain.add_directed_edge("A", "B");
  chain.add_directed_edge("B", "C");
  const auto cp_chain = cpdag_of(Dag(chain));
  CHECK(cp_chain.directed_edges().empty());
  CHECK(cp_chain.undirected_edges().size() == 2);

  MixedGraph coll({"A", "B", "C"});
  coll.add_directed_edge("A", "B");
  coll.add_directed_edge("C", "B");
  const auto cp_coll = cpdag_of(Dag(coll));
  CHECK(cp_coll.has_directed_edge("A", "B"));
  CHECK(cp_coll.has_directed_edge("C", "B"));
  CHECK(cp_coll.undirected_edges().empty());

  MixedGraph single({"A", "B"});
  single.add_directed_edge("A", "B");
  const auto cp_single = cpdag_of(Dag(single));
  CHECK(cp_single.directed_edges().empty());
  CHECK(cp_single.undirected_edges().size() == 1);
}

TEST_CASE("cpdag matches the d-separation enumeration oracle on random dags") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + rng.below(3);  // 3..5 nodes
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
    MixedGraph g(names);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.real() < 0.45) g.add_directed_edge(names[i], names[j]);
    const Dag dag(g);
    CHECK(cpdag_of(dag).structure_equals(cpdag_by_dsep_enumeration(dag)));
  }
}

TEST_CASE("cpdag keeps the skeleton and the unshielded colliders") {
  const auto north = north_structure();
  const auto cp = cpdag_of(Dag(north));
  // same skeleton
  auto adjacency = [](const MixedGraph& g) {
    std::set<std::pair<std::string, std::string>> s;
    for (auto [a, b] : g.directed_edges()) s.insert(std::minmax(a, b));
    for (auto [a, b] : g.undirected_edges()) s.insert(std::minmax(a, b));
    return s;
  };
  CHECK(adjacency(cp) == adjacency(north));
  // unshielded colliders stay directed
  CHECK(cp.has_directed_edge("distance_x", "Car"));
  CHECK(cp.has_directed_edge("hhveh_x", "Car"));
  CHECK(cp.has_directed_edge("race_x", "hhinc"));
  CHECK(cp.has_directed_edge("age_x", "hhinc"));
  CHECK(cp.has_directed_edge("hhsize_x", "hhinc"));
  // these two cannot be decided inside the equivalence class
  CHECK(cp.has_undirected_edge("work_purp", "distance_x"));
  CHECK(cp.has_undirected_edge("hhsize_x", "hhveh_x"));
}

TEST_CASE("dot export is stable and parseable") {
  MixedGraph g({"B", "A", "C"});
  g.add_directed_edge("B", "A");
  g.add_undirected_edge("A", "C");
  const std::string dot = g.to_dot();
  CHECK(dot == "digraph g {\n  B;\n  A;\n  C;\n  B -> A;\n  A -> C [dir=none];\n}\n");
  CHECK(g.to_dot() == dot);  // bit-exact across calls

  const MixedGraph back = MixedGraph::from_dot("// provenance line\n" + dot);
  CHECK(back.structure_equals(g));
  CHECK(back.nodes() == g.nodes());
}
