#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modecause/citest.hpp"
#include "modecause/dataset.hpp"
#include "modecause/graph.hpp"

namespace modecause {

// Tiered background knowledge. Sinks may not cause anything, sources may not
// be caused, forbidden pairs a->b are disallowed outright, and required
// orientations resolve edges the algorithm leaves undirected.
struct Knowledge {
  std::set<std::string> sinks;
  std::set<std::string> sources;
  std::set<std::pair<std::string, std::string>> forbidden;
  std::vector<std::pair<std::string, std::string>> required_orientations;

  bool orientation_allowed(const std::string& from, const std::string& to) const;
  void validate() const;
  bool empty() const {
    return sinks.empty() && sources.empty() && forbidden.empty() && required_orientations.empty();
  }

  std::string to_json() const;
  static Knowledge from_json(const std::string& text);

  // The shipped default: mode variables are sinks, demographics are
  // exogenous, the stated forbidden pairs, and the two orientations used to
  // resolve the residual undirected edges.
  static Knowledge table1_default();
};

// Conditioning set that rendered each removed pair independent, keyed by the
// pair in lexicographic name order.
using SepSets = std::map<std::pair<std::string, std::string>, std::vector<std::string>>;

struct PcSkeletonResult {
  MixedGraph skeleton;
  SepSets sepsets;
  long tests_performed = 0;
};

// PC-stable skeleton search: conditioning sets grow from size 0, adjacency
// sets are frozen per level, and removals apply at the end of each level.
// Pairs forbidden in both directions by knowledge start absent.
PcSkeletonResult pc_skeleton(const CodedDataset& data, double alpha, const Knowledge& knowledge);

// Orients every unshielded triple a—b—c into a->b<-c when b is not in the
// recorded separating set of {a, c}. With knowledge given, arrowheads that
// knowledge disallows are skipped.
MixedGraph orient_colliders(const MixedGraph& skeleton, const SepSets& sepsets,
                            const Knowledge& knowledge = Knowledge{});

// Closes the graph under the four Meek propagation rules plus the knowledge
// rules (edges at sinks point in, edges at sources point out). Rule
// conclusions that knowledge disallows do not fire. Throws if an edge is
// forced both ways or a directed cycle appears.
MixedGraph apply_meek_rules(const MixedGraph& g, const Knowledge& knowledge);

// Full pipeline: skeleton, collider orientation, Meek closure, then any
// required orientations that match a remaining undirected edge. The result
// may still contain undirected edges; its directed part is acyclic.
MixedGraph discover(const CodedDataset& data, double alpha, const Knowledge& knowledge);

struct DiscoveryReport {
  MixedGraph graph;
  SepSets sepsets;
  long tests_performed = 0;
  std::vector<std::pair<std::string, std::string>> residual_undirected;
};

DiscoveryReport discover_with_report(const CodedDataset& data, double alpha,
                                     const Knowledge& knowledge);

}  // namespace modecause
