#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace modecause {

// Graph over named nodes with directed and undirected edges. At most one
// edge per node pair, no self loops. Node identity is by name; iteration
// order is insertion order everywhere.
class MixedGraph {
 public:
  MixedGraph() = default;
  explicit MixedGraph(std::vector<std::string> nodes);

  const std::vector<std::string>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t index_of(const std::string& name) const;
  bool has_node(const std::string& name) const;

  void add_directed_edge(const std::string& from, const std::string& to);
  void add_undirected_edge(const std::string& a, const std::string& b);
  void remove_edge(const std::string& a, const std::string& b);
  // Replaces an existing undirected a—b edge with a→b.
  void orient(const std::string& from, const std::string& to);

  bool has_directed_edge(const std::string& from, const std::string& to) const;
  bool has_undirected_edge(const std::string& a, const std::string& b) const;
  bool adjacent(const std::string& a, const std::string& b) const;

  std::set<std::string> parents(const std::string& v) const;
  std::set<std::string> children(const std::string& v) const;
  std::set<std::string> neighbors(const std::string& v) const;             // any edge
  std::set<std::string> undirected_neighbors(const std::string& v) const;

  // Edge lists sorted by node insertion index (directed: from then to;
  // undirected: lower index first).
  std::vector<std::pair<std::string, std::string>> directed_edges() const;
  std::vector<std::pair<std::string, std::string>> undirected_edges() const;
  std::size_t edge_count() const;

  bool is_acyclic() const;  // directed part only
  std::set<std::string> descendants(const std::string& v) const;  // excludes v
  bool has_directed_path(const std::string& from, const std::string& to) const;
  // Some directed cycle as a node sequence (first == last); empty if acyclic.
  std::vector<std::string> find_cycle() const;

  bool structure_equals(const MixedGraph& other) const;

  std::string to_dot() const;
  static MixedGraph from_dot(const std::string& text);

 private:
  friend class Dag;
  std::size_t idx(const std::string& name) const { return index_of(name); }
  void check_new_edge(std::size_t a, std::size_t b) const;

  std::vector<std::string> nodes_;
  std::vector<std::set<std::size_t>> out_;    // directed from -> to
  std::vector<std::set<std::size_t>> in_;
  std::vector<std::set<std::size_t>> undir_;
};

// A MixedGraph with no undirected edges and an acyclic directed part,
// checked at construction.
class Dag {
 public:
  explicit Dag(MixedGraph g);

  const MixedGraph& graph() const { return g_; }
  const std::vector<std::string>& nodes() const { return g_.nodes(); }
  std::set<std::string> parents(const std::string& v) const { return g_.parents(v); }
  std::set<std::string> children(const std::string& v) const { return g_.children(v); }
  std::set<std::string> descendants(const std::string& v) const { return g_.descendants(v); }
  bool has_edge(const std::string& a, const std::string& b) const {
    return g_.has_directed_edge(a, b);
  }

 private:
  MixedGraph g_;
};

bool is_acyclic(const MixedGraph& g);

// Blocking of one concrete path by conditioning set z: some non-collider on
// the path is in z, or some collider has neither itself nor any descendant
// in z. Endpoints must be outside z.
bool path_blocked(const Dag& g, const std::vector<std::string>& path,
                  const std::set<std::string>& z);

// True iff every path between a node of a and a node of b is blocked by z.
bool d_separated(const Dag& g, const std::set<std::string>& a,
                 const std::set<std::string>& b, const std::set<std::string>& z);

// Completed partially directed graph of g's Markov-equivalence class, by
// exhaustive enumeration of same-skeleton, same-collider acyclic
// orientations. Intended for small graphs; refuses > 20 edges.
MixedGraph cpdag_of(const Dag& g);

}  // namespace modecause
