#include "modecause/graph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace modecause {

MixedGraph::MixedGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
  std::set<std::string> seen;
  for (const auto& n : nodes_)
    if (!seen.insert(n).second) throw std::invalid_argument("graph: duplicate node " + n);
  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
  undir_.resize(nodes_.size());
}

std::size_t MixedGraph::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i] == name) return i;
  throw std::invalid_argument("graph: unknown node " + name);
}

bool MixedGraph::has_node(const std::string& name) const {
  return std::find(nodes_.begin(), nodes_.end(), name) != nodes_.end();
}

void MixedGraph::check_new_edge(std::size_t a, std::size_t b) const {
  if (a == b) throw std::invalid_argument("graph: self loop on " + nodes_[a]);
  if (out_[a].count(b) || out_[b].count(a) || undir_[a].count(b))
    throw std::invalid_argument("graph: edge already present between " + nodes_[a] + " and " +
                                nodes_[b]);
}

void MixedGraph::add_directed_edge(const std::string& from, const std::string& to) {
  const std::size_t a = idx(from), b = idx(to);
  check_new_edge(a, b);
  out_[a].insert(b);
  in_[b].insert(a);
}

void MixedGraph::add_undirected_edge(const std::string& a_name, const std::string& b_name) {
  const std::size_t a = idx(a_name), b = idx(b_name);
  check_new_edge(a, b);
  undir_[a].insert(b);
  undir_[b].insert(a);
}

void MixedGraph::remove_edge(const std::string& a_name, const std::string& b_name) {
  const std::size_t a = idx(a_name), b = idx(b_name);
  out_[a].erase(b);
  in_[b].erase(a);
  out_[b].erase(a);
  in_[a].erase(b);
  undir_[a].erase(b);
  undir_[b].erase(a);
}

void MixedGraph::orient(const std::string& from, const std::string& to) {
  const std::size_t a = idx(from), b = idx(to);
  if (!undir_[a].count(b))
    throw std::invalid_argument("graph: no undirected edge between " + from + " and " + to);
  undir_[a].erase(b);
  undir_[b].erase(a);
  out_[a].insert(b);
  in_[b].insert(a);
}

bool MixedGraph::has_directed_edge(const std::string& from, const std::string& to) const {
  return out_[idx(from)].count(idx(to)) > 0;
}

bool MixedGraph::has_undirected_edge(const std::string& a, const std::string& b) const {
  return undir_[idx(a)].count(idx(b)) > 0;
}

bool MixedGraph::adjacent(const std::string& a_name, const std::string& b_name) const {
  const std::size_t a = idx(a_name), b = idx(b_name);
  return out_[a].count(b) || out_[b].count(a) || undir_[a].count(b);
}

std::set<std::string> MixedGraph::parents(const std::string& v) const {
  std::set<std::string> out;
  for (std::size_t p : in_[idx(v)]) out.insert(nodes_[p]);
  return out;
}

std::set<std::string> MixedGraph::children(const std::string& v) const {
  std::set<std::string> res;
  for (std::size_t c : out_[idx(v)]) res.insert(nodes_[c]);
  return res;
}

std::set<std::string> MixedGraph::neighbors(const std::string& v) const {
  const std::size_t a = idx(v);
  std::set<std::string> res;
  for (std::size_t x : out_[a]) res.insert(nodes_[x]);
  for (std::size_t x : in_[a]) res.insert(nodes_[x]);
  for (std::size_t x : undir_[a]) res.insert(nodes_[x]);
  return res;
}

std::set<std::string> MixedGraph::undirected_neighbors(const std::string& v) const {
  std::set<std::string> res;
  for (std::size_t x : undir_[idx(v)]) res.insert(nodes_[x]);
  return res;
}

std::vector<std::pair<std::string, std::string>> MixedGraph::directed_edges() const {
  std::vector<std::pair<std::string, std::string>> res;
  for (std::size_t a = 0; a < nodes_.size(); ++a)
    for (std::size_t b : out_[a]) res.emplace_back(nodes_[a], nodes_[b]);
  return res;
}

std::vector<std::pair<std::string, std::string>> MixedGraph::undirected_edges() const {
  std::vector<std::pair<std::string, std::string>> res;
  for (std::size_t a = 0; a < nodes_.size(); ++a)
    for (std::size_t b : undir_[a])
      if (a < b) res.emplace_back(nodes_[a], nodes_[b]);
  return res;
}

std::size_t MixedGraph::edge_count() const {
  std::size_t directed = 0, undirected = 0;
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    directed += out_[a].size();
    undirected += undir_[a].size();
  }
  return directed + undirected / 2;
}

bool MixedGraph::is_acyclic() const { return find_cycle().empty(); }

std::vector<std::string> MixedGraph::find_cycle() const {
  enum { kWhite, kGray, kBlack };
  std::vector<int> color(nodes_.size(), kWhite);
  std::vector<std::size_t> stack;
  std::vector<std::string> cycle;

  std::function<bool(std::size_t)> visit = [&](std::size_t v) {
    color[v] = kGray;
    stack.push_back(v);
    for (std::size_t w : out_[v]) {
      if (color[w] == kGray) {
        auto it = std::find(stack.begin(), stack.end(), w);
        for (; it != stack.end(); ++it) cycle.push_back(nodes_[*it]);
        cycle.push_back(nodes_[w]);
        return true;
      }
      if (color[w] == kWhite && visit(w)) return true;
    }
    stack.pop_back();
    color[v] = kBlack;
    return false;
  };

  for (std::size_t v = 0; v < nodes_.size(); ++v)
    if (color[v] == kWhite && visit(v)) return cycle;
  return {};
}

std::set<std::string> MixedGraph::descendants(const std::string& v) const {
  std::set<std::size_t> seen;
  std::vector<std::size_t> todo{idx(v)};
  while (!todo.empty()) {
    const std::size_t cur = todo.back();
    todo.pop_back();
    for (std::size_t w : out_[cur])
      if (seen.insert(w).second) todo.push_back(w);
  }
  std::set<std::string> res;
  for (std::size_t d : seen) res.insert(nodes_[d]);
  return res;
}

bool MixedGraph::has_directed_path(const std::string& from, const std::string& to) const {
  return descendants(from).count(to) > 0;
}

bool MixedGraph::structure_equals(const MixedGraph& other) const {
  std::set<std::string> mine(nodes_.begin(), nodes_.end());
  std::set<std::string> theirs(other.nodes_.begin(), other.nodes_.end());
  if (mine != theirs) return false;
  auto dir = directed_edges();
  auto odir = other.directed_edges();
  std::set<std::pair<std::string, std::string>> d(dir.begin(), dir.end());
  std::set<std::pair<std::string, std::string>> od(odir.begin(), odir.end());
  if (d != od) return false;
  std::set<std::pair<std::string, std::string>> u, ou;
  for (auto [a, b] : undirected_edges()) u.insert(std::minmax(a, b));
  for (auto [a, b] : other.undirected_edges()) ou.insert(std::minmax(a, b));
  return u == ou;
}

std::string MixedGraph::to_dot() const {
  std::ostringstream out;
  out << "digraph g {\n";
  for (const auto& n : nodes_) out << "  " << n << ";\n";
  for (const auto& [a, b] : directed_edges()) out << "  " << a << " -> " << b << ";\n";
  for (const auto& [a, b] : undirected_edges())
    out << "  " << a << " -> " << b << " [dir=none];\n";
  out << "}\n";
  return out.str();
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

MixedGraph MixedGraph::from_dot(const std::string& text) {
  std::vector<std::string> node_order;
  std::vector<std::tuple<std::string, std::string, bool>> edges;  // a, b, undirected

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string s = strip(line);
    if (s.empty() || s.starts_with("//") || s.starts_with("#")) continue;
    if (s.starts_with("digraph") || s == "{" || s == "}") continue;
    if (!s.empty() && s.back() == ';') s.pop_back();
    s = strip(s);
    if (s.empty()) continue;

    bool undirected = false;
    const std::size_t attr = s.find('[');
    if (attr != std::string::npos) {
      const std::string attrs = s.substr(attr);
      if (attrs.find("dir=none") != std::string::npos) undirected = true;
      s = strip(s.substr(0, attr));
    }
    const std::size_t arrow = s.find("->");
    auto note_node = [&](const std::string& n) {
      if (std::find(node_order.begin(), node_order.end(), n) == node_order.end())
        node_order.push_back(n);
    };
    if (arrow == std::string::npos) {
      note_node(s);
    } else {
      const std::string a = strip(s.substr(0, arrow));
      const std::string b = strip(s.substr(arrow + 2));
      if (a.empty() || b.empty()) throw std::runtime_error("dot: malformed edge line: " + line);
      note_node(a);
      note_node(b);
      edges.emplace_back(a, b, undirected);
    }
  }

  MixedGraph g(node_order);
  for (const auto& [a, b, undirected] : edges) {
    if (undirected) g.add_undirected_edge(a, b);
    else g.add_directed_edge(a, b);
  }
  return g;
}

Dag::Dag(MixedGraph g) : g_(std::move(g)) {
  if (!g_.undirected_edges().empty())
    throw std::invalid_argument("dag: graph has undirected edges");
  if (!g_.is_acyclic()) throw std::invalid_argument("dag: graph has a directed cycle");
}

bool is_acyclic(const MixedGraph& g) { return g.is_acyclic(); }

bool path_blocked(const Dag& dag, const std::vector<std::string>& path,
                  const std::set<std::string>& z) {
  if (path.size() < 2) throw std::invalid_argument("path_blocked: path needs >= 2 nodes");
  const MixedGraph& g = dag.graph();
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    if (!g.has_directed_edge(path[i], path[i + 1]) && !g.has_directed_edge(path[i + 1], path[i]))
      throw std::invalid_argument("path_blocked: " + path[i] + " and " + path[i + 1] +
                                  " are not adjacent");
  if (z.count(path.front()) || z.count(path.back()))
    throw std::invalid_argument("path_blocked: endpoint inside conditioning set");

  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const bool into_left = g.has_directed_edge(path[i - 1], path[i]);
    const bool into_right = g.has_directed_edge(path[i + 1], path[i]);
    const bool collider = into_left && into_right;
    if (!collider) {
      if (z.count(path[i])) return true;
    } else {
      if (!z.count(path[i])) {
        bool descendant_in_z = false;
        for (const auto& d : g.descendants(path[i])) {
          if (z.count(d)) {
            descendant_in_z = true;
            break;
          }
        }
        if (!descendant_in_z) return true;
      }
    }
  }
  return false;
}

namespace {

// Enumerates simple paths between from and to over the skeleton, aborting as
// soon as an unblocked one is found.
bool exists_open_path(const Dag& dag, const std::string& from, const std::string& to,
                      const std::set<std::string>& z) {
  const MixedGraph& g = dag.graph();
  std::vector<std::string> path{from};
  std::set<std::string> on_path{from};

  std::function<bool(const std::string&)> dfs = [&](const std::string& cur) {
    for (const auto& next : g.neighbors(cur)) {
      if (on_path.count(next)) continue;
      path.push_back(next);
      if (next == to) {
        if (!path_blocked(dag, path, z)) return true;
      } else {
        on_path.insert(next);
        if (dfs(next)) return true;
        on_path.erase(next);
      }
      path.pop_back();
    }
    return false;
  };
  return dfs(from);
}

}  // namespace

bool d_separated(const Dag& g, const std::set<std::string>& a,
                 const std::set<std::string>& b, const std::set<std::string>& z) {
  if (a.empty() || b.empty()) throw std::invalid_argument("d_separated: empty node set");
  for (const auto& x : a)
    if (b.count(x) || z.count(x)) throw std::invalid_argument("d_separated: sets must be disjoint");
  for (const auto& x : b)
    if (z.count(x)) throw std::invalid_argument("d_separated: sets must be disjoint");

  for (const auto& x : a)
    for (const auto& y : b)
      if (exists_open_path(g, x, y, z)) return false;
  return true;
}

namespace {

using Collider = std::tuple<std::size_t, std::size_t, std::size_t>;  // a, b, c with a->b<-c, a<c

std::set<Collider> unshielded_colliders(const std::vector<std::string>& nodes,
                                        const std::vector<std::vector<bool>>& dir) {
  const std::size_t n = nodes.size();
  auto adj = [&](std::size_t x, std::size_t y) { return dir[x][y] || dir[y][x]; };
  std::set<Collider> res;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t c = a + 1; c < n; ++c) {
        if (a == b || c == b) continue;
        if (dir[a][b] && dir[c][b] && !adj(a, c)) res.insert({a, b, c});
      }
  return res;
}

bool orientation_acyclic(std::size_t n, const std::vector<std::vector<bool>>& dir) {
  std::vector<int> indeg(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (dir[a][b]) ++indeg[b];
  std::vector<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) queue.push_back(v);
  std::size_t done = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.back();
    queue.pop_back();
    ++done;
    for (std::size_t w = 0; w < n; ++w)
      if (dir[v][w] && --indeg[w] == 0) queue.push_back(w);
  }
  return done == n;
}

}  // namespace

MixedGraph cpdag_of(const Dag& dag) {
  const MixedGraph& g = dag.graph();
  const auto& nodes = g.nodes();
  const std::size_t n = nodes.size();
  const auto edges = g.directed_edges();
  if (edges.size() > 20)
    throw std::invalid_argument("cpdag_of: enumeration limited to 20 edges");

  std::vector<std::vector<bool>> dir(n, std::vector<bool>(n, false));
  std::vector<std::pair<std::size_t, std::size_t>> skeleton;
  for (const auto& [a, b] : edges) {
    dir[g.index_of(a)][g.index_of(b)] = true;
    skeleton.emplace_back(g.index_of(a), g.index_of(b));
  }
  const std::set<Collider> truth = unshielded_colliders(nodes, dir);

  // Two DAGs are Markov equivalent iff they share skeleton and unshielded
  // colliders, so enumerate all collider-preserving acyclic orientations.
  std::vector<int> forward_count(skeleton.size(), 0);
  std::size_t members = 0;
  const std::size_t total = static_cast<std::size_t>(1) << skeleton.size();
  for (std::size_t mask = 0; mask < total; ++mask) {
    std::vector<std::vector<bool>> cand(n, std::vector<bool>(n, false));
    for (std::size_t e = 0; e < skeleton.size(); ++e) {
      const auto [a, b] = skeleton[e];
      if (mask & (static_cast<std::size_t>(1) << e)) cand[a][b] = true;
      else cand[b][a] = true;
    }
    if (!orientation_acyclic(n, cand)) continue;
    if (unshielded_colliders(nodes, cand) != truth) continue;
    ++members;
    for (std::size_t e = 0; e < skeleton.size(); ++e)
      if (mask & (static_cast<std::size_t>(1) << e)) ++forward_count[e];
  }

  MixedGraph out(nodes);
  for (std::size_t e = 0; e < skeleton.size(); ++e) {
    const auto [a, b] = skeleton[e];
    if (forward_count[e] == static_cast<int>(members)) out.add_directed_edge(nodes[a], nodes[b]);
    else if (forward_count[e] == 0) out.add_directed_edge(nodes[b], nodes[a]);
    else out.add_undirected_edge(nodes[a], nodes[b]);
  }
  return out;
}

}  // namespace modecause
