#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "games.hpp"  // InvalidParameter
#include "rng.hpp"

namespace egt {

class GraphFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Graph {
  int N = 0;
  std::vector<std::vector<int>> adj;  // sorted, symmetric, no self-loops

  int degree(int v) const { return static_cast<int>(adj[v].size()); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& nb : adj) twice += nb.size();
    return twice / 2;
  }
};

namespace detail {
inline void add_edge(Graph& g, int u, int v) {
  g.adj[u].push_back(v);
  g.adj[v].push_back(u);
}
inline void finalize_adjacency(Graph& g) {
  for (auto& nb : g.adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}
}  // namespace detail

// L x L square lattice with von Neumann (degree-4) neighborhoods. Periodic
// wraps both axes into a torus; otherwise boundary nodes lose neighbors.
inline Graph lattice2d(int L, bool periodic = true) {
  if (L < 2) throw InvalidParameter("lattice2d: L >= 2");
  Graph g;
  g.N = L * L;
  g.adj.resize(g.N);
  auto id = [L](int r, int c) { return r * L + c; };
  for (int r = 0; r < L; ++r)
    for (int c = 0; c < L; ++c) {
      // add each undirected edge once: to the right and downward
      if (periodic || c + 1 < L) detail::add_edge(g, id(r, c), id(r, (c + 1) % L));
      if (periodic || r + 1 < L) detail::add_edge(g, id(r, c), id((r + 1) % L, c));
    }
  detail::finalize_adjacency(g);  // dedupes the L=2 wraparound
  return g;
}

inline Graph complete_graph(int N) {
  if (N < 2) throw InvalidParameter("complete_graph: N >= 2");
  Graph g;
  g.N = N;
  g.adj.resize(N);
  for (int u = 0; u < N; ++u)
    for (int v = u + 1; v < N; ++v) detail::add_edge(g, u, v);
  detail::finalize_adjacency(g);
  return g;
}

// Barabasi-Albert preferential attachment: seed with an (m+1)-clique, then
// each arriving node draws m distinct targets with probability proportional
// to degree (uniform sampling over the edge-endpoint list).
inline Graph scale_free(int N, int m, RngStream& rng) {
  if (m < 1 || N <= m + 1) throw InvalidParameter("scale_free: need N > m+1, m >= 1");
  Graph g;
  g.N = N;
  g.adj.resize(N);
  std::vector<int> ends;  // every edge contributes both endpoints
  ends.reserve(2 * (static_cast<std::size_t>(m) * N));
  for (int u = 0; u <= m; ++u)
    for (int v = u + 1; v <= m; ++v) {
      detail::add_edge(g, u, v);
      ends.push_back(u);
      ends.push_back(v);
    }
  std::vector<int> targets;
  for (int t = m + 1; t < N; ++t) {
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      const int cand = ends[rng.uniform_int(ends.size())];
      if (std::find(targets.begin(), targets.end(), cand) == targets.end())
        targets.push_back(cand);
    }
    for (int tv : targets) {
      detail::add_edge(g, t, tv);
      ends.push_back(t);
      ends.push_back(tv);
    }
  }
  detail::finalize_adjacency(g);
  return g;
}

inline bool is_connected(const Graph& g) {
  if (g.N == 0) return true;
  std::vector<char> seen(g.N, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : g.adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == g.N;
}

// Edge-list text format: "N" header, then one "u v" line per edge.
inline void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.N << '\n';
  for (int u = 0; u < g.N; ++u)
    for (int v : g.adj[u])
      if (u < v) os << u << ' ' << v << '\n';
}

inline Graph read_edge_list(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw GraphFormatError("edge list: missing header");
  Graph g;
  {
    std::istringstream hs(line);
    if (!(hs >> g.N) || g.N < 1) throw GraphFormatError("edge list: bad node count");
    std::string extra;
    if (hs >> extra) throw GraphFormatError("edge list: trailing tokens in header");
  }
  g.adj.resize(g.N);
  std::set<std::pair<int, int>> seen;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int u = -1, v = -1;
    if (!(ls >> u >> v)) throw GraphFormatError("edge list: bad edge line: " + line);
    std::string extra;
    if (ls >> extra) throw GraphFormatError("edge list: trailing tokens: " + line);
    if (u < 0 || v < 0 || u >= g.N || v >= g.N)
      throw GraphFormatError("edge list: node out of range: " + line);
    if (u == v) throw GraphFormatError("edge list: self-loop: " + line);
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
      throw GraphFormatError("edge list: duplicate edge: " + line);
    detail::add_edge(g, u, v);
  }
  detail::finalize_adjacency(g);
  return g;
}

}  // namespace egt
