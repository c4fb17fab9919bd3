#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pcn/coin.hpp"
#include "pcn/error.hpp"

namespace pcn {

using NodeId = std::string;
using NodeIndex = std::size_t;
using ChannelIndex = std::size_t;

struct NodeInfo {
  NodeId id;
  double n_tx = 1.0;    // transactions sent per unit time
  double zipf_s = 0.0;  // bias exponent of this node's target distribution
};

// One payment channel, stored as two directed edges with independent
// capacities. Reduced views may disable a direction; both start enabled.
struct Channel {
  NodeIndex a = 0;
  NodeIndex b = 0;
  Coin bal_a = 0;
  Coin bal_b = 0;
  bool ab_live = true;
  bool ba_live = true;
};

class PcnGraph {
 public:
  NodeIndex add_node(const NodeId& id, double n_tx = 1.0, double zipf_s = 0.0) {
    if (index_.count(id)) {
      throw ValidationError("duplicate node id: " + id);
    }
    if (n_tx < 0) throw ValidationError("n_tx must be >= 0 for node " + id);
    if (zipf_s < 0) throw ValidationError("zipf_s must be >= 0 for node " + id);
    nodes_.push_back(NodeInfo{id, n_tx, zipf_s});
    index_.emplace(id, nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  bool has_node(const NodeId& id) const { return index_.count(id) != 0; }

  NodeIndex index_of(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownNodeError(id);
    return it->second;
  }

  const NodeInfo& node(NodeIndex v) const { return nodes_[v]; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<NodeInfo>& nodes() const { return nodes_; }

  ChannelIndex add_channel(const NodeId& a, const NodeId& b, Coin bal_a,
                           Coin bal_b) {
    const NodeIndex ia = index_of(a);
    const NodeIndex ib = index_of(b);
    if (ia == ib) throw SelfLoopError(a);
    if (bal_a < 0 || bal_b < 0) {
      throw NegativeBalanceError("negative balance on channel " + a + "-" + b);
    }
    channels_.push_back(Channel{ia, ib, bal_a, bal_b, true, true});
    return channels_.size() - 1;
  }

  const std::vector<Channel>& channels() const { return channels_; }
  std::vector<Channel>& mutable_channels() { return channels_; }
  std::size_t channel_count() const { return channels_.size(); }

  std::size_t directed_edge_count() const {
    std::size_t m = 0;
    for (const auto& c : channels_) m += (c.ab_live ? 1 : 0) + (c.ba_live ? 1 : 0);
    return m;
  }

  // In-degree of each node in the live directed representation. Parallel
  // edges count separately.
  std::vector<int> in_degrees() const {
    std::vector<int> deg(nodes_.size(), 0);
    for (const auto& c : channels_) {
      if (c.ab_live) deg[c.b]++;
      if (c.ba_live) deg[c.a]++;
    }
    return deg;
  }

  // Number of incident channels (maintenance cost unit in the topology game).
  int channel_degree(NodeIndex v) const {
    int d = 0;
    for (const auto& c : channels_) {
      if (c.a == v || c.b == v) d++;
    }
    return d;
  }

  bool is_isolated(NodeIndex v) const {
    for (const auto& c : channels_) {
      if ((c.a == v && (c.ab_live || c.ba_live)) ||
          (c.b == v && (c.ab_live || c.ba_live))) {
        return false;
      }
    }
    return true;
  }

  void remove_incident_channels(NodeIndex v) {
    channels_.erase(std::remove_if(channels_.begin(), channels_.end(),
                                   [v](const Channel& c) {
                                     return c.a == v || c.b == v;
                                   }),
                    channels_.end());
  }

 private:
  std::vector<NodeInfo> nodes_;
  std::unordered_map<NodeId, NodeIndex> index_;
  std::vector<Channel> channels_;
};

// Pure form of channel creation: the input graph is left untouched.
inline PcnGraph add_channel(const PcnGraph& g, const NodeId& a, const NodeId& b,
                            Coin bal_a, Coin bal_b) {
  PcnGraph out = g;
  out.add_channel(a, b, bal_a, bal_b);
  return out;
}

// Subgraph keeping only directions whose balance can carry tx_size.
// tx_size 0 returns the graph unchanged.
inline PcnGraph reduced_subgraph(const PcnGraph& g, Coin tx_size) {
  if (tx_size < 0) throw ValidationError("tx_size must be >= 0");
  PcnGraph out = g;
  for (auto& c : out.mutable_channels()) {
    c.ab_live = c.ab_live && c.bal_a >= tx_size;
    c.ba_live = c.ba_live && c.bal_b >= tx_size;
  }
  return out;
}

// All-pairs hop distances and shortest-path counts over the live directed
// multigraph. dist -1 encodes an unreachable pair. Counts are exact and
// treat parallel directed edges as distinct paths.
struct PathTables {
  std::size_t n = 0;
  std::vector<int> dist;              // row = source
  std::vector<std::uint64_t> sigma;   // paths s -> t
  std::vector<int> rdist;             // row = sink; rdist[t][v] = d(v, t)
  std::vector<std::uint64_t> rsigma;  // paths v -> t

  int d(NodeIndex s, NodeIndex t) const { return dist[s * n + t]; }
  std::uint64_t count(NodeIndex s, NodeIndex t) const { return sigma[s * n + t]; }

  // Shortest s->t paths through one copy of the live edge u->v.
  std::uint64_t through_edge(NodeIndex s, NodeIndex u, NodeIndex v,
                             NodeIndex t) const {
    if (s == t) return 0;
    const int dst = dist[s * n + t];
    if (dst < 0) return 0;
    const int du = dist[s * n + u];
    const int dv = rdist[t * n + v];
    if (du < 0 || dv < 0 || du + 1 + dv != dst) return 0;
    return sigma[s * n + u] * rsigma[t * n + v];
  }

  // Shortest s->t paths that use x as an intermediate node.
  std::uint64_t through_node(NodeIndex s, NodeIndex x, NodeIndex t) const {
    if (s == t || x == s || x == t) return 0;
    const int dst = dist[s * n + t];
    if (dst < 0) return 0;
    const int du = dist[s * n + x];
    const int dv = rdist[t * n + x];
    if (du < 0 || dv < 0 || du + dv != dst) return 0;
    return sigma[s * n + x] * rsigma[t * n + x];
  }
};

namespace detail {

// adj[v] = aggregated (target, multiplicity) over live edges.
inline std::vector<std::vector<std::pair<NodeIndex, std::uint32_t>>> adjacency(
    const PcnGraph& g, bool reversed) {
  const std::size_t n = g.node_count();
  std::vector<std::map<NodeIndex, std::uint32_t>> acc(n);
  for (const auto& c : g.channels()) {
    if (c.ab_live) {
      if (!reversed) acc[c.a][c.b]++; else acc[c.b][c.a]++;
    }
    if (c.ba_live) {
      if (!reversed) acc[c.b][c.a]++; else acc[c.a][c.b]++;
    }
  }
  std::vector<std::vector<std::pair<NodeIndex, std::uint32_t>>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    adj[v].assign(acc[v].begin(), acc[v].end());
  }
  return adj;
}

inline void bfs_counts(
    const std::vector<std::vector<std::pair<NodeIndex, std::uint32_t>>>& adj,
    NodeIndex src, int* dist, std::uint64_t* sigma) {
  const std::size_t n = adj.size();
  std::fill(dist, dist + n, -1);
  std::fill(sigma, sigma + n, 0);
  dist[src] = 0;
  sigma[src] = 1;
  std::queue<NodeIndex> q;
  q.push(src);
  while (!q.empty()) {
    const NodeIndex u = q.front();
    q.pop();
    for (const auto& [v, mult] : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
      if (dist[v] == dist[u] + 1) {
        sigma[v] += sigma[u] * mult;
      }
    }
  }
}

}  // namespace detail

inline PathTables path_tables(const PcnGraph& g) {
  PathTables t;
  t.n = g.node_count();
  t.dist.resize(t.n * t.n);
  t.sigma.resize(t.n * t.n);
  t.rdist.resize(t.n * t.n);
  t.rsigma.resize(t.n * t.n);
  const auto fwd = detail::adjacency(g, false);
  const auto rev = detail::adjacency(g, true);
  for (NodeIndex s = 0; s < t.n; ++s) {
    detail::bfs_counts(fwd, s, &t.dist[s * t.n], &t.sigma[s * t.n]);
    detail::bfs_counts(rev, s, &t.rdist[s * t.n], &t.rsigma[s * t.n]);
  }
  return t;
}

struct EdgeRef {
  NodeId from;
  NodeId to;
  ChannelIndex channel = 0;

  friend bool operator<(const EdgeRef& x, const EdgeRef& y) {
    return std::tie(x.from, x.to, x.channel) < std::tie(y.from, y.to, y.channel);
  }
  friend bool operator==(const EdgeRef& x, const EdgeRef& y) {
    return std::tie(x.from, x.to, x.channel) == std::tie(y.from, y.to, y.channel);
  }
};

struct PathStats {
  static constexpr int kUnreachable = -1;

  NodeId source;
  NodeId sink;
  int distance = kUnreachable;
  std::uint64_t path_count = 0;
  std::map<EdgeRef, std::uint64_t> per_edge_counts;

  bool connected() const { return distance >= 0; }
};

using PathStatsMap = std::map<std::pair<NodeId, NodeId>, PathStats>;

inline PathStatsMap all_pairs_path_stats(const PcnGraph& g) {
  const PathTables t = path_tables(g);
  const std::size_t n = g.node_count();
  PathStatsMap out;
  for (NodeIndex s = 0; s < n; ++s) {
    for (NodeIndex r = 0; r < n; ++r) {
      if (s == r) continue;
      PathStats st;
      st.source = g.node(s).id;
      st.sink = g.node(r).id;
      st.distance = t.d(s, r);
      st.path_count = st.distance < 0 ? 0 : t.count(s, r);
      if (st.distance >= 0) {
        for (ChannelIndex ci = 0; ci < g.channel_count(); ++ci) {
          const Channel& c = g.channels()[ci];
          if (c.ab_live) {
            const std::uint64_t k = t.through_edge(s, c.a, c.b, r);
            if (k > 0) st.per_edge_counts[{g.node(c.a).id, g.node(c.b).id, ci}] = k;
          }
          if (c.ba_live) {
            const std::uint64_t k = t.through_edge(s, c.b, c.a, r);
            if (k > 0) st.per_edge_counts[{g.node(c.b).id, g.node(c.a).id, ci}] = k;
          }
        }
      }
      out.emplace(std::make_pair(st.source, st.sink), std::move(st));
    }
  }
  return out;
}

}  // namespace pcn
