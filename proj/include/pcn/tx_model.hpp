#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "pcn/graph.hpp"

namespace pcn {

// Rank factors of every node as seen by one observer: the observer and its
// incident edges are removed, the remaining nodes are ranked by in-degree
// (rank 1 = highest), and each tie group gets the average Zipf weight
// 1/r^s over the ranks the group occupies.
struct RankFactorTable {
  NodeId observer;
  double s = 0.0;
  std::vector<double> rf;  // indexed by node index; observer slot is 0
  double normalizer = 0.0;

  double prob(NodeIndex v) const { return rf[v] / normalizer; }
};

inline RankFactorTable rank_factors(const PcnGraph& g, const NodeId& observer,
                                    double s) {
  const NodeIndex obs = g.index_of(observer);
  const std::size_t n = g.node_count();
  if (n < 2) throw SingletonGraphError();
  if (s < 0) throw ValidationError("zipf exponent must be >= 0");

  // In-degrees with the observer and its incident edges removed.
  std::vector<int> deg(n, 0);
  for (const auto& c : g.channels()) {
    if (c.a == obs || c.b == obs) continue;
    if (c.ab_live) deg[c.b]++;
    if (c.ba_live) deg[c.a]++;
  }

  std::vector<NodeIndex> order;
  order.reserve(n - 1);
  for (NodeIndex v = 0; v < n; ++v) {
    if (v != obs) order.push_back(v);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeIndex x, NodeIndex y) { return deg[x] > deg[y]; });

  RankFactorTable table;
  table.observer = observer;
  table.s = s;
  table.rf.assign(n, 0.0);

  std::size_t pos = 0;
  while (pos < order.size()) {
    std::size_t end = pos;
    while (end < order.size() && deg[order[end]] == deg[order[pos]]) ++end;
    // Tie group occupies ranks pos+1 .. end (1-based).
    double sum = 0.0;
    for (std::size_t r = pos + 1; r <= end; ++r) {
      sum += std::pow(static_cast<double>(r), -s);
    }
    const double value = sum / static_cast<double>(end - pos);
    for (std::size_t i = pos; i < end; ++i) table.rf[order[i]] = value;
    pos = end;
  }
  for (NodeIndex v = 0; v < n; ++v) table.normalizer += table.rf[v];
  return table;
}

inline double trans_prob(const PcnGraph& g, const NodeId& u, const NodeId& v) {
  const NodeIndex iu = g.index_of(u);
  const NodeIndex iv = g.index_of(v);
  if (iu == iv) throw SameNodeError(u);
  const RankFactorTable t = rank_factors(g, u, g.node(iu).zipf_s);
  return t.prob(iv);
}

// p^trans for every ordered pair; row u uses u's own exponent s_u.
struct TransProbMatrix {
  std::size_t n = 0;
  std::vector<double> p;  // row = source

  double operator()(NodeIndex u, NodeIndex v) const { return p[u * n + v]; }
};

inline TransProbMatrix trans_prob_matrix(const PcnGraph& g) {
  TransProbMatrix m;
  m.n = g.node_count();
  m.p.assign(m.n * m.n, 0.0);
  if (m.n < 2) return m;
  for (NodeIndex u = 0; u < m.n; ++u) {
    const RankFactorTable t = rank_factors(g, g.node(u).id, g.node(u).zipf_s);
    for (NodeIndex v = 0; v < m.n; ++v) {
      if (v != u) m.p[u * m.n + v] = t.prob(v);
    }
  }
  return m;
}

// Variant where every source uses the same exponent (the topology game).
inline TransProbMatrix trans_prob_matrix(const PcnGraph& g, double s) {
  TransProbMatrix m;
  m.n = g.node_count();
  m.p.assign(m.n * m.n, 0.0);
  if (m.n < 2) return m;
  for (NodeIndex u = 0; u < m.n; ++u) {
    const RankFactorTable t = rank_factors(g, g.node(u).id, s);
    for (NodeIndex v = 0; v < m.n; ++v) {
      if (v != u) m.p[u * m.n + v] = t.prob(v);
    }
  }
  return m;
}

struct EdgeRate {
  NodeId from;
  NodeId to;
  ChannelIndex channel = 0;
  double p_e = 0.0;
  double lambda = 0.0;
};

struct EdgeRateTable {
  std::vector<EdgeRate> edges;   // one entry per live directed edge
  std::vector<NodeId> node_ids;  // node set of the underlying graph
  double total_rate = 0.0;       // N
};

// p_e per Eq.-2 style accumulation: the per-pair shortest-path share of the
// edge weighted by p^trans, then lambda = N * p_e. N defaults to the sum of
// per-node rates.
inline EdgeRateTable edge_rates(const PcnGraph& g, const TransProbMatrix& probs,
                                std::optional<double> total_rate = {}) {
  if (probs.n != g.node_count()) {
    throw ValidationError("probability matrix does not match graph");
  }
  EdgeRateTable table;
  double n_sum = 0.0;
  for (const auto& ni : g.nodes()) {
    table.node_ids.push_back(ni.id);
    n_sum += ni.n_tx;
  }
  table.total_rate = total_rate.value_or(n_sum);
  if (table.total_rate < 0) throw ValidationError("total rate must be >= 0");

  const PathTables t = path_tables(g);
  const std::size_t n = g.node_count();
  for (ChannelIndex ci = 0; ci < g.channel_count(); ++ci) {
    const Channel& c = g.channels()[ci];
    const auto accumulate = [&](NodeIndex from, NodeIndex to) {
      EdgeRate er;
      er.from = g.node(from).id;
      er.to = g.node(to).id;
      er.channel = ci;
      for (NodeIndex s = 0; s < n; ++s) {
        for (NodeIndex r = 0; r < n; ++r) {
          if (s == r) continue;
          const std::uint64_t m = t.count(s, r);
          if (m == 0) continue;
          const std::uint64_t me = t.through_edge(s, from, to, r);
          if (me == 0) continue;
          er.p_e += probs(s, r) * static_cast<double>(me) / static_cast<double>(m);
        }
      }
      er.lambda = table.total_rate * er.p_e;
      table.edges.push_back(std::move(er));
    };
    if (c.ab_live) accumulate(c.a, c.b);
    if (c.ba_live) accumulate(c.b, c.a);
  }
  return table;
}

// Total rate of transactions crossing u's channels, both directions.
inline double node_flow_rate(const EdgeRateTable& rates, const NodeId& u) {
  if (std::find(rates.node_ids.begin(), rates.node_ids.end(), u) ==
      rates.node_ids.end()) {
    throw UnknownNodeError(u);
  }
  double sum = 0.0;
  for (const auto& e : rates.edges) {
    if (e.from == u || e.to == u) sum += e.lambda;
  }
  return sum;
}

}  // namespace pcn
