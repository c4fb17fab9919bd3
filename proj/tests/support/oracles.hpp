#pragma once

// Test-side oracles and instance generators. These stay independent of the
// library's path-counting and utility code paths they are used to check.

#include <map>
#include <random>
#include <vector>

#include "pcn/graph.hpp"
#include "pcn/utility.hpp"

namespace pcn::test {

struct NaivePairStats {
  int distance = -1;
  std::uint64_t count = 0;
  std::map<EdgeRef, std::uint64_t> per_edge;
};

namespace detail {

struct NaiveSearch {
  const PcnGraph& g;
  NodeIndex target;
  std::vector<bool> visited;
  std::vector<EdgeRef> edge_stack;
  NaivePairStats result;

  void dfs(NodeIndex cur, int depth) {
    if (cur == target) {
      if (result.distance < 0 || depth < result.distance) {
        result.distance = depth;
        result.count = 0;
        result.per_edge.clear();
      }
      if (depth == result.distance) {
        result.count++;
        for (const auto& e : edge_stack) result.per_edge[e]++;
      }
      return;
    }
    if (result.distance >= 0 && depth >= result.distance) return;
    for (ChannelIndex ci = 0; ci < g.channel_count(); ++ci) {
      const Channel& c = g.channels()[ci];
      const auto step = [&](NodeIndex from, NodeIndex to) {
        if (from != cur || visited[to]) return;
        visited[to] = true;
        edge_stack.push_back(EdgeRef{g.node(from).id, g.node(to).id, ci});
        dfs(to, depth + 1);
        edge_stack.pop_back();
        visited[to] = false;
      };
      if (c.ab_live) step(c.a, c.b);
      if (c.ba_live) step(c.b, c.a);
    }
  }
};

}  // namespace detail

// Exhaustive simple-path enumeration; exponential, for n <= 8 graphs only.
inline NaivePairStats naive_path_stats(const PcnGraph& g, const NodeId& s,
                                       const NodeId& r) {
  detail::NaiveSearch search{g, g.index_of(r),
                             std::vector<bool>(g.node_count(), false),
                             {},
                             {}};
  const NodeIndex is = g.index_of(s);
  search.visited[is] = true;
  search.dfs(is, 0);
  return search.result;
}

// Random capacitated multigraph; reduce_prob > 0 drops some directions to
// exercise genuinely directed topologies.
inline PcnGraph random_graph(std::mt19937_64& rng, int n, double edge_prob,
                             double parallel_prob = 0.1,
                             double one_way_prob = 0.2) {
  PcnGraph g;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> ntx(0.2, 3.0);
  std::uniform_real_distribution<double> zs(0.0, 2.0);
  for (int i = 0; i < n; ++i) g.add_node(std::to_string(i), ntx(rng), zs(rng));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (u01(rng) >= edge_prob) continue;
      do {
        Coin bal_a = coins(1 + static_cast<std::int64_t>(u01(rng) * 9));
        Coin bal_b = coins(1 + static_cast<std::int64_t>(u01(rng) * 9));
        if (u01(rng) < one_way_prob) (u01(rng) < 0.5 ? bal_a : bal_b) = 0;
        auto ci = g.add_channel(std::to_string(i), std::to_string(j), bal_a, bal_b);
        if (bal_a == 0) g.mutable_channels()[ci].ab_live = false;
        if (bal_b == 0) g.mutable_channels()[ci].ba_live = false;
      } while (u01(rng) < parallel_prob);
    }
  }
  return g;
}

// Connected undirected-style graph (both directions live) for economic
// instances: a random spanning tree plus extra edges.
inline PcnGraph random_connected_graph(std::mt19937_64& rng, int n,
                                       double extra_edge_prob,
                                       double s_max = 1.5) {
  PcnGraph g;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> ntx(0.5, 2.0);
  std::uniform_real_distribution<double> zs(0.0, s_max);
  std::uniform_int_distribution<std::int64_t> bal(3, 20);
  for (int i = 0; i < n; ++i) g.add_node(std::to_string(i), ntx(rng), zs(rng));
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    g.add_channel(std::to_string(i), std::to_string(pick(rng)), coins(bal(rng)),
                  coins(bal(rng)));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (u01(rng) < extra_edge_prob) {
        g.add_channel(std::to_string(i), std::to_string(j), coins(bal(rng)),
                      coins(bal(rng)));
      }
    }
  }
  return g;
}

// Utility with frozen per-action rates and frozen target probabilities, the
// regime of the submodularity and monotonicity statements. Distances are
// still recomputed per strategy.
struct FixedRateInstance {
  PcnGraph graph;
  NodeId joiner = "u";
  GlobalParams params;
  std::vector<Action> omega;
  std::vector<double> lambda_hat;  // per action in omega
  std::vector<double> p_hat;       // per node index of `graph`
};

inline double fixed_rate_utility(const FixedRateInstance& inst,
                                 std::uint32_t subset, bool with_costs) {
  Strategy s;
  double revenue = 0.0;
  double cost = 0.0;
  for (std::size_t i = 0; i < inst.omega.size(); ++i) {
    if (!(subset & (std::uint32_t{1} << i))) continue;
    s.actions.push_back(inst.omega[i]);
    revenue += inst.params.f_avg * inst.lambda_hat[i];
    cost += channel_cost(inst.params, inst.omega[i].lock);
  }
  if (s.actions.empty()) return kNegInf;

  const PcnGraph aug = materialize(inst.graph, inst.joiner, s, inst.params);
  const PathTables t = path_tables(aug);
  const NodeIndex iu = aug.index_of(inst.joiner);
  double fees = 0.0;
  for (NodeIndex v = 0; v < inst.graph.node_count(); ++v) {
    if (inst.p_hat[v] <= 0) continue;
    const int d = t.d(iu, v);
    if (d < 0) return kNegInf;
    fees += inst.params.joiner_n_tx * inst.params.f_avg_t * d * inst.p_hat[v];
  }
  return revenue - fees - (with_costs ? cost : 0.0);
}

inline FixedRateInstance random_fixed_rate_instance(std::mt19937_64& rng,
                                                    int max_nodes,
                                                    int max_actions) {
  std::uniform_int_distribution<int> nd(2, max_nodes);
  std::uniform_int_distribution<int> ad(1, max_actions);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  FixedRateInstance inst;
  const int n = nd(rng);
  inst.graph = random_connected_graph(rng, n, 0.25);
  inst.params.f_avg = 1.0;
  inst.params.f_avg_t = 0.2 + 0.6 * u01(rng);
  inst.params.onchain_cost = coin_from_double(0.2 + 2.0 * u01(rng));
  inst.params.opportunity_rate = 0.05 * u01(rng);
  inst.params.joiner_n_tx = 0.5 + 1.5 * u01(rng);

  const int n_actions = ad(rng);
  std::uniform_int_distribution<int> peer(0, n - 1);
  for (int i = 0; i < n_actions; ++i) {
    Action a;
    a.peer = std::to_string(peer(rng));
    a.lock = coin_from_double(1.0 + 9.0 * u01(rng));
    inst.omega.push_back(a);
    inst.lambda_hat.push_back(2.0 * u01(rng));
  }
  double total = 0.0;
  for (int v = 0; v < n; ++v) {
    inst.p_hat.push_back(u01(rng));
    total += inst.p_hat.back();
  }
  for (auto& p : inst.p_hat) p /= total;
  return inst;
}

}  // namespace pcn::test
