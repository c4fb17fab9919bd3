#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pcn/parallel.hpp"
#include "pcn/tx_model.hpp"
#include "pcn/utility.hpp"

namespace pcn {

// Constants of the topology game: every node sends with the same bias s,
// a = N_u * f_avg^T prices its own traffic, b = N_v * f_avg prices routed
// traffic, and every incident edge costs l per endpoint.
struct GameParams {
  double a = 0.0;
  double b = 0.0;
  double l = 0.0;
  double s = 0.0;
  int n = 0;  // leaf count for the star conditions
};

enum class TopologyKind { star, path, circle, complete, random };

// star(n): n leaves around node "0" (n+1 nodes). circle(n): a cycle on n+1
// nodes. path(n)/complete(n): n nodes. Channels carry unit locks.
inline PcnGraph make_topology(TopologyKind kind, int n,
                              std::uint64_t seed = 0, double edge_prob = 0.5) {
  if (n < 2) throw BadSizeError("topology size must be >= 2");
  PcnGraph g;
  const Coin unit = coins(1);
  const auto id = [](int i) { return std::to_string(i); };
  switch (kind) {
    case TopologyKind::star: {
      for (int i = 0; i <= n; ++i) g.add_node(id(i));
      for (int i = 1; i <= n; ++i) g.add_channel(id(0), id(i), unit, unit);
      break;
    }
    case TopologyKind::path: {
      for (int i = 0; i < n; ++i) g.add_node(id(i));
      for (int i = 0; i + 1 < n; ++i) g.add_channel(id(i), id(i + 1), unit, unit);
      break;
    }
    case TopologyKind::circle: {
      for (int i = 0; i <= n; ++i) g.add_node(id(i));
      for (int i = 0; i <= n; ++i) g.add_channel(id(i), id((i + 1) % (n + 1)), unit, unit);
      break;
    }
    case TopologyKind::complete: {
      for (int i = 0; i < n; ++i) g.add_node(id(i));
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) g.add_channel(id(i), id(j), unit, unit);
      }
      break;
    }
    case TopologyKind::random: {
      for (int i = 0; i < n; ++i) g.add_node(id(i));
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> coin_flip(0.0, 1.0);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (coin_flip(rng) < edge_prob) g.add_channel(id(i), id(j), unit, unit);
        }
      }
      break;
    }
  }
  return g;
}

// Game utility of one node: routed-traffic revenue in node-betweenness form
// minus hop-weighted own fees minus l per incident channel; -inf when some
// node is unreachable.
inline double game_utility(const PcnGraph& g, const NodeId& u,
                           const GameParams& gp) {
  const NodeIndex iu = g.index_of(u);
  const std::size_t n = g.node_count();
  if (n < 2) return kNegInf;
  if (g.is_isolated(iu)) return kNegInf;

  const PathTables t = path_tables(g);
  for (NodeIndex v = 0; v < n; ++v) {
    if (v != iu && t.d(iu, v) < 0) return kNegInf;
  }
  const TransProbMatrix probs = trans_prob_matrix(g, gp.s);

  double revenue = 0.0;
  for (NodeIndex v1 = 0; v1 < n; ++v1) {
    if (v1 == iu) continue;
    for (NodeIndex v2 = 0; v2 < n; ++v2) {
      if (v2 == iu || v2 == v1) continue;
      const std::uint64_t m = t.count(v1, v2);
      if (m == 0) continue;
      const std::uint64_t mu = t.through_node(v1, iu, v2);
      if (mu == 0) continue;
      revenue += probs(v1, v2) * static_cast<double>(mu) / static_cast<double>(m);
    }
  }
  revenue *= gp.b;

  double fees = 0.0;
  for (NodeIndex v = 0; v < n; ++v) {
    if (v == iu) continue;
    fees += static_cast<double>(t.d(iu, v)) * probs(iu, v);
  }
  fees *= gp.a;

  return revenue - fees - gp.l * static_cast<double>(g.channel_degree(iu));
}

struct DeviationReport {
  NodeId node;
  std::vector<NodeId> best_response;  // adjacency set of the best deviation
  double utility_gain = 0.0;
  bool is_profitable = false;
};

namespace detail {

inline PcnGraph with_adjacency(const PcnGraph& g, NodeIndex u,
                               const std::vector<NodeIndex>& neighbors) {
  PcnGraph out = g;
  out.remove_incident_channels(u);
  const Coin unit = coins(1);
  for (const NodeIndex v : neighbors) {
    out.add_channel(out.node(u).id, out.node(v).id, unit, unit);
  }
  return out;
}

inline bool strictly_better(double gain, double base) {
  return gain > 1e-9 * std::max(1.0, std::abs(base));
}

}  // namespace detail

// Exhaustive best response of one node: every adjacency set is evaluated
// with the rest of the network held fixed.
inline DeviationReport best_response(const PcnGraph& g, const NodeId& u,
                                     const GameParams& gp, int max_n = 10) {
  const NodeIndex iu = g.index_of(u);
  const std::size_t n = g.node_count();
  if (static_cast<int>(n) > max_n) {
    throw TooLargeError("best-response enumeration guarded at " +
                        std::to_string(max_n) + " nodes");
  }
  const double current = game_utility(g, u, gp);

  std::vector<NodeIndex> others;
  for (NodeIndex v = 0; v < n; ++v) {
    if (v != iu) others.push_back(v);
  }

  double best = kNegInf;
  std::vector<NodeIndex> best_set;
  const std::size_t total = std::size_t{1} << others.size();
  for (std::size_t mask = 0; mask < total; ++mask) {
    std::vector<NodeIndex> adj;
    for (std::size_t i = 0; i < others.size(); ++i) {
      if (mask & (std::size_t{1} << i)) adj.push_back(others[i]);
    }
    const PcnGraph dev = detail::with_adjacency(g, iu, adj);
    const double value = game_utility(dev, u, gp);
    if (mask == 0 || value > best) {
      best = value;
      best_set = adj;
    }
  }

  DeviationReport rep;
  rep.node = u;
  for (const NodeIndex v : best_set) rep.best_response.push_back(g.node(v).id);
  if (current == kNegInf) {
    rep.utility_gain = best == kNegInf ? 0.0 : kPosInf;
    rep.is_profitable = best != kNegInf;
  } else if (best == kNegInf) {
    rep.utility_gain = kNegInf;
    rep.is_profitable = false;
  } else {
    rep.utility_gain = best - current;
    rep.is_profitable = detail::strictly_better(rep.utility_gain, current);
  }
  return rep;
}

struct NashReport {
  bool is_ne = true;
  std::vector<DeviationReport> deviations;
};

// NE check by per-node best-response enumeration. With early_exit the scan
// stops at the first profitable deviation and reports only that node.
inline NashReport is_nash_equilibrium(const PcnGraph& g, const GameParams& gp,
                                      int max_n = 10, int threads = 1,
                                      bool early_exit = false) {
  NashReport rep;
  if (early_exit) {
    for (const auto& ni : g.nodes()) {
      DeviationReport r = best_response(g, ni.id, gp, max_n);
      if (r.is_profitable) {
        rep.is_ne = false;
        rep.deviations.push_back(std::move(r));
        return rep;
      }
    }
    return rep;
  }
  rep.deviations.resize(g.node_count());
  std::vector<NodeId> ids;
  for (const auto& ni : g.nodes()) ids.push_back(ni.id);
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    rep.deviations[i] = best_response(g, ids[i], gp, max_n);
  });
  for (const auto& r : rep.deviations) {
    if (r.is_profitable) rep.is_ne = false;
  }
  return rep;
}

// Generalized harmonic number H_n^s.
inline double harmonic(std::uint64_t n, double s) {
  if (n < 1) throw ValidationError("harmonic number needs n >= 1");
  double sum = 0.0;
  for (std::uint64_t k = 1; k <= n; ++k) {
    sum += std::pow(static_cast<double>(k), -s);
  }
  return sum;
}

struct StarConditions {
  bool holds = false;
  bool c1 = false;
  bool c2 = false;
  bool c3 = false;
  double slack1 = 0.0;  // min slack; >= 0 iff the condition holds
  double slack2 = 0.0;
  double slack3 = 0.0;
};

// The three sufficient inequalities for a star with gp.n leaves to be a
// Nash equilibrium, evaluated over the full i range with minimum slacks.
inline StarConditions star_ne_conditions(const GameParams& gp) {
  if (gp.n < 2) throw BadSizeError("star conditions need n >= 2 leaves");
  const double h_n = harmonic(static_cast<std::uint64_t>(gp.n), gp.s);
  const double two_s = std::pow(2.0, gp.s);

  StarConditions out;
  out.slack1 = two_s * gp.l - gp.a / h_n;
  out.c1 = out.slack1 >= 0;

  out.slack2 = kPosInf;
  out.slack3 = kPosInf;
  for (int i = 2; i <= gp.n - 1; ++i) {
    const double h_i1 = harmonic(static_cast<std::uint64_t>(i + 1), gp.s);
    const double di = static_cast<double>(i);
    const double lhs2 = gp.b * (di / 2.0) * (h_i1 - 1.0 - 1.0 / two_s) / h_n +
                        gp.a * (h_i1 - 1.0) / h_n;
    out.slack2 = std::min(out.slack2, gp.l * di - lhs2);
    const double lhs3 = gp.b * (di / 2.0) * (h_n - 1.0 - 1.0 / two_s) / h_n +
                        gp.a * (h_i1 - 2.0) / h_n;
    out.slack3 = std::min(out.slack3, gp.l * (di - 1.0) - lhs3);
  }
  out.c2 = out.slack2 >= 0;
  out.c3 = out.slack3 >= 0;
  out.holds = out.c1 && out.c2 && out.c3;
  return out;
}

// Upper bound on the longest shortest path through a hub in a stable
// network: 2*(((C+eps)/2 - lambda_e*f) / (p_min*N*f)) + 1.
inline double diameter_bound(double c, double eps, double lambda_e, double f,
                             double p_min, double n_rate) {
  if (p_min <= 0 || n_rate <= 0 || f <= 0) {
    throw ValidationError("diameter bound needs p_min, N, f > 0");
  }
  return 2.0 * (((c + eps) / 2.0 - lambda_e * f) / (p_min * n_rate * f)) + 1.0;
}

struct HubPathCheck {
  bool applicable = false;  // needs a hub path of length >= 2
  std::vector<NodeId> path;
  int d = 0;
  double lambda_e = 0.0;
  double p_min = 0.0;
  double bound = 0.0;
  bool holds = true;
};

namespace detail {

// One shortest s->t path, following the lowest-index next hop.
inline std::vector<NodeIndex> reconstruct_path(const PcnGraph& g,
                                               const PathTables& t, NodeIndex s,
                                               NodeIndex r) {
  std::vector<NodeIndex> path{s};
  NodeIndex cur = s;
  while (cur != r) {
    const int remaining = t.d(cur, r);
    NodeIndex next = g.node_count();
    for (const auto& c : g.channels()) {
      if (c.ab_live && c.a == cur && t.d(c.b, r) == remaining - 1) {
        next = std::min(next, c.b);
      }
      if (c.ba_live && c.b == cur && t.d(c.a, r) == remaining - 1) {
        next = std::min(next, c.a);
      }
    }
    path.push_back(next);
    cur = next;
  }
  return path;
}

}  // namespace detail

// Measures the diameter-bound inequality on a concrete network under the
// game normalization (per-source rate 1, f := b, edge cost C+eps := 2l).
// The hub is the max-degree node; P a longest shortest path containing it;
// lambda_e the two-way rate of the midpoint shortcut once added; p_min the
// minimum transaction probability over directed sub-paths of P crossing
// the midpoint.
inline HubPathCheck hub_diameter_check(const PcnGraph& g, const GameParams& gp) {
  HubPathCheck out;
  const std::size_t n = g.node_count();
  if (n < 3 || gp.b <= 0) return out;

  NodeIndex hub = 0;
  for (NodeIndex v = 1; v < n; ++v) {
    if (g.channel_degree(v) > g.channel_degree(hub)) hub = v;
  }
  const PathTables t = path_tables(g);

  int best_d = -1;
  NodeIndex best_s = 0, best_r = 0;
  for (NodeIndex s = 0; s < n; ++s) {
    for (NodeIndex r = 0; r < n; ++r) {
      if (s == r) continue;
      const int d = t.d(s, r);
      if (d < 0 || d <= best_d) continue;
      const bool on_path = s == hub || r == hub || t.through_node(s, hub, r) > 0;
      if (on_path) {
        best_d = d;
        best_s = s;
        best_r = r;
      }
    }
  }
  if (best_d < 2) return out;

  // Assemble P through the hub: s..hub followed by hub..r.
  std::vector<NodeIndex> path;
  if (best_s == hub || best_r == hub) {
    path = detail::reconstruct_path(g, t, best_s, best_r);
  } else {
    path = detail::reconstruct_path(g, t, best_s, hub);
    const std::vector<NodeIndex> tail = detail::reconstruct_path(g, t, hub, best_r);
    path.insert(path.end(), tail.begin() + 1, tail.end());
  }
  out.d = best_d;
  for (const NodeIndex v : path) out.path.push_back(g.node(v).id);

  const int mid = best_d / 2;
  const NodeIndex vl = path[static_cast<std::size_t>(mid - 1)];
  const NodeIndex vr = path[static_cast<std::size_t>(mid + 1)];

  // Routed rate through the shortcut once it exists, per endpoint party.
  // Flows sourced or sunk at a party earn it no routing revenue, so the
  // revenue term of the bound is the minimum over the parties of the
  // remaining rate across both directions.
  PcnGraph aug = g;
  aug.add_channel(g.node(vl).id, g.node(vr).id, coins(1), coins(1));
  const ChannelIndex shortcut = aug.channel_count() - 1;
  const PathTables ta = path_tables(aug);
  const TransProbMatrix probs_aug = trans_prob_matrix(aug, gp.s);
  double lam_vl = 0.0, lam_vr = 0.0;
  for (NodeIndex s = 0; s < n; ++s) {
    for (NodeIndex r = 0; r < n; ++r) {
      if (s == r) continue;
      const std::uint64_t m = ta.count(s, r);
      if (m == 0) continue;
      const Channel& c = aug.channels()[shortcut];
      const double share =
          probs_aug(s, r) *
          (static_cast<double>(ta.through_edge(s, c.a, c.b, r)) +
           static_cast<double>(ta.through_edge(s, c.b, c.a, r))) /
          static_cast<double>(m);
      if (s != vl && r != vl) lam_vl += share;
      if (s != vr && r != vr) lam_vr += share;
    }
  }
  out.lambda_e = std::min(lam_vl, lam_vr);

  // Minimum selection probability over directed sub-paths of P with one end
  // on each side of the midpoint.
  const TransProbMatrix probs = trans_prob_matrix(g, gp.s);
  out.p_min = kPosInf;
  for (int i = 0; i <= mid - 1; ++i) {
    for (int j = mid + 1; j <= best_d; ++j) {
      const NodeIndex x = path[static_cast<std::size_t>(i)];
      const NodeIndex y = path[static_cast<std::size_t>(j)];
      out.p_min = std::min(out.p_min, probs(x, y));
      out.p_min = std::min(out.p_min, probs(y, x));
    }
  }
  if (out.p_min <= 0 || out.p_min == kPosInf) return out;

  out.applicable = true;
  out.bound = diameter_bound(2.0 * gp.l, 0.0, out.lambda_e, gp.b, out.p_min, 1.0);
  out.holds = static_cast<double>(out.d) <= out.bound + 1e-9;
  return out;
}

}  // namespace pcn
