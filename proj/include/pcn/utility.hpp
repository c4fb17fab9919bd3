#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcn/graph.hpp"
#include "pcn/tx_model.hpp"

namespace pcn {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Fee convention for a payment at hop distance d: the model charges d fee
// units by default; `intermediaries` charges d-1 (a direct payment is free).
enum class FeeHops { distance, intermediaries };

// What the counterparty locks when the joiner opens a channel.
enum class PeerLock { zero, symmetric, fixed };

struct GlobalParams {
  double f_avg = 1.0;                    // revenue per forwarded transaction
  double f_avg_t = 1.0;                  // fee paid per hop of an own transaction
  Coin onchain_cost = 0;                 // C, per channel
  double opportunity_rate = 0.0;         // r, per locked coin
  Coin max_tx_size = 0;                  // T; > 0 applies the capacity filter
  std::optional<double> total_tx_rate;   // N; default: sum of node rates
  FeeHops fee_hops = FeeHops::distance;
  PeerLock peer_lock = PeerLock::zero;
  Coin peer_lock_amount = 0;             // used with PeerLock::fixed
  double joiner_n_tx = 1.0;              // N_u of the joining node
  double joiner_s = 1.0;                 // s_u of the joining node
};

struct Action {
  NodeId peer;
  Coin lock = 0;

  friend bool operator==(const Action& x, const Action& y) {
    return x.peer == y.peer && x.lock == y.lock;
  }
  friend bool operator<(const Action& x, const Action& y) {
    return std::tie(x.peer, x.lock) < std::tie(y.peer, y.lock);
  }
};

struct Strategy {
  std::vector<Action> actions;  // multiset; parallel channels allowed

  bool empty() const { return actions.empty(); }
  std::size_t size() const { return actions.size(); }
};

// Budget-relevant spend: sum of C + lock over the strategy (exact).
inline Coin strategy_spend(const GlobalParams& p, const Strategy& s) {
  Coin total = 0;
  for (const auto& a : s.actions) total += p.onchain_cost + a.lock;
  return total;
}

// Explicit traffic, used instead of the degree-biased model when supplied.
// tx_size > 0 routes the flow on the capacity-reduced subgraph.
struct Flow {
  NodeId src;
  NodeId dst;
  double rate = 0.0;
  Coin tx_size = 0;
};

struct Traffic {
  std::vector<Flow> flows;
};

struct UtilityBreakdown {
  double revenue = 0.0;
  double fees = 0.0;
  double channel_cost = 0.0;
  double total = kNegInf;
};

// L_u(v, l) = C + r * l.
inline double channel_cost(const GlobalParams& p, Coin lock) {
  if (lock < 0) throw ValidationError("lock must be >= 0");
  return coin_to_double(p.onchain_cost) + p.opportunity_rate * coin_to_double(lock);
}

// Sum of lambda over u's incident directed edges, times f_avg.
inline double expected_revenue(const PcnGraph& g, const NodeId& u,
                               const EdgeRateTable& rates,
                               const GlobalParams& p) {
  g.index_of(u);
  return p.f_avg * node_flow_rate(rates, u);
}

namespace detail {

inline double hop_factor(int d, FeeHops convention) {
  if (convention == FeeHops::intermediaries) return d > 0 ? d - 1 : 0;
  return d;
}

}  // namespace detail

// N_u * sum over targets of hop-weighted fee times transaction probability.
// +inf as soon as a positive-probability target is unreachable.
inline double expected_fees(const PcnGraph& g, const NodeId& u,
                            const TransProbMatrix& probs,
                            const GlobalParams& p) {
  const NodeIndex iu = g.index_of(u);
  if (probs.n != g.node_count()) {
    throw ValidationError("probability matrix does not match graph");
  }
  const PathTables t = path_tables(g);
  double sum = 0.0;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (v == iu) continue;
    const double prob = probs(iu, v);
    if (prob <= 0) continue;
    const int d = t.d(iu, v);
    if (d < 0) return kPosInf;
    sum += detail::hop_factor(d, p.fee_hops) * prob;
  }
  return g.node(iu).n_tx * p.f_avg_t * sum;
}

// Graph with the joiner and its strategy channels added. The joiner funds
// `lock` on its side; the peer side follows params.peer_lock. An existing
// node may also be used as the joiner, in which case only channels are added.
inline PcnGraph materialize(const PcnGraph& g, const NodeId& u,
                            const Strategy& s, const GlobalParams& p) {
  PcnGraph out = g;
  if (!out.has_node(u)) out.add_node(u, p.joiner_n_tx, p.joiner_s);
  for (const auto& a : s.actions) {
    if (a.lock < 0) throw ValidationError("lock must be >= 0");
    if (!out.has_node(a.peer)) throw UnknownNodeError(a.peer);
    Coin peer_side = 0;
    switch (p.peer_lock) {
      case PeerLock::zero: peer_side = 0; break;
      case PeerLock::symmetric: peer_side = a.lock; break;
      case PeerLock::fixed: peer_side = p.peer_lock_amount; break;
    }
    out.add_channel(u, a.peer, a.lock, peer_side);
  }
  return out;
}

namespace detail {

struct EvalParts {
  double revenue = 0.0;
  double fees = 0.0;
};

// Default model: Zipf probabilities and Eq.-2 edge rates on the augmented
// graph, optionally capacity-filtered at params.max_tx_size.
inline EvalParts eval_model(const PcnGraph& aug, const NodeId& u,
                            const GlobalParams& p) {
  const PcnGraph* geval = &aug;
  PcnGraph reduced;
  if (p.max_tx_size > 0) {
    reduced = reduced_subgraph(aug, p.max_tx_size);
    geval = &reduced;
  }
  const TransProbMatrix probs = trans_prob_matrix(*geval);
  const EdgeRateTable rates = edge_rates(*geval, probs, p.total_tx_rate);
  EvalParts parts;
  parts.revenue = expected_revenue(*geval, u, rates, p);
  parts.fees = expected_fees(*geval, u, probs, p);
  return parts;
}

// Explicit flows: each flow is routed on the subgraph reduced at its own
// transaction size. Revenue counts flow rate crossing u's incident edges;
// fees count u-sourced flows at their hop distance.
inline EvalParts eval_traffic(const PcnGraph& aug, const NodeId& u,
                              const GlobalParams& p, const Traffic& traffic) {
  const NodeIndex iu = aug.index_of(u);
  EvalParts parts;
  std::map<Coin, PcnGraph> graphs;
  std::map<Coin, PathTables> tables;
  const auto tables_for = [&](Coin size) -> const PathTables& {
    auto it = tables.find(size);
    if (it == tables.end()) {
      const PcnGraph& gr =
          graphs.emplace(size, size > 0 ? reduced_subgraph(aug, size) : aug)
              .first->second;
      it = tables.emplace(size, path_tables(gr)).first;
    }
    return it->second;
  };

  for (const auto& f : traffic.flows) {
    if (f.rate < 0) throw ValidationError("flow rate must be >= 0");
    const NodeIndex is = aug.index_of(f.src);
    const NodeIndex ir = aug.index_of(f.dst);
    if (is == ir) throw SameNodeError(f.src);
    const PathTables& t = tables_for(f.tx_size);
    const PcnGraph& gr = graphs.at(f.tx_size);

    if (f.src == u) {
      const int d = t.d(is, ir);
      if (d < 0) {
        if (f.rate > 0) parts.fees = kPosInf;
      } else if (parts.fees != kPosInf) {
        parts.fees += f.rate * p.f_avg_t * hop_factor(d, p.fee_hops);
      }
    }

    const std::uint64_t m = t.count(is, ir);
    if (m == 0) continue;
    double share = 0.0;
    for (ChannelIndex ci = 0; ci < gr.channel_count(); ++ci) {
      const Channel& c = gr.channels()[ci];
      if (c.a != iu && c.b != iu) continue;
      if (c.ab_live) share += static_cast<double>(t.through_edge(is, c.a, c.b, ir));
      if (c.ba_live) share += static_cast<double>(t.through_edge(is, c.b, c.a, ir));
    }
    parts.revenue += p.f_avg * f.rate * share / static_cast<double>(m);
  }
  return parts;
}

}  // namespace detail

// Full utility of the joiner under a strategy: expected revenue minus
// expected fees minus channel costs. A node left without any usable channel
// is disconnected and worth -inf.
inline UtilityBreakdown utility(const PcnGraph& g, const NodeId& u,
                                const Strategy& s, const GlobalParams& p,
                                const Traffic* traffic = nullptr,
                                std::optional<Coin> budget = {}) {
  if (budget) {
    if (*budget <= 0) throw EmptyBudgetError("budget must be > 0");
    if (strategy_spend(p, s) > *budget) {
      throw BudgetExceededError("strategy spend exceeds budget");
    }
  }
  const PcnGraph aug = materialize(g, u, s, p);
  const NodeIndex iu = aug.index_of(u);

  UtilityBreakdown out;
  for (const auto& a : s.actions) out.channel_cost += channel_cost(p, a.lock);

  if (aug.is_isolated(iu) || aug.node_count() < 2) {
    out.total = kNegInf;
    return out;
  }
  const detail::EvalParts parts =
      traffic ? detail::eval_traffic(aug, u, p, *traffic)
              : detail::eval_model(aug, u, p);
  out.revenue = parts.revenue;
  out.fees = parts.fees;
  out.total = out.revenue - out.fees - out.channel_cost;
  return out;
}

// U' = revenue - fees, the channel-cost-free objective of the greedy and
// discrete searches.
inline double simplified_utility(const PcnGraph& g, const NodeId& u,
                                 const Strategy& s, const GlobalParams& p,
                                 const Traffic* traffic = nullptr) {
  const UtilityBreakdown b = utility(g, u, s, p, traffic);
  if (b.total == kNegInf) return kNegInf;
  return b.revenue - b.fees;
}

// U^b = N_u*C/2 + U: utility relative to transacting entirely on-chain.
inline double benefit(const PcnGraph& g, const NodeId& u, const Strategy& s,
                      const GlobalParams& p, const Traffic* traffic = nullptr) {
  const UtilityBreakdown b = utility(g, u, s, p, traffic);
  if (b.total == kNegInf) return kNegInf;
  return p.joiner_n_tx * coin_to_double(p.onchain_cost) / 2.0 + b.total;
}

}  // namespace pcn
