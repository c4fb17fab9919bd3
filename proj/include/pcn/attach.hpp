#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pcn/parallel.hpp"
#include "pcn/utility.hpp"

namespace pcn {

enum class Objective { utility, simplified, benefit };

inline const char* objective_name(Objective k) {
  switch (k) {
    case Objective::utility: return "U";
    case Objective::simplified: return "U'";
    case Objective::benefit: return "Ub";
  }
  return "?";
}

struct AttachProblem {
  PcnGraph graph;
  NodeId joiner = "joiner";
  GlobalParams params;
  Coin budget = 0;  // B_u
  std::vector<NodeId> candidates;  // empty: all existing nodes
  const Traffic* traffic = nullptr;
  int threads = 1;
};

struct OptResult {
  Strategy strategy;
  double objective = kNegInf;
  Objective kind = Objective::simplified;
  std::uint64_t evaluations = 0;
  std::uint64_t iterations = 0;
  std::vector<double> step_gains;  // greedy marginal-gain trace
};

namespace detail {

inline std::vector<NodeId> resolved_candidates(const AttachProblem& p) {
  std::vector<NodeId> out;
  if (p.candidates.empty()) {
    for (const auto& ni : p.graph.nodes()) out.push_back(ni.id);
  } else {
    for (const auto& id : p.candidates) {
      p.graph.index_of(id);
      out.push_back(id);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove(out.begin(), out.end(), p.joiner), out.end());
  return out;
}

inline double objective_value(const AttachProblem& p, const Strategy& s,
                              Objective kind) {
  switch (kind) {
    case Objective::utility:
      return utility(p.graph, p.joiner, s, p.params, p.traffic).total;
    case Objective::simplified:
      return simplified_utility(p.graph, p.joiner, s, p.params, p.traffic);
    case Objective::benefit:
      return benefit(p.graph, p.joiner, s, p.params, p.traffic);
  }
  return kNegInf;
}

// Marginal gain in extended reals: stepping out of -inf is an infinite
// gain, so the first greedy pick ties across all connecting candidates and
// falls to the lowest peer id.
inline double marginal_gain(double prev, double next) {
  if (prev == kNegInf) return next == kNegInf ? kNegInf : kPosInf;
  if (next == kNegInf) return kNegInf;
  return next - prev;
}

struct GreedyOutcome {
  Strategy best;
  double best_value = kNegInf;
  std::vector<double> gains;
  std::uint64_t evaluations = 0;
  std::uint64_t steps = 0;
};

// One greedy pass with a forced lock per step; returns the best prefix.
inline GreedyOutcome greedy_core(const AttachProblem& p,
                                 const std::vector<Coin>& step_locks) {
  const std::vector<NodeId> cands = resolved_candidates(p);
  GreedyOutcome out;
  std::vector<bool> used(cands.size(), false);
  Strategy cur;
  double cur_val = kNegInf;
  std::vector<std::pair<Strategy, double>> prefixes;

  for (const Coin lock : step_locks) {
    std::vector<double> vals(cands.size(), kNegInf);
    std::atomic<std::uint64_t> evals{0};
    parallel_for(cands.size(), p.threads, [&](std::size_t i) {
      if (used[i]) return;
      Strategy trial = cur;
      trial.actions.push_back(Action{cands[i], lock});
      vals[i] = simplified_utility(p.graph, p.joiner, trial, p.params, p.traffic);
      evals.fetch_add(1, std::memory_order_relaxed);
    });
    out.evaluations += evals.load();

    std::size_t best_i = cands.size();
    double best_key = kNegInf;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (used[i]) continue;
      const double key = marginal_gain(cur_val, vals[i]);
      if (best_i == cands.size() || key > best_key) {
        best_i = i;
        best_key = key;
      }
    }
    if (best_i == cands.size()) break;  // candidates exhausted

    used[best_i] = true;
    cur.actions.push_back(Action{cands[best_i], lock});
    cur_val = vals[best_i];
    out.gains.push_back(best_key);
    out.steps++;
    prefixes.emplace_back(cur, cur_val);
  }

  for (const auto& [strategy, value] : prefixes) {
    if (value > out.best_value) {
      out.best = strategy;
      out.best_value = value;
    }
  }
  if (out.best.empty() && !prefixes.empty()) {
    // every prefix stayed at -inf; return the shortest as the algorithm does
    out.best = prefixes.front().first;
    out.best_value = prefixes.front().second;
  }
  return out;
}

}  // namespace detail

// Greedy channel selection with a fixed lock per channel (Algorithm-1
// style): add the best marginal-U' action up to M = floor(B/(C+l1)) times
// and return the best prefix.
inline OptResult greedy_fixed(const AttachProblem& p, Coin lock) {
  if (lock < 0) throw ValidationError("lock must be >= 0");
  if (p.budget <= 0) throw EmptyBudgetError("budget must be > 0");
  const Coin per_channel = p.params.onchain_cost + lock;
  if (per_channel <= 0) {
    throw EmptyBudgetError("channel cost C + lock must be > 0");
  }
  const Coin m_budget = p.budget / per_channel;
  if (m_budget < 1) {
    throw EmptyBudgetError("budget cannot fund a single channel");
  }
  const std::size_t n_cands = detail::resolved_candidates(p).size();
  const std::size_t steps =
      std::min<std::size_t>(static_cast<std::size_t>(m_budget), n_cands);
  const std::vector<Coin> locks(steps, lock);
  detail::GreedyOutcome g = detail::greedy_core(p, locks);

  OptResult res;
  res.strategy = std::move(g.best);
  res.objective = g.best_value;
  res.kind = Objective::simplified;
  res.evaluations = g.evaluations;
  res.iterations = g.steps;
  res.step_gains = std::move(g.gains);
  return res;
}

// Exhaustive search over unit-discretized lock assignments (Algorithm-2
// style): enumerate ordered divisions of floor(B/m) units over at most
// k = floor(B/C) channels and run the lock-forced greedy on each. Zero
// parts open no channel, so the enumeration collapses them and walks the
// ordered sequences of positive parts directly.
inline OptResult exhaustive_discrete(const AttachProblem& p, Coin unit,
                                     std::uint64_t max_divisions = 10'000'000) {
  if (unit <= 0) throw ValidationError("unit m must be > 0");
  if (p.budget <= 0) throw EmptyBudgetError("budget must be > 0");
  const Coin c = p.params.onchain_cost;
  const std::uint64_t k_raw =
      c > 0 ? static_cast<std::uint64_t>(p.budget / c)
            : std::numeric_limits<std::uint64_t>::max();
  if (k_raw < 1) throw EmptyBudgetError("budget cannot cover one channel cost");
  const std::uint64_t units = static_cast<std::uint64_t>(p.budget / unit);
  const std::size_t n_cands = detail::resolved_candidates(p).size();
  const std::uint64_t k =
      std::min<std::uint64_t>({k_raw, units, static_cast<std::uint64_t>(n_cands)});

  // Number of sequences: sum over c of C(units, c); k <= units here, so the
  // binomial recurrence stays in range. Bail out once the cap is passed.
  {
    long double count = 0.0L;
    long double binom = 1.0L;
    for (std::uint64_t i = 1; i <= k; ++i) {
      binom = binom * static_cast<long double>(units - i + 1) /
              static_cast<long double>(i);
      count += binom;
      if (count > static_cast<long double>(max_divisions)) {
        throw DivisionSpaceTooLargeError(
            "division space exceeds cap; raise the unit m");
      }
    }
  }

  OptResult res;
  res.kind = Objective::simplified;
  std::vector<Coin> seq;

  const auto run_sequence = [&]() {
    Coin spend = 0;
    for (const Coin l : seq) spend += c + l;
    if (spend > p.budget) return;  // infeasible division
    res.iterations++;
    detail::GreedyOutcome g = detail::greedy_core(p, seq);
    res.evaluations += g.evaluations;
    if (g.best_value > res.objective) {
      res.objective = g.best_value;
      res.strategy = std::move(g.best);
    }
  };

  // DFS over sequences of positive unit counts, lexicographic order.
  const std::function<void(std::uint64_t)> extend = [&](std::uint64_t left) {
    if (!seq.empty()) run_sequence();
    if (seq.size() >= k) return;
    for (std::uint64_t take = 1; take <= left; ++take) {
      // prune: even without further channels this division must fit
      Coin spend = c * static_cast<Coin>(seq.size() + 1);
      for (const Coin l : seq) spend += l;
      spend += static_cast<Coin>(take) * unit;
      if (spend > p.budget) break;
      seq.push_back(static_cast<Coin>(take) * unit);
      extend(left - take);
      seq.pop_back();
    }
  };
  extend(units);
  return res;
}

// Exact maximizer over all budget-feasible subsets of a finite action set.
inline OptResult brute_force_oracle(const AttachProblem& p,
                                    const std::vector<Action>& action_space,
                                    Objective kind,
                                    std::size_t max_channels =
                                        std::numeric_limits<std::size_t>::max()) {
  if (action_space.size() > 20) {
    throw SpaceTooLargeError("brute force is guarded at 20 actions");
  }
  std::vector<Action> space = action_space;
  std::sort(space.begin(), space.end());
  const std::size_t n = space.size();
  const std::size_t total = std::size_t{1} << n;

  std::vector<Coin> spend(total, 0);
  for (std::size_t mask = 1; mask < total; ++mask) {
    const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
    spend[mask] = spend[mask & (mask - 1)] + p.params.onchain_cost + space[low].lock;
  }

  std::vector<double> vals(total, kNegInf);
  std::vector<char> feasible(total, 0);
  for (std::size_t mask = 0; mask < total; ++mask) {
    feasible[mask] = spend[mask] <= p.budget &&
                     static_cast<std::size_t>(__builtin_popcountll(mask)) <= max_channels;
  }
  parallel_for(total, p.threads, [&](std::size_t mask) {
    if (!feasible[mask]) return;
    Strategy s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) s.actions.push_back(space[i]);
    }
    vals[mask] = detail::objective_value(p, s, kind);
  });

  OptResult res;
  res.kind = kind;
  std::size_t best_mask = 0;
  double best = kNegInf;
  bool found = false;
  for (std::size_t mask = 0; mask < total; ++mask) {
    if (!feasible[mask]) continue;
    res.evaluations++;
    if (!found || vals[mask] > best) {
      found = true;
      best = vals[mask];
      best_mask = mask;
    }
  }
  if (found) {
    res.objective = best;
    for (std::size_t i = 0; i < n; ++i) {
      if (best_mask & (std::size_t{1} << i)) res.strategy.actions.push_back(space[i]);
    }
  }
  return res;
}

namespace detail {

struct LocalSearchState {
  Strategy strategy;
  double value = kNegInf;
  std::uint64_t evaluations = 0;
  std::uint64_t accepts = 0;
};

inline bool ls_improved(double prev, double next, double delta) {
  if (next == kNegInf) return false;
  if (prev == kNegInf) return true;
  if (prev > 0) return next >= prev * (1.0 + delta);
  return next >= prev + delta * std::max(1.0, std::abs(prev));
}

inline LocalSearchState local_search(const AttachProblem& p,
                                     const std::vector<Action>& space,
                                     Strategy seed, double eps) {
  LocalSearchState st;
  const double delta =
      eps / (static_cast<double>(space.size()) * static_cast<double>(space.size()));
  const auto feasible = [&](const Strategy& s) {
    return strategy_spend(p.params, s) <= p.budget;
  };
  const auto eval = [&](const Strategy& s) {
    st.evaluations++;
    return benefit(p.graph, p.joiner, s, p.params, p.traffic);
  };
  const auto in_strategy = [](const Strategy& s, const Action& a) {
    return std::find(s.actions.begin(), s.actions.end(), a) != s.actions.end();
  };

  if (seed.empty()) {
    for (const Action& a : space) {
      Strategy single;
      single.actions.push_back(a);
      if (!feasible(single)) continue;
      const double v = eval(single);
      if (v > st.value) {
        st.value = v;
        st.strategy = single;
      }
    }
    if (st.strategy.empty()) return st;  // nothing feasible
  } else {
    st.strategy = std::move(seed);
    st.value = eval(st.strategy);
  }

  bool moved = true;
  while (moved && st.accepts < 5000) {
    moved = false;
    // adds
    for (const Action& a : space) {
      if (in_strategy(st.strategy, a)) continue;
      Strategy t = st.strategy;
      t.actions.push_back(a);
      std::sort(t.actions.begin(), t.actions.end());
      if (!feasible(t)) continue;
      const double v = eval(t);
      if (ls_improved(st.value, v, delta)) {
        st.strategy = std::move(t);
        st.value = v;
        st.accepts++;
        moved = true;
        break;
      }
    }
    if (moved) continue;
    // deletes
    for (std::size_t i = 0; i < st.strategy.size(); ++i) {
      Strategy t = st.strategy;
      t.actions.erase(t.actions.begin() + static_cast<std::ptrdiff_t>(i));
      const double v = eval(t);
      if (ls_improved(st.value, v, delta)) {
        st.strategy = std::move(t);
        st.value = v;
        st.accepts++;
        moved = true;
        break;
      }
    }
    if (moved) continue;
    // swaps
    for (std::size_t i = 0; i < st.strategy.size() && !moved; ++i) {
      for (const Action& a : space) {
        if (in_strategy(st.strategy, a)) continue;
        Strategy t = st.strategy;
        t.actions[i] = a;
        std::sort(t.actions.begin(), t.actions.end());
        if (!feasible(t)) continue;
        const double v = eval(t);
        if (ls_improved(st.value, v, delta)) {
          st.strategy = std::move(t);
          st.value = v;
          st.accepts++;
          moved = true;
          break;
        }
      }
    }
  }
  return st;
}

}  // namespace detail

// Local-search maximization of the benefit function over an adaptively
// refined lock grid. Candidate channels must satisfy the positivity
// precondition E^fees + (B/C) * L_u(v,l) < C_u; others are excluded.
inline OptResult continuous_local_search(const AttachProblem& p, double eps) {
  if (eps <= 0) throw ValidationError("eps must be > 0");
  if (p.budget <= 0) throw EmptyBudgetError("budget must be > 0");
  if (p.params.onchain_cost <= 0) {
    throw ValidationError("continuous search requires on-chain cost C > 0");
  }
  const std::vector<NodeId> cands = detail::resolved_candidates(p);
  const double c_u =
      p.params.joiner_n_tx * coin_to_double(p.params.onchain_cost) / 2.0;
  const double budget_ratio = static_cast<double>(p.budget) /
                              static_cast<double>(p.params.onchain_cost);

  OptResult res;
  res.kind = Objective::benefit;

  const auto action_space = [&](Coin grid) {
    std::vector<Action> space;
    for (const NodeId& v : cands) {
      for (Coin lock = grid; p.params.onchain_cost + lock <= p.budget;
           lock += grid) {
        Strategy single;
        single.actions.push_back(Action{v, lock});
        const UtilityBreakdown b =
            utility(p.graph, p.joiner, single, p.params, p.traffic);
        res.evaluations++;
        const double gate =
            b.fees + budget_ratio * channel_cost(p.params, lock);
        if (gate < c_u) space.push_back(Action{v, lock});
      }
    }
    std::sort(space.begin(), space.end());
    return space;
  };

  Coin grid = std::max<Coin>(p.budget / 8, 1);
  std::vector<Action> space = action_space(grid);
  if (space.empty()) throw NoFeasibleCandidateError();

  Strategy best;
  double best_value = kNegInf;
  const auto run_at = [&](const std::vector<Action>& sp, Strategy seed) {
    detail::LocalSearchState s1 = detail::local_search(p, sp, std::move(seed), eps);
    res.evaluations += s1.evaluations;
    res.iterations += s1.accepts;
    if (s1.value > best_value) {
      best_value = s1.value;
      best = s1.strategy;
    }
    // complement-seeded restart
    std::vector<Action> rest;
    for (const Action& a : sp) {
      if (std::find(s1.strategy.actions.begin(), s1.strategy.actions.end(), a) ==
          s1.strategy.actions.end()) {
        rest.push_back(a);
      }
    }
    if (!rest.empty()) {
      detail::LocalSearchState s2 = detail::local_search(p, rest, Strategy{}, eps);
      res.evaluations += s2.evaluations;
      res.iterations += s2.accepts;
      if (s2.value > best_value) {
        best_value = s2.value;
        best = s2.strategy;
      }
    }
  };

  run_at(space, Strategy{});
  for (int refinement = 0; refinement < 12 && grid >= 2; ++refinement) {
    const double before = best_value;
    grid /= 2;
    space = action_space(grid);
    if (space.empty()) break;
    run_at(space, best);
    const double gain = best_value - before;
    if (before != kNegInf &&
        gain < eps * std::max(1.0, std::abs(before))) {
      break;
    }
  }

  res.strategy = best;
  res.objective = best_value;
  return res;
}

}  // namespace pcn
