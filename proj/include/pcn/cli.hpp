#pragma once

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcn/attach.hpp"
#include "pcn/equilibrium.hpp"
#include "pcn/io.hpp"

namespace pcn::cli {

namespace detail {

inline TopologyKind parse_topology(const std::string& name) {
  if (name == "star") return TopologyKind::star;
  if (name == "path") return TopologyKind::path;
  if (name == "circle") return TopologyKind::circle;
  if (name == "complete") return TopologyKind::complete;
  if (name == "random") return TopologyKind::random;
  throw ValidationError("unknown topology: " + name);
}

inline Action parse_action(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw ValidationError("action must be PEER:LOCK, got " + text);
  }
  Action a;
  a.peer = text.substr(0, colon);
  try {
    a.lock = coin_from_double(std::stod(text.substr(colon + 1)));
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad lock amount in action " + text);
  }
  if (a.lock < 0) throw ValidationError("lock must be >= 0 in action " + text);
  return a;
}

inline std::string strategy_json(const Strategy& s) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < s.actions.size(); ++i) {
    if (i) out << ",";
    out << "{\"peer\":" << json_escape(s.actions[i].peer)
        << ",\"lock\":" << format_double(coin_to_double(s.actions[i].lock)) << "}";
  }
  out << "]";
  return out.str();
}

inline int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("PCN_ATTACH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

}  // namespace detail

// Dispatches one command. Structured results go to `out`, diagnostics to
// `err`. Exit status: 0 success, 1 validation error, 2 computation guard.
inline int run(std::vector<std::string> args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"payment-channel network analysis toolkit"};
  app.require_subcommand(1);
  int threads_flag = 0;
  app.add_option("--threads", threads_flag, "worker thread cap");

  // gen
  auto* gen = app.add_subcommand("gen", "emit a topology as graph JSON");
  std::string gen_topology = "star";
  int gen_n = 4;
  std::uint64_t gen_seed = 0;
  double gen_edge_prob = 0.5;
  double gen_n_tx = 1.0;
  double gen_zipf_s = 1.0;
  gen->add_option("--topology", gen_topology, "star|path|circle|complete|random");
  gen->add_option("--n", gen_n, "size parameter")->required();
  gen->add_option("--seed", gen_seed, "random topology seed");
  gen->add_option("--edge-prob", gen_edge_prob, "random topology edge probability");
  gen->add_option("--n-tx", gen_n_tx, "per-node transaction rate");
  gen->add_option("--zipf-s", gen_zipf_s, "per-node bias exponent");

  // rates
  auto* rates_cmd = app.add_subcommand("rates", "edge choice probabilities and rates");
  std::string rates_graph, rates_config, rates_out = "csv";
  double rates_tx_size = 0.0;
  rates_cmd->add_option("--graph", rates_graph, "graph JSON file")->required();
  rates_cmd->add_option("--config", rates_config, "config JSON file");
  rates_cmd->add_option("--tx-size", rates_tx_size, "capacity filter (0 = full graph)");
  rates_cmd->add_option("--out", rates_out, "json|csv");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "utility breakdown of a strategy");
  std::string eval_graph, eval_config, eval_joiner = "joiner";
  std::vector<std::string> eval_actions;
  double eval_joiner_ntx = 1.0, eval_joiner_s = 1.0;
  double eval_budget = -1.0;
  eval_cmd->add_option("--graph", eval_graph, "graph JSON file")->required();
  eval_cmd->add_option("--config", eval_config, "config JSON file");
  eval_cmd->add_option("--joiner", eval_joiner, "joining node id");
  eval_cmd->add_option("--joiner-n-tx", eval_joiner_ntx, "joiner transaction rate");
  eval_cmd->add_option("--joiner-s", eval_joiner_s, "joiner bias exponent");
  eval_cmd->add_option("--action", eval_actions, "strategy action PEER:LOCK")
      ->take_all();
  eval_cmd->add_option("--budget", eval_budget, "budget check (coins)");

  // attach
  auto* attach_cmd = app.add_subcommand("attach", "optimize the joining strategy");
  std::string at_graph, at_config, at_algo = "greedy", at_out = "json";
  std::string at_joiner = "joiner";
  std::vector<std::string> at_candidates;
  double at_joiner_ntx = 1.0, at_joiner_s = 1.0;
  double at_budget = 0.0, at_lock = 1.0, at_unit = 1.0, at_eps = 1e-3;
  attach_cmd->add_option("--graph", at_graph, "graph JSON file")->required();
  attach_cmd->add_option("--config", at_config, "config JSON file");
  attach_cmd->add_option("--joiner", at_joiner, "joining node id");
  attach_cmd->add_option("--joiner-n-tx", at_joiner_ntx, "joiner transaction rate");
  attach_cmd->add_option("--joiner-s", at_joiner_s, "joiner bias exponent");
  attach_cmd->add_option("--budget", at_budget, "budget B_u (coins)")->required();
  attach_cmd->add_option("--algo", at_algo, "greedy|discrete|continuous|brute");
  attach_cmd->add_option("--lock", at_lock, "per-channel lock (greedy, brute)");
  attach_cmd->add_option("--unit", at_unit, "lock unit m (discrete)");
  attach_cmd->add_option("--eps", at_eps, "convergence threshold (continuous)");
  attach_cmd->add_option("--candidates", at_candidates, "candidate peer ids")
      ->delimiter(',');
  attach_cmd->add_option("--out", at_out, "json|csv");

  // ne-check
  auto* ne_cmd = app.add_subcommand("ne-check", "topology equilibrium analysis");
  std::string ne_topology = "star", ne_graph, ne_mode = "enumerate";
  int ne_n = 4, ne_max_n = 10;
  double ne_a = 1.0, ne_b = 1.0, ne_l = 1.0, ne_s = 1.0;
  ne_cmd->add_option("--topology", ne_topology, "star|path|circle|complete|file");
  ne_cmd->add_option("--graph", ne_graph, "graph JSON file (with --topology file)");
  ne_cmd->add_option("--n", ne_n, "topology size");
  ne_cmd->add_option("--a", ne_a, "own-traffic fee constant a");
  ne_cmd->add_option("--b", ne_b, "routed-traffic revenue constant b");
  ne_cmd->add_option("--l", ne_l, "per-edge cost l");
  ne_cmd->add_option("--s", ne_s, "bias exponent s");
  ne_cmd->add_option("--mode", ne_mode, "enumerate|star-conditions|diameter-bound");
  ne_cmd->add_option("--max-n", ne_max_n, "enumeration size guard");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  const int threads = detail::resolve_threads(threads_flag);
  try {
    if (*gen) {
      const PcnGraph g = make_topology(detail::parse_topology(gen_topology),
                                       gen_n, gen_seed, gen_edge_prob);
      PcnGraph with_attrs;
      for (const auto& ni : g.nodes()) {
        with_attrs.add_node(ni.id, gen_n_tx, gen_zipf_s);
      }
      for (const auto& c : g.channels()) {
        with_attrs.add_channel(g.node(c.a).id, g.node(c.b).id, c.bal_a, c.bal_b);
      }
      out << save_graph(with_attrs) << "\n";
      return 0;
    }

    if (*rates_cmd) {
      PcnGraph g = load_graph(rates_graph);
      GlobalParams params =
          rates_config.empty() ? GlobalParams{} : load_config(rates_config);
      if (rates_tx_size < 0) throw ValidationError("--tx-size must be >= 0");
      if (rates_tx_size > 0) g = reduced_subgraph(g, coin_from_double(rates_tx_size));
      const TransProbMatrix probs = trans_prob_matrix(g);
      const EdgeRateTable table = edge_rates(g, probs, params.total_tx_rate);
      if (rates_out == "csv") {
        out << "from,to,p_e,lambda_e\n";
        for (const auto& e : table.edges) {
          out << e.from << "," << e.to << ","
              << format_double(e.p_e) << "," << format_double(e.lambda) << "\n";
        }
      } else if (rates_out == "json") {
        out << "{\"total_rate\":" << format_double(table.total_rate)
            << ",\"edges\":[";
        for (std::size_t i = 0; i < table.edges.size(); ++i) {
          const auto& e = table.edges[i];
          if (i) out << ",";
          out << "{\"from\":" << json_escape(e.from)
              << ",\"to\":" << json_escape(e.to)
              << ",\"p_e\":" << format_double(e.p_e)
              << ",\"lambda_e\":" << format_double(e.lambda) << "}";
        }
        out << "]}\n";
      } else {
        throw ValidationError("--out must be json or csv");
      }
      return 0;
    }

    if (*eval_cmd) {
      const PcnGraph g = load_graph(eval_graph);
      GlobalParams params =
          eval_config.empty() ? GlobalParams{} : load_config(eval_config);
      params.joiner_n_tx = eval_joiner_ntx;
      params.joiner_s = eval_joiner_s;
      if (eval_joiner_ntx < 0 || eval_joiner_s < 0) {
        throw ValidationError("joiner attributes must be >= 0");
      }
      Strategy s;
      for (const auto& text : eval_actions) {
        s.actions.push_back(detail::parse_action(text));
      }
      std::optional<Coin> budget;
      if (eval_budget >= 0) budget = coin_from_double(eval_budget);
      const UtilityBreakdown b =
          utility(g, eval_joiner, s, params, nullptr, budget);
      out << "{\"revenue\":" << format_double(b.revenue)
          << ",\"fees\":" << format_double(b.fees)
          << ",\"channel_cost\":" << format_double(b.channel_cost)
          << ",\"total\":" << format_double(b.total) << "}\n";
      return 0;
    }

    if (*attach_cmd) {
      AttachProblem problem;
      problem.graph = load_graph(at_graph);
      problem.params =
          at_config.empty() ? GlobalParams{} : load_config(at_config);
      problem.joiner = at_joiner;
      if (at_joiner_ntx < 0 || at_joiner_s < 0) {
        throw ValidationError("joiner attributes must be >= 0");
      }
      problem.params.joiner_n_tx = at_joiner_ntx;
      problem.params.joiner_s = at_joiner_s;
      if (at_budget <= 0) throw ValidationError("--budget must be > 0");
      problem.budget = coin_from_double(at_budget);
      for (const auto& id : at_candidates) problem.candidates.push_back(id);
      problem.threads = threads;

      OptResult res;
      if (at_algo == "greedy") {
        res = greedy_fixed(problem, coin_from_double(at_lock));
      } else if (at_algo == "discrete") {
        res = exhaustive_discrete(problem, coin_from_double(at_unit));
      } else if (at_algo == "continuous") {
        res = continuous_local_search(problem, at_eps);
      } else if (at_algo == "brute") {
        std::vector<Action> space;
        for (const auto& id : pcn::detail::resolved_candidates(problem)) {
          space.push_back(Action{id, coin_from_double(at_lock)});
        }
        res = brute_force_oracle(problem, space, Objective::simplified);
      } else {
        throw ValidationError("--algo must be greedy|discrete|continuous|brute");
      }

      if (at_out == "json") {
        out << "{\"algorithm\":" << json_escape(at_algo)
            << ",\"strategy\":" << detail::strategy_json(res.strategy)
            << ",\"objective_kind\":" << json_escape(objective_name(res.kind))
            << ",\"objective_value\":" << format_double(res.objective)
            << ",\"evaluations\":" << res.evaluations << "}\n";
      } else if (at_out == "csv") {
        out << "peer,lock\n";
        for (const auto& a : res.strategy.actions) {
          out << a.peer << "," << format_double(coin_to_double(a.lock)) << "\n";
        }
      } else {
        throw ValidationError("--out must be json or csv");
      }
      return 0;
    }

    if (*ne_cmd) {
      GameParams gp;
      gp.a = ne_a;
      gp.b = ne_b;
      gp.l = ne_l;
      gp.s = ne_s;
      gp.n = ne_n;
      if (ne_a < 0 || ne_b < 0 || ne_l < 0 || ne_s < 0) {
        throw ValidationError("game parameters must be >= 0");
      }

      if (ne_mode == "star-conditions") {
        const StarConditions c = star_ne_conditions(gp);
        out << "{\"conditions\":{\"c1\":" << (c.c1 ? "true" : "false")
            << ",\"c2\":" << (c.c2 ? "true" : "false")
            << ",\"c3\":" << (c.c3 ? "true" : "false")
            << ",\"slacks\":[" << format_double(c.slack1) << ","
            << format_double(c.slack2) << "," << format_double(c.slack3)
            << "]},\"holds\":" << (c.holds ? "true" : "false") << "}\n";
        return 0;
      }

      PcnGraph g;
      if (ne_topology == "file") {
        if (ne_graph.empty()) throw ValidationError("--graph required with file");
        g = load_graph(ne_graph);
      } else {
        g = make_topology(detail::parse_topology(ne_topology), ne_n);
      }

      if (ne_mode == "enumerate") {
        const NashReport rep = is_nash_equilibrium(g, gp, ne_max_n, threads);
        out << "{\"is_ne\":" << (rep.is_ne ? "true" : "false")
            << ",\"deviations\":[";
        bool first = true;
        for (const auto& d : rep.deviations) {
          if (!d.is_profitable) continue;
          if (!first) out << ",";
          first = false;
          out << "{\"node\":" << json_escape(d.node)
              << ",\"gain\":" << format_double(d.utility_gain)
              << ",\"best_response\":[";
          for (std::size_t i = 0; i < d.best_response.size(); ++i) {
            if (i) out << ",";
            out << json_escape(d.best_response[i]);
          }
          out << "]}";
        }
        out << "]}\n";
        return 0;
      }

      if (ne_mode == "diameter-bound") {
        const HubPathCheck c = hub_diameter_check(g, gp);
        out << "{\"applicable\":" << (c.applicable ? "true" : "false")
            << ",\"d\":" << c.d << ",\"bound\":" << format_double(c.bound)
            << ",\"lambda_e\":" << format_double(c.lambda_e)
            << ",\"p_min\":" << format_double(c.p_min)
            << ",\"holds\":" << (c.holds ? "true" : "false") << "}\n";
        return 0;
      }
      throw ValidationError("--mode must be enumerate|star-conditions|diameter-bound");
    }
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

inline int run_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args), out, err);
}

}  // namespace pcn::cli
