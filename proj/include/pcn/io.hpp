#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pcn/graph.hpp"
#include "pcn/utility.hpp"

namespace pcn {

// Doubles are printed with 12 significant digits everywhere so outputs are
// reproducible across platforms. Infinities become the strings "inf"/"-inf".
inline std::string format_double(double x) {
  if (x == kPosInf) return "\"inf\"";
  if (x == kNegInf) return "\"-inf\"";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out = "\"";
  for (const char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  out += '"';
  return out;
}

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

inline std::string require_string(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw ValidationError(where + ": expected a string");
  return j.get<std::string>();
}

}  // namespace detail

// Graph file schema:
//   {"nodes":[{"id":"A","n_tx":9.0,"zipf_s":1.0},...],
//    "channels":[{"a":"A","b":"B","bal_a":5.0,"bal_b":3.0},...]}
inline PcnGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("graph: expected an object");
  if (!j.contains("nodes") || !j["nodes"].is_array()) {
    throw ValidationError("graph.nodes: expected an array");
  }
  PcnGraph g;
  std::size_t i = 0;
  for (const auto& nj : j["nodes"]) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (!nj.is_object()) throw ValidationError(where + ": expected an object");
    const std::string id = detail::require_string(nj.at("id"), where + ".id");
    const double n_tx = nj.contains("n_tx")
                            ? detail::require_number(nj["n_tx"], where + ".n_tx")
                            : 1.0;
    const double s = nj.contains("zipf_s")
                         ? detail::require_number(nj["zipf_s"], where + ".zipf_s")
                         : 0.0;
    if (n_tx < 0) throw ValidationError(where + ".n_tx: must be >= 0");
    if (s < 0) throw ValidationError(where + ".zipf_s: must be >= 0");
    g.add_node(id, n_tx, s);
    ++i;
  }
  i = 0;
  if (j.contains("channels")) {
    if (!j["channels"].is_array()) {
      throw ValidationError("graph.channels: expected an array");
    }
    for (const auto& cj : j["channels"]) {
      const std::string where = "channels[" + std::to_string(i) + "]";
      if (!cj.is_object()) throw ValidationError(where + ": expected an object");
      const std::string a = detail::require_string(cj.at("a"), where + ".a");
      const std::string b = detail::require_string(cj.at("b"), where + ".b");
      const double bal_a = detail::require_number(cj.at("bal_a"), where + ".bal_a");
      const double bal_b = detail::require_number(cj.at("bal_b"), where + ".bal_b");
      if (!g.has_node(a)) throw ValidationError(where + ".a: unknown node " + a);
      if (!g.has_node(b)) throw ValidationError(where + ".b: unknown node " + b);
      if (a == b) throw ValidationError(where + ": self-loop channel on " + a);
      if (bal_a < 0) throw ValidationError(where + ".bal_a: must be >= 0");
      if (bal_b < 0) throw ValidationError(where + ".bal_b: must be >= 0");
      g.add_channel(a, b, coin_from_double(bal_a), coin_from_double(bal_b));
      ++i;
    }
  }
  return g;
}

inline PcnGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("graph file " + path + ": " + e.what());
  }
  return graph_from_json(j);
}

inline std::string save_graph(const PcnGraph& g) {
  std::ostringstream out;
  out << "{\"nodes\":[";
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const NodeInfo& ni = g.node(i);
    if (i) out << ",";
    out << "{\"id\":" << json_escape(ni.id) << ",\"n_tx\":" << format_double(ni.n_tx)
        << ",\"zipf_s\":" << format_double(ni.zipf_s) << "}";
  }
  out << "],\"channels\":[";
  for (std::size_t i = 0; i < g.channel_count(); ++i) {
    const Channel& c = g.channels()[i];
    if (i) out << ",";
    out << "{\"a\":" << json_escape(g.node(c.a).id)
        << ",\"b\":" << json_escape(g.node(c.b).id)
        << ",\"bal_a\":" << format_double(coin_to_double(c.bal_a))
        << ",\"bal_b\":" << format_double(coin_to_double(c.bal_b)) << "}";
  }
  out << "]}";
  return out.str();
}

// Flat key/value config: f_avg, f_avg_T, C, r, T, N, fee_hops,
// peer_lock_mode, peer_lock_amount. Unknown keys are rejected.
inline GlobalParams config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config: expected an object");
  GlobalParams p;
  for (const auto& [key, value] : j.items()) {
    if (key == "f_avg") {
      p.f_avg = detail::require_number(value, key);
    } else if (key == "f_avg_T") {
      p.f_avg_t = detail::require_number(value, key);
    } else if (key == "C") {
      p.onchain_cost = coin_from_double(detail::require_number(value, key));
    } else if (key == "r") {
      p.opportunity_rate = detail::require_number(value, key);
    } else if (key == "T") {
      p.max_tx_size = coin_from_double(detail::require_number(value, key));
    } else if (key == "N") {
      p.total_tx_rate = detail::require_number(value, key);
    } else if (key == "fee_hops") {
      const std::string v = detail::require_string(value, key);
      if (v == "distance") {
        p.fee_hops = FeeHops::distance;
      } else if (v == "intermediaries") {
        p.fee_hops = FeeHops::intermediaries;
      } else {
        throw ValidationError("fee_hops: expected distance|intermediaries");
      }
    } else if (key == "peer_lock_mode") {
      const std::string v = detail::require_string(value, key);
      if (v == "zero") {
        p.peer_lock = PeerLock::zero;
      } else if (v == "symmetric") {
        p.peer_lock = PeerLock::symmetric;
      } else if (v == "fixed") {
        p.peer_lock = PeerLock::fixed;
      } else {
        throw ValidationError("peer_lock_mode: expected zero|symmetric|fixed");
      }
    } else if (key == "peer_lock_amount") {
      p.peer_lock_amount = coin_from_double(detail::require_number(value, key));
    } else {
      throw ValidationError("config: unknown key " + key);
    }
  }
  if (p.f_avg < 0 || p.f_avg_t < 0) throw ValidationError("fees must be >= 0");
  if (p.onchain_cost < 0) throw ValidationError("C: must be >= 0");
  if (p.opportunity_rate < 0) throw ValidationError("r: must be >= 0");
  if (p.max_tx_size < 0) throw ValidationError("T: must be >= 0");
  if (p.total_tx_rate && *p.total_tx_rate < 0) throw ValidationError("N: must be >= 0");
  if (p.peer_lock_amount < 0) throw ValidationError("peer_lock_amount: must be >= 0");
  return p;
}

inline GlobalParams load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace pcn
