#include <catch2/catch_amalgamated.hpp>

#include "pcn/graph.hpp"
#include "support/oracles.hpp"

using namespace pcn;

namespace {

PcnGraph two_nodes() {
  PcnGraph g;
  g.add_node("A");
  g.add_node("B");
  return g;
}

}  // namespace

TEST_CASE("add_channel creates two directed edges", "[graph]") {
  const PcnGraph g0 = two_nodes();
  const PcnGraph g = add_channel(g0, "A", "B", coins(5), coins(3));
  REQUIRE(g.channel_count() == 1);
  REQUIRE(g.directed_edge_count() == 2);
  const Channel& c = g.channels()[0];
  CHECK(g.node(c.a).id == "A");
  CHECK(c.bal_a == coins(5));
  CHECK(c.bal_b == coins(3));
  // input untouched
  CHECK(g0.channel_count() == 0);
}

TEST_CASE("parallel channels are kept as distinct edges", "[graph]") {
  PcnGraph g = two_nodes();
  g.add_channel("A", "B", coins(5), coins(3));
  g.add_channel("A", "B", coins(1), coins(1));
  CHECK(g.channel_count() == 2);
  CHECK(g.directed_edge_count() == 4);
}

TEST_CASE("add_channel rejects bad input", "[graph]") {
  PcnGraph g = two_nodes();
  CHECK_THROWS_AS(g.add_channel("A", "A", coins(1), coins(1)), SelfLoopError);
  CHECK_THROWS_AS(g.add_channel("A", "Z", coins(1), coins(1)), UnknownNodeError);
  CHECK_THROWS_AS(g.add_channel("A", "B", -1, coins(1)), NegativeBalanceError);
}

TEST_CASE("reduced_subgraph drops underfunded directions", "[graph]") {
  PcnGraph g = two_nodes();
  g.add_channel("A", "B", coins(5), coins(3));

  const PcnGraph r4 = reduced_subgraph(g, coins(4));
  CHECK(r4.channels()[0].ab_live);
  CHECK_FALSE(r4.channels()[0].ba_live);
  CHECK(r4.node_count() == 2);

  const PcnGraph r0 = reduced_subgraph(g, 0);
  CHECK(r0.directed_edge_count() == 2);

  // a payment larger than the funded side cannot cross
  const PcnGraph r6 = reduced_subgraph(g, coins(6));
  CHECK(r6.directed_edge_count() == 0);
}

TEST_CASE("reduced_subgraph is monotone in tx_size", "[graph]") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 50; ++iter) {
    const PcnGraph g = test::random_graph(rng, 6, 0.5);
    const PcnGraph small = reduced_subgraph(g, coins(3));
    const PcnGraph large = reduced_subgraph(g, coins(7));
    for (ChannelIndex ci = 0; ci < g.channel_count(); ++ci) {
      if (large.channels()[ci].ab_live) CHECK(small.channels()[ci].ab_live);
      if (large.channels()[ci].ba_live) CHECK(small.channels()[ci].ba_live);
    }
  }
}

TEST_CASE("path stats on a directed path", "[graph]") {
  PcnGraph g;
  g.add_node("A");
  g.add_node("B");
  g.add_node("C");
  auto c1 = g.add_channel("A", "B", coins(1), 0);
  auto c2 = g.add_channel("B", "C", coins(1), 0);
  g.mutable_channels()[c1].ba_live = false;
  g.mutable_channels()[c2].ba_live = false;

  const PathStatsMap stats = all_pairs_path_stats(g);
  const PathStats& ac = stats.at({"A", "C"});
  CHECK(ac.distance == 2);
  CHECK(ac.path_count == 1);
  CHECK(ac.per_edge_counts.at(EdgeRef{"A", "B", c1}) == 1);
  CHECK(ac.per_edge_counts.at(EdgeRef{"B", "C", c2}) == 1);

  const PathStats& ca = stats.at({"C", "A"});
  CHECK_FALSE(ca.connected());
  CHECK(ca.path_count == 0);
  CHECK(ca.per_edge_counts.empty());
}

TEST_CASE("path stats on a bidirectional 4-cycle", "[graph]") {
  PcnGraph g;
  for (const char* id : {"A", "B", "C", "D"}) g.add_node(id);
  g.add_channel("A", "B", coins(1), coins(1));
  g.add_channel("B", "C", coins(1), coins(1));
  g.add_channel("C", "D", coins(1), coins(1));
  g.add_channel("D", "A", coins(1), coins(1));

  const PathStatsMap stats = all_pairs_path_stats(g);
  const PathStats& ac = stats.at({"A", "C"});
  CHECK(ac.distance == 2);
  CHECK(ac.path_count == 2);  // via B and via D
  for (const auto& [edge, count] : ac.per_edge_counts) CHECK(count == 1);
  CHECK(ac.per_edge_counts.size() == 4);
}

TEST_CASE("per-edge counts sum to count times distance", "[graph]") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 60; ++iter) {
    const PcnGraph g = test::random_graph(rng, 7, 0.4);
    for (const auto& [pair, st] : all_pairs_path_stats(g)) {
      if (!st.connected()) continue;
      std::uint64_t total = 0;
      for (const auto& [edge, count] : st.per_edge_counts) {
        CHECK(count <= st.path_count);
        total += count;
      }
      CHECK(total == st.path_count * static_cast<std::uint64_t>(st.distance));
    }
  }
}

TEST_CASE("path stats match naive enumeration", "[graph]") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 80; ++iter) {
    const PcnGraph g = test::random_graph(rng, 6, 0.45, 0.15, 0.3);
    const PathStatsMap stats = all_pairs_path_stats(g);
    for (const auto& ns : g.nodes()) {
      for (const auto& nr : g.nodes()) {
        if (ns.id == nr.id) continue;
        const test::NaivePairStats expect = test::naive_path_stats(g, ns.id, nr.id);
        const PathStats& got = stats.at({ns.id, nr.id});
        REQUIRE(got.distance == expect.distance);
        REQUIRE(got.path_count == expect.count);
        REQUIRE(got.per_edge_counts == expect.per_edge);
      }
    }
  }
}

TEST_CASE("parallel directed edges multiply path counts", "[graph]") {
  PcnGraph g;
  g.add_node("A");
  g.add_node("B");
  g.add_node("C");
  g.add_channel("A", "B", coins(1), coins(1));
  g.add_channel("A", "B", coins(1), coins(1));
  g.add_channel("B", "C", coins(1), coins(1));

  const PathStats& ac = all_pairs_path_stats(g).at({"A", "C"});
  CHECK(ac.distance == 2);
  CHECK(ac.path_count == 2);
  CHECK(ac.per_edge_counts.at(EdgeRef{"A", "B", 0}) == 1);
  CHECK(ac.per_edge_counts.at(EdgeRef{"A", "B", 1}) == 1);
  CHECK(ac.per_edge_counts.at(EdgeRef{"B", "C", 2}) == 2);
}
