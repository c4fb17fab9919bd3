#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pcn/cli.hpp"
#include "pcn/io.hpp"

using namespace pcn;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "pcn_test_" + std::to_string(counter++) + ".json";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

int run_cli(const std::vector<std::string>& args, std::string* stdout_text,
            std::string* stderr_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (stdout_text) *stdout_text = out.str();
  if (stderr_text) *stderr_text = err.str();
  return code;
}

const char* kGraphJson = R"({
  "nodes":[{"id":"A","n_tx":9.0,"zipf_s":1.0},{"id":"B","n_tx":1.0,"zipf_s":1.0},
           {"id":"C","n_tx":1.0,"zipf_s":1.0}],
  "channels":[{"a":"A","b":"B","bal_a":5.0,"bal_b":3.0},
              {"a":"B","b":"C","bal_a":4.0,"bal_b":4.0}]
})";

}  // namespace

TEST_CASE("graph json round trip", "[io]") {
  TempFile file(kGraphJson);
  const PcnGraph g = load_graph(file.path);
  CHECK(g.node_count() == 3);
  CHECK(g.channel_count() == 2);
  CHECK(g.node(g.index_of("A")).n_tx == 9.0);
  CHECK(g.channels()[0].bal_a == coins(5));

  TempFile again(save_graph(g));
  const PcnGraph g2 = load_graph(again.path);
  CHECK(save_graph(g2) == save_graph(g));
}

TEST_CASE("graph loader reports the offending field", "[io]") {
  TempFile bad(R"({"nodes":[{"id":"A"},{"id":"B"}],
                   "channels":[{"a":"A","b":"B","bal_a":-1.0,"bal_b":0.0}]})");
  try {
    load_graph(bad.path);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("channels[0].bal_a") != std::string::npos);
  }

  TempFile dup(R"({"nodes":[{"id":"A"},{"id":"A"}]})");
  CHECK_THROWS_AS(load_graph(dup.path), ValidationError);

  TempFile selfloop(R"({"nodes":[{"id":"A"}],
                        "channels":[{"a":"A","b":"A","bal_a":1.0,"bal_b":1.0}]})");
  CHECK_THROWS_AS(load_graph(selfloop.path), ValidationError);

  TempFile syntax("{nodes:");
  CHECK_THROWS_AS(load_graph(syntax.path), ValidationError);
}

TEST_CASE("config parsing with defaults and rejection of unknown keys",
          "[io]") {
  TempFile cfg(R"({"f_avg":2.0,"f_avg_T":0.5,"C":1.5,"r":0.01,"T":3.0,
                   "fee_hops":"intermediaries","peer_lock_mode":"symmetric"})");
  const GlobalParams p = load_config(cfg.path);
  CHECK(p.f_avg == 2.0);
  CHECK(p.f_avg_t == 0.5);
  CHECK(p.onchain_cost == coin_from_double(1.5));
  CHECK(p.opportunity_rate == 0.01);
  CHECK(p.max_tx_size == coins(3));
  CHECK(p.fee_hops == FeeHops::intermediaries);
  CHECK(p.peer_lock == PeerLock::symmetric);

  TempFile unknown(R"({"f_avg":1.0,"nope":3})");
  CHECK_THROWS_AS(load_config(unknown.path), ValidationError);

  TempFile badmode(R"({"fee_hops":"sometimes"})");
  CHECK_THROWS_AS(load_config(badmode.path), ValidationError);
}

TEST_CASE("gen output is accepted by the other subcommands", "[cli]") {
  std::string graph_json;
  REQUIRE(run_cli({"gen", "--topology", "star", "--n", "4"}, &graph_json) == 0);
  CHECK(graph_json.find("\"nodes\"") != std::string::npos);

  TempFile file(graph_json);
  std::string rates_csv;
  REQUIRE(run_cli({"rates", "--graph", file.path}, &rates_csv) == 0);
  CHECK(rates_csv.rfind("from,to,p_e,lambda_e", 0) == 0);
  // a 4-leaf star has 8 directed edges
  CHECK(std::count(rates_csv.begin(), rates_csv.end(), '\n') == 9);

  std::string eval_json;
  REQUIRE(run_cli({"eval", "--graph", file.path, "--action", "0:2.5",
                   "--action", "1:1.0"},
                  &eval_json) == 0);
  CHECK(eval_json.find("\"revenue\"") != std::string::npos);
  CHECK(eval_json.find("\"total\"") != std::string::npos);

  std::string attach_json;
  REQUIRE(run_cli({"attach", "--graph", file.path, "--budget", "6", "--algo",
                   "greedy", "--lock", "1.0"},
                  &attach_json) == 0);
  CHECK(attach_json.find("\"objective_kind\":\"U'\"") != std::string::npos);
}

TEST_CASE("eval reports minus infinity for the empty strategy", "[cli]") {
  std::string graph_json;
  REQUIRE(run_cli({"gen", "--topology", "path", "--n", "3"}, &graph_json) == 0);
  TempFile file(graph_json);
  std::string eval_json;
  REQUIRE(run_cli({"eval", "--graph", file.path}, &eval_json) == 0);
  CHECK(eval_json.find("\"total\":\"-inf\"") != std::string::npos);
}

TEST_CASE("ne-check subcommand modes", "[cli]") {
  std::string json;
  REQUIRE(run_cli({"ne-check", "--topology", "path", "--n", "5", "--a", "1",
                   "--b", "0.5", "--l", "0.1", "--s", "1"},
                  &json) == 0);
  CHECK(json.find("\"is_ne\":false") != std::string::npos);

  REQUIRE(run_cli({"ne-check", "--topology", "star", "--n", "5", "--a", "0",
                   "--b", "0", "--l", "0.5", "--s", "1", "--mode",
                   "star-conditions"},
                  &json) == 0);
  CHECK(json.find("\"holds\":true") != std::string::npos);

  REQUIRE(run_cli({"ne-check", "--topology", "star", "--n", "4", "--a", "0.8",
                   "--b", "0.8", "--l", "1", "--s", "30", "--mode",
                   "diameter-bound"},
                  &json) == 0);
  CHECK(json.find("\"applicable\":true") != std::string::npos);
  CHECK(json.find("\"holds\":true") != std::string::npos);
}

TEST_CASE("cli exit codes distinguish validation from guards", "[cli]") {
  std::string out, err;
  CHECK(run_cli({"bogus"}, &out, &err) == 1);
  CHECK(run_cli({"attach", "--graph", "missing.json", "--budget", "5"}, &out,
                &err) == 1);
  CHECK(err.find("missing.json") != std::string::npos);

  std::string graph_json;
  REQUIRE(run_cli({"gen", "--topology", "complete", "--n", "5"}, &graph_json) == 0);
  TempFile file(graph_json);
  // giant division space under a small unit
  CHECK(run_cli({"attach", "--graph", file.path, "--budget", "200", "--algo",
                 "discrete", "--unit", "0.001"},
                &out, &err) == 2);
}

TEST_CASE("thread cap does not change results", "[cli]") {
  std::string graph_json;
  REQUIRE(run_cli({"gen", "--topology", "complete", "--n", "5"}, &graph_json) == 0);
  TempFile file(graph_json);
  const std::vector<std::string> base{"attach", "--graph", file.path,
                                      "--budget", "8",      "--algo",
                                      "greedy",   "--lock",  "1.5"};
  std::string serial, flagged, via_env;
  REQUIRE(run_cli(base, &serial) == 0);
  std::vector<std::string> with_flag{"--threads", "4"};
  with_flag.insert(with_flag.end(), base.begin(), base.end());
  REQUIRE(run_cli(with_flag, &flagged) == 0);
  setenv("PCN_ATTACH_THREADS", "3", 1);
  REQUIRE(run_cli(base, &via_env) == 0);
  unsetenv("PCN_ATTACH_THREADS");
  CHECK(serial == flagged);
  CHECK(serial == via_env);
}

TEST_CASE("cli output is deterministic", "[cli]") {
  std::string a, b;
  REQUIRE(run_cli({"gen", "--topology", "random", "--n", "6", "--seed", "3",
                   "--edge-prob", "0.6"},
                  &a) == 0);
  REQUIRE(run_cli({"gen", "--topology", "random", "--n", "6", "--seed", "3",
                   "--edge-prob", "0.6"},
                  &b) == 0);
  CHECK(a == b);
}
