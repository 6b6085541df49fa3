#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "example.hpp"
#include "polyskel/cli.hpp"

using namespace testing;

namespace {

const std::string kExample = std::string(POLYSKEL_DATA_DIR) + "/example_game.json";

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / ("polyskel_test_" + name);
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("game files") {
  auto g = parse_game(kExample);
  CHECK(g.kind() == GameKind::polymatrix);
  CHECK(g.payoff() == example_payoff());

  auto rps = parse_game_json(json::parse(R"({"payoff": [[0,-1,1],[1,0,-1],[-1,1,0]]})"));
  CHECK(rps.kind() == GameKind::replicator);
  auto rps2 = parse_game_json(json::parse(R"({"groups": [3], "payoff": [[0,"-1",1],[1,0,-1],["-1/1",1,0]]})"));
  CHECK(rps2.kind() == GameKind::replicator);
  CHECK(rps2.payoff() == rps.payoff());

  auto half = parse_game_json(json::parse(R"({"groups": [2], "payoff": [["1/2",0],[0,"-3/4"]]})"));
  CHECK(half.payoff()(0, 0) == q(1, 2));
  CHECK(half.payoff()(1, 1) == q(-3, 4));

  CHECK_THROWS_AS(parse_game_json(json::parse(R"({"groups": [2], "payoff": [[0,1,2],[1,0,2],[1,1,1]]})")),
                  ValidationError);
  CHECK_THROWS_AS(parse_game_json(json::parse(R"({"groups": [2], "payoff": [[0,1],[1]]})")), ValidationError);
  CHECK_THROWS_AS(parse_game_json(json::parse(R"({"groups": [2]})")), ValidationError);
  CHECK_THROWS_AS(parse_game_json(json::parse(R"({"groups": [0,2], "payoff": [[0,1],[1,0]]})")), ValidationError);
  CHECK_THROWS_AS(parse_game_json(json::parse(R"({"payoff": [["x",1],[1,0]]})")), ValidationError);
  CHECK_THROWS_AS(parse_game("/nonexistent/game.json"), ValidationError);
}

TEST_CASE("edge and number lists") {
  Example ex;
  CHECK(parse_edge_list(ex.poly, "g8, g5,γ5") == std::vector<EdgeId>{kG5, kG8});
  CHECK_THROWS_AS(parse_edge_list(ex.poly, "g5,g13"), ValidationError);
  CHECK(parse_double_list("0.5, 0.3,0.1") == std::vector<double>{0.5, 0.3, 0.1});
  CHECK_THROWS_AS(parse_double_list("0.5,abc"), ValidationError);
  CHECK_THROWS_AS(parse_double_list("0.5x"), ValidationError);
}

TEST_CASE("skeleton subcommand") {
  auto r = run({"skeleton", kExample});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("v1") != std::string::npos);
  CHECK(r.out.find("-84") != std::string::npos);
  auto j = run({"skeleton", kExample, "--format", "json"});
  REQUIRE(j.code == kExitOk);
  auto doc = json::parse(j.out);
  CHECK(doc["schema"] == kSchemaId);
  CHECK(doc["command"] == "skeleton");
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == kExitValidation);
  CHECK(run({"frobnicate", kExample}).code == kExitValidation);
  CHECK(run({"skeleton", "/nonexistent.json"}).code == kExitValidation);
  CHECK(run({"skeleton", kExample, "--format", "yaml"}).code == kExitValidation);
  CHECK(run({"poincare", kExample, "--structural-set", "g1"}).code == kExitValidation);
  CHECK(run({"verify", kExample, "--branch", "xi99"}).code == kExitValidation);
  CHECK(run({"verify", kExample, "--eps", "0.1,0.2"}).code == kExitValidation);
  CHECK(run({"--help"}).code == kExitOk);

  // All characters vanish: no skeleton graph.
  auto zero = write_temp("zero.json", R"({"groups": [2,2], "payoff": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]})");
  auto z = run({"poincare", zero});
  CHECK(z.code == kExitHypothesis);
  CHECK(z.err.find("hypothesis") != std::string::npos);
  // A dominated strategy gives an acyclic graph.
  auto dom = write_temp("dom.json", R"({"payoff": [[1,1],[0,0]]})");
  CHECK(run({"poincare", dom}).code == kExitHypothesis);
  auto ds = run({"structural-sets", dom});
  CHECK(ds.code == kExitOk);
  CHECK(ds.out.find("acyclic") != std::string::npos);
  std::remove(zero.c_str());
  std::remove(dom.c_str());
}

TEST_CASE("structural set choice") {
  auto d = run({"poincare", kExample, "--format", "json"});
  REQUIRE(d.code == kExitOk);
  auto doc = json::parse(d.out);
  CHECK(doc["poincare"]["structural_set"] == json::array({"g5", "g6"}));
  auto s = run({"poincare", kExample, "--structural-set", "g5,g8", "--format", "json"});
  REQUIRE(s.code == kExitOk);
  auto branches = json::parse(s.out)["poincare"]["branches"];
  CHECK(branches.size() == 6);
}

TEST_CASE("rationals survive the JSON report") {
  Example ex;
  auto r = run({"poincare", kExample, "--structural-set", "g5,g8", "--format", "json"});
  REQUIRE(r.code == kExitOk);
  auto doc = json::parse(r.out);
  for (std::size_t k = 0; k < ex.plm.branches().size(); ++k) {
    const auto& b = ex.plm.branches()[k];
    const auto& m = doc.at("poincare").at("branches").at(k).at("full_matrix");
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) CHECK(rational_from_json(m.at(i).at(j)) == b.matrix(i, j));
  }
  CHECK(rational_json(q(-1343, 3626)) == "-1343/3626");
  CHECK(rational_from_json(json("-1343/3626")) == q(-1343, 3626));
  CHECK(rational_from_json(json(7)) == q(7, 1));
}

TEST_CASE("seeded verification is reproducible") {
  std::vector<std::string> args{"verify", kExample, "--structural-set", "g5,g8", "--branch", "xi3",
                                "--eps",  "0.5,0.3", "--samples",        "3",     "--seed",   "5"};
  auto a = run(args);
  auto b = run(args);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("eps,sample,error,status", 0) == 0);
  args.push_back("--serial");
  CHECK(run(args).out == a.out);
  args.back() = "--threads";
  args.push_back("2");
  CHECK(run(args).out == a.out);
}

TEST_CASE("simulate and analyze") {
  auto s = run({"simulate", kExample, "--x0", "0.3,0.7,0.6,0.4,0.2,0.8", "--t", "1", "--dt", "0.25"});
  REQUIRE(s.code == kExitOk);
  std::istringstream in(s.out);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 6);  // header, t = 0 and four samples
  CHECK(run({"simulate", kExample, "--x0", "0.3,0.7"}).code == kExitValidation);

  auto a = run({"analyze", kExample, "--structural-set", "g5,g8"});
  REQUIRE(a.code == kExitOk);
  auto doc = json::parse(a.out);
  for (const char* k : {"skeleton", "graph", "structural_sets", "poincare", "projective", "cycles", "equilibria"})
    CHECK(doc.contains(k));
}
