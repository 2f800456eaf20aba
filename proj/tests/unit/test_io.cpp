#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ltmopt/error.hpp"
#include "ltmopt/io.hpp"

using namespace ltmopt;
namespace fs = std::filesystem;

namespace {

LoadedNetwork parse(const std::string& text, EdgeListOptions opt = {}) {
  std::istringstream in(text);
  return read_edge_list(in, "mem", opt);
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ltmopt_io_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("edge list parsing") {
  const auto net = parse("# header\n% other comment\n\na b\nb c 0.5 extra\nc a\n");
  CHECK(net.graph.node_count() == 3);
  CHECK(net.graph.edge_count() == 3);
  CHECK(net.labels == std::vector<std::string>{"a", "b", "c"});
  CHECK(net.graph.out_degree(0) == 1);
  CHECK(net.graph.in_degree(0) == 1);

  const auto und = parse("1 2\n2 3\n", {true, false});
  CHECK(und.graph.edge_count() == 4);
  CHECK(und.graph.out_degree(1) == 2);

  const auto multi = parse("x y\nx y\n");
  CHECK(multi.graph.edge_count() == 2);
  CHECK(multi.graph.out_degree(0) == 2);
}

TEST_CASE("edge list errors") {
  try {
    parse("a b\n# c\nc c\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  const auto dropped = parse("a b\nc c\nb a\n", {false, true});
  CHECK(dropped.dropped_self_loops == 1);
  CHECK(dropped.graph.edge_count() == 2);
  CHECK_THROWS_AS(parse("# nothing\n"), ParseError);
  CHECK_THROWS_AS(parse("lonely\n"), ParseError);
  CHECK_THROWS_AS(load_edge_list("/nonexistent/file.edges"), Error);
}

TEST_CASE("id map") {
  const auto net = parse("p q\nq r\n");
  std::ostringstream os;
  write_id_map(net, os);
  CHECK(os.str() == "id,label\n0,p\n1,q\n2,r\n");
}

TEST_CASE("threshold rules") {
  const auto net = parse("a b\na c\na d\nb c\n");
  CHECK(parse_threshold_rule("half-out-degree").kind == ThresholdRule::Kind::half_out_degree);
  CHECK(parse_threshold_rule("uniform-random").kind == ThresholdRule::Kind::uniform_random);
  CHECK(parse_threshold_rule("file:x.txt").path == "x.txt");
  CHECK_THROWS_AS(parse_threshold_rule("bogus"), InvalidArgument);

  const auto half = make_thresholds(net, parse_threshold_rule("half-out-degree"), 1);
  for (NodeId i = 0; i < net.graph.node_count(); ++i) {
    CHECK(half.rho.values[i] >= 0);
    CHECK(half.rho.values[i] <= net.graph.out_degree(i));
  }
  const auto u1 = make_thresholds(net, parse_threshold_rule("uniform-random"), 9);
  const auto u2 = make_thresholds(net, parse_threshold_rule("uniform-random"), 9);
  CHECK(u1.rho.values == u2.rho.values);
  for (NodeId i = 0; i < net.graph.node_count(); ++i) {
    CHECK(u1.rho.values[i] <= net.graph.out_degree(i));
  }

  const auto file = scratch("rho.txt");
  write_file(file, "# label threshold\na 2\nb 5\nc 0\nd 0\n");
  const auto rule = parse_threshold_rule("file:" + file.string());
  CHECK_THROWS_AS(make_thresholds(net, rule, 0), ParseError);
  const auto clamped = make_thresholds(net, rule, 0, true);
  CHECK(clamped.clamped == 1);
  CHECK(clamped.rho.values == std::vector<std::int32_t>{2, 1, 0, 0});

  write_file(file, "a 1\nb 1\n");
  CHECK_THROWS_AS(make_thresholds(net, rule, 0), Error);
}

TEST_CASE("cost rules") {
  CHECK(parse_cost_rule("linear")(3, 3, 2) == std::vector<double>{0, 1, 2});
  CHECK(parse_cost_rule("seeding")(3, 3, 2) == std::vector<double>{0, 2, 2});
  CHECK(parse_cost_rule("unit-seeding")(3, 3, 2) == std::vector<double>{0, 1, 1});
  CHECK_THROWS_AS(parse_cost_rule("quadratic"), InvalidArgument);

  const auto file = scratch("cost.txt");
  write_file(file, "# d k r costs\n2 2 1 0 0.5\n3 3 2 0 1 4\n");
  const auto rule = parse_cost_rule("file:" + file.string());
  CHECK(rule(3, 3, 2) == std::vector<double>{0, 1, 4});
  CHECK_THROWS(rule(4, 4, 1));
  write_file(file, "2 2 1 0\n");
  CHECK_THROWS(parse_cost_rule("file:" + file.string()));
}

TEST_CASE("JSON round trips keep 17 significant digits") {
  const double m1 = 1.0 / 3.0;
  const AgentType a{2, 2, 1, {0.0, 0.1}};
  const AgentType b{3, 4, 2, {0.0, 1.0 / 7.0, 2.0}};
  const auto p = make_statistics({{a, m1}, {b, 1.0 - m1}});
  const auto text = to_json(p).dump();
  const auto back = statistics_from_json(Json::parse(text));
  CHECK(back.types == p.types);
  CHECK(back.mass == p.mass);

  StatIntervention xi = null_intervention(p);
  const auto ib = *p.find(b);
  xi.xi[ib] = {0.1, 0.0, 1.0 - m1 - 0.1};
  const auto round = intervention_from_json(Json::parse(to_json(xi).dump()), p);
  CHECK(round.xi == xi.xi);

  Json stray = to_json(xi);
  stray.push_back(Json{{"d", 9}, {"k", 9}, {"r", 1}, {"cost", {0, 1}}, {"eta", 1}, {"mass", 0.0}});
  CHECK_THROWS_AS(intervention_from_json(stray, p), InfeasibleIntervention);

  const auto path = scratch("doc.json");
  write_json_file(path.string(), to_json(p));
  CHECK(statistics_from_json(read_json_file(path.string())).mass == p.mass);
}

TEST_CASE("CSV writers") {
  const auto p = make_statistics({{AgentType{2, 2, 1, {0, 1}}, 1.0}});
  std::ostringstream os;
  write_curve_csv(os, curve_table(p, 2));
  const auto text = os.str();
  CHECK(text.rfind("z,psi,phi,phi_minus_z\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);

  std::ostringstream tr;
  const double y[] = {0.0, 0.5};
  const double z[] = {0.0, 0.25};
  RecursionPath rec;
  rec.y = {0.0, 0.5, 0.6};
  rec.z = {0.0, 0.25, 0.3};
  write_trajectory_csv(tr, y, z, rec);
  const auto t = tr.str();
  CHECK(t.rfind("t,Y,Z,y_recursion,z_recursion\n", 0) == 0);
  CHECK(std::count(t.begin(), t.end(), '\n') == 4);
}
