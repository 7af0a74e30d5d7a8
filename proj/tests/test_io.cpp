#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "nlbox/io.hpp"

using namespace nlb;
using namespace nlb::io;

TEST_SUITE("io") {

TEST_CASE("number formatting") {
    CHECK(fmt12(0.5) == "0.5");
    CHECK(fmt12(1.0 / 3) == "0.333333333333");
    CHECK(fmt4(-0.0) == "0.0000");
    CHECK(fmt4(-1e-9) == "0.0000");
    CHECK(fmt4(0.75) == "0.7500");
}

TEST_CASE("json round trip is exact") {
    for (int i = 0; i < 50; ++i) {
        const Box b = random_ns_box(21, i);
        CHECK(box_from_json(json::parse(box_to_json(b).dump())) == b);
        const Wiring w = testutil::random_wiring(22, i);
        CHECK(wiring_from_json(json::parse(wiring_to_json(w).dump())) == w);
    }
    CHECK_THROWS_AS(box_from_json(json::parse(R"({"p":[1,2]})")), Error);
    CHECK_THROWS_AS(wiring_from_json(json::parse("[0,1]")), Error);
}

TEST_CASE("box csv") {
    const std::string s = box_to_csv(make_pr());
    std::istringstream in(s);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines >= 4);
    CHECK(s.find("0.5") != std::string::npos);
}

TEST_CASE("box expressions") {
    CHECK(parse_box_expr("PR") == make_pr());
    CHECK(parse_box_expr(" I ") == make_uniform());
    const Box m = parse_box_expr("0.39*PR+0.6*SR+0.01*I");
    CHECK(max_abs_diff(m, 0.39 * make_pr() + 0.6 * make_sr() + 0.01 * make_uniform()) <= 1e-15);
    const Box r = random_ns_box(3, 3);
    CHECK(parse_box_expr(box_to_json(r).dump()) == r);
    CHECK_THROWS_AS(parse_box_expr("QQ"), Error);
    CHECK_THROWS_AS(parse_box_expr("x*PR"), Error);
    CHECK_THROWS_AS(parse_box_expr("0.7*PR+0.7*SR"), Error);
}

TEST_CASE("wiring expressions") {
    CHECK(parse_wiring_expr("W_BS") == named_wiring(WiringName::BS));
    const Wiring w = testutil::random_wiring(4, 4);
    CHECK(parse_wiring_expr(wiring_to_json(w).dump()) == w);
    CHECK_THROWS_AS(parse_wiring_expr("W_NOPE"), Error);
    CHECK(wiring_layout().find("f3(x=1,a1=1,a2=1)") != std::string::npos);
}

TEST_CASE("linear combination text") {
    CHECK(linear_combination({0.25, -0.125, 0, 1}, {"PR", "P00", "SR", "I"}) == "0.25 PR - 0.125 P00 + 1 I");
    CHECK(linear_combination({-1, 0}, {"PR", "I"}) == "-1 PR");
    CHECK(linear_combination({0, 0}, {"PR", "I"}) == "0");
}

TEST_CASE("csv headers") {
    CHECK(scan_csv({}) == "c1,c2,label,witness_kind,witness_value\n");
    CHECK(orbit_csv({{1, make_pr()}}).rfind("k,chsh_prime,chsh,c1,c2,c3\n1,", 0) == 0);
    const std::string svg = scan_svg({opt::ScanPoint{0, 0, 1, 0, 0, "collapsing", "chsh", 1}}, {"PR", "SR", "I"});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("collapsing") != std::string::npos);
}

TEST_CASE("config json") {
    const auto c = descent_config_from_json(json::parse(R"({"chi":0.05,"replicas":20,"seed":9})"));
    CHECK(c.chi == 0.05);
    CHECK(c.replicas == 20);
    CHECK(c.seed == 9);
    CHECK(c.k_reset == opt::DescentConfig{}.k_reset);
    CHECK_THROWS_AS(descent_config_from_json(json::parse(R"({"learnig_rate":0.1})")), Error);
    CHECK_THROWS_AS(descent_config_from_json(json::parse(R"({"chi":0.5,"replicas":1})")), Error);
    CHECK_THROWS_AS(descent_config_from_json(json::parse("[1]")), Error);
}

TEST_CASE("graph inputs") {
    std::istringstream el("# a square plus an isolated vertex\nn 5\n0 1\n1 2\n2 3\n3 0\n");
    const auto g = parse_edge_list(el);
    CHECK(g.n == 5);
    CHECK(g.edge_count() == 4);
    CHECK(g.degree(4) == 0);
    std::istringstream bad("0 x\n");
    CHECK_THROWS_AS(parse_edge_list(bad), Error);

    std::istringstream csv("0,1,1\n1,0,1\n1,1,0\n");
    CHECK(parse_adjacency_csv(csv).adj == graph::complete(3).adj);
    std::istringstream loop("1,0\n0,0\n");
    CHECK_THROWS_AS(parse_adjacency_csv(loop), Error);

    CHECK(parse_graph_expr("C6").adj == graph::cycle(6).adj);
    CHECK(parse_graph_expr("C3+C3").adj == graph::disjoint_union(graph::cycle(3), graph::cycle(3)).adj);
    CHECK(parse_graph_expr("petersen").edge_count() == 15);
    CHECK(parse_graph_expr("K4").edge_count() == 6);
    CHECK(parse_graph_expr("P4").edge_count() == 3);
    CHECK_THROWS_AS(parse_graph_expr("C2"), Error);
    CHECK_THROWS_AS(parse_graph_expr("Q5"), Error);
}

TEST_CASE("strategy csv lists nonzero entries") {
    graph::NSStrategy s(2, 2);
    s(0, 1, 1, 0) = 0.5;
    s(1, 0, 1, 0) = 0.5;
    CHECK(strategy_csv(s) == "x_A,x_B,y_A,y_B,prob\n1,0,0,1,0.5\n1,0,1,0,0.5\n");
}

}
