#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlbox/box.hpp"
#include "nlbox/graphgame.hpp"
#include "nlbox/optimizer.hpp"
#include "nlbox/wiring.hpp"

namespace nlb::io {

using nlohmann::json;

// 12 significant digits, the CSV convention.
std::string fmt12(double v);
// Fixed 4 decimals for aligned tables; negative zero prints as 0.0000.
std::string fmt4(double v);

json box_to_json(const Box& b);
Box box_from_json(const json& j);
// Rows xy = 00,01,10,11; columns ab = 00,01,10,11.
std::string box_to_csv(const Box& b);

json wiring_to_json(const Wiring& w);
Wiring wiring_from_json(const json& j);
// One line per coordinate: "index,label".
std::string wiring_layout();

// A box expression: a name ("PR", "SR", "PL0101", ...), a mixture such as
// "0.39*PR+0.6*SR+0.01*I", or a JSON object {"p": [...]}.
Box parse_box_expr(const std::string& s);
Wiring parse_wiring_expr(const std::string& s);

// "0.25 PR - 0.125 P00 - 0.125 P11 + 1 I", dropping zero coefficients.
std::string linear_combination(const std::vector<double>& coef, const std::vector<std::string>& names);

struct OrbitRow {
    int k;
    Box box;
};
std::string orbit_csv(const std::vector<OrbitRow>& rows);

std::string scan_csv(const std::vector<opt::ScanPoint>& points);
std::string scan_svg(const std::vector<opt::ScanPoint>& points, const std::vector<std::string>& basis_names);

// DescentConfig fields from a flat JSON object; unknown keys are rejected.
opt::DescentConfig descent_config_from_json(const json& j, opt::DescentConfig base = {});

// Edge-list text ("u v" per line, '#' comments) or adjacency-matrix CSV.
graph::Graph parse_edge_list(std::istream& in);
graph::Graph parse_adjacency_csv(std::istream& in);
// Built-in names: C<n>, K<n>, P<n>, petersen, and A+B for disjoint unions.
graph::Graph parse_graph_expr(const std::string& s);

// Nonzero entries as rows (x_A, x_B, y_A, y_B, prob).
std::string strategy_csv(const graph::NSStrategy& s);

}  // namespace nlb::io
