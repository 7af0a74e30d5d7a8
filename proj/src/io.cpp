#include "nlbox/io.hpp"
#include "nlbox/orbit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

namespace nlb::io {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt4(double v) {
    char buf[40];
    if (std::abs(v) < 5e-5) v = 0.0;
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

json box_to_json(const Box& b) { return json{{"p", b.p}}; }

Box box_from_json(const json& j) {
    if (!j.is_object() || !j.contains("p") || !j["p"].is_array() || j["p"].size() != 16)
        throw Error(ErrorKind::InvalidArgument, "box JSON must be {\"p\": [16 numbers]}");
    Box b;
    for (int i = 0; i < 16; ++i) b.p[i] = j["p"][i].get<double>();
    return b;
}

std::string box_to_csv(const Box& b) {
    std::ostringstream os;
    os << "xy,ab=00,ab=01,ab=10,ab=11\n";
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            os << x << y;
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb) os << ',' << fmt12(b(a, bb, x, y));
            os << '\n';
        }
    return os.str();
}

json wiring_to_json(const Wiring& w) { return json(w.w); }

Wiring wiring_from_json(const json& j) {
    if (!j.is_array() || j.size() != 32) throw Error(ErrorKind::InvalidArgument, "wiring JSON must be an array of 32 numbers");
    Wiring w;
    for (int i = 0; i < 32; ++i) w[i] = j[i].get<double>();
    return w;
}

std::string wiring_layout() {
    std::ostringstream os;
    for (int i = 0; i < 32; ++i) os << i << ',' << coordinate_label(i) << '\n';
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

Box named_or_throw(const std::string& name) {
    const auto n = parse_box_name(trim(name));
    if (!n) throw Error(ErrorKind::InvalidArgument, "unknown box name '" + name + "'");
    return make_named_box(*n);
}

}  // namespace

Box parse_box_expr(const std::string& s0) {
    const std::string s = trim(s0);
    if (!s.empty() && s.front() == '{') return box_from_json(json::parse(s));
    if (s.find('+') == std::string::npos && s.find('*') == std::string::npos) return named_or_throw(s);
    std::vector<std::pair<double, Box>> terms;
    std::stringstream ss(s);
    std::string term;
    while (std::getline(ss, term, '+')) {
        term = trim(term);
        const auto star = term.find('*');
        double w = 1.0;
        std::string name = term;
        if (star != std::string::npos) {
            try {
                w = std::stod(term.substr(0, star));
            } catch (const std::exception&) {
                throw Error(ErrorKind::InvalidArgument, "bad weight in '" + term + "'");
            }
            name = term.substr(star + 1);
        }
        terms.emplace_back(w, named_or_throw(name));
    }
    return mix(terms);
}

Wiring parse_wiring_expr(const std::string& s0) {
    const std::string s = trim(s0);
    if (!s.empty() && s.front() == '[') return wiring_from_json(json::parse(s));
    const auto n = parse_wiring_name(s);
    if (!n) throw Error(ErrorKind::InvalidArgument, "unknown wiring '" + s + "'");
    return named_wiring(*n);
}

std::string linear_combination(const std::vector<double>& coef, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < coef.size(); ++i) {
        double c = coef[i];
        if (std::abs(c) < 5e-13) continue;
        if (out.empty()) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.4g", std::abs(c));
        out += buf;
        out += " " + names[i];
    }
    return out.empty() ? "0" : out;
}

std::string orbit_csv(const std::vector<OrbitRow>& rows) {
    std::ostringstream os;
    os << "k,chsh_prime,chsh,c1,c2,c3\n";
    for (const auto& r : rows) {
        std::array<double, 3> c{};
        try {
            c = slice_coordinates(r.box, pr_sr_i_basis());
        } catch (const Error&) {
            c = {NAN, NAN, NAN};
        }
        os << r.k << ',' << fmt12(chsh_value(r.box, Game::CHSHPrime)) << ',' << fmt12(chsh_value(r.box)) << ','
           << fmt12(c[0]) << ',' << fmt12(c[1]) << ',' << fmt12(c[2]) << '\n';
    }
    return os.str();
}

std::string scan_csv(const std::vector<opt::ScanPoint>& points) {
    std::ostringstream os;
    os << "c1,c2,label,witness_kind,witness_value\n";
    for (const auto& p : points)
        os << fmt12(p.c1) << ',' << fmt12(p.c2) << ',' << p.label << ',' << p.witness_kind << ','
           << fmt12(p.witness_value) << '\n';
    return os.str();
}

std::string scan_svg(const std::vector<opt::ScanPoint>& points, const std::vector<std::string>& names) {
    const double W = 600, H = 560, m = 40;
    // Vertex 1 on top, vertex 2 bottom left, vertex 3 bottom right.
    const double vx[3] = {W / 2, m, W - m}, vy[3] = {m, H - 80, H - 80};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<path d=\"M" << vx[0] << ',' << vy[0] << " L" << vx[1] << ',' << vy[1] << " L" << vx[2] << ',' << vy[2]
       << " Z\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i < 3 && i < static_cast<int>(names.size()); ++i)
        os << "<text x=\"" << vx[i] << "\" y=\"" << (i == 0 ? vy[i] - 10 : vy[i] + 20)
           << "\" text-anchor=\"middle\" font-size=\"14\">" << names[i] << "</text>\n";
    auto colour = [](const std::string& label) {
        if (label == "collapsing") return "#d62728";
        if (label == "not-ns") return "#bbbbbb";
        return "#1f77b4";
    };
    const double r = std::max(0.6, 240.0 / std::sqrt(std::max<std::size_t>(points.size(), 1)) / 2);
    for (const auto& p : points) {
        const double x = p.c1 * vx[0] + p.c2 * vx[1] + p.c3 * vx[2];
        const double y = p.c1 * vy[0] + p.c2 * vy[1] + p.c3 * vy[2];
        os << "<circle cx=\"" << fmt12(x) << "\" cy=\"" << fmt12(y) << "\" r=\"" << fmt12(r) << "\" fill=\""
           << colour(p.label) << "\"/>\n";
    }
    const char* labels[3] = {"collapsing", "not-ns", "unknown"};
    for (int i = 0; i < 3; ++i) {
        const double y = H - 45 + 14 * i;
        os << "<circle cx=\"" << m << "\" cy=\"" << y << "\" r=\"5\" fill=\"" << colour(labels[i]) << "\"/>\n";
        os << "<text x=\"" << m + 12 << "\" y=\"" << y + 4 << "\" font-size=\"12\">" << labels[i] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

opt::DescentConfig descent_config_from_json(const json& j, opt::DescentConfig c) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "learning_rate") c.learning_rate = v.get<double>();
        else if (key == "max_iters") c.max_iters = v.get<int>();
        else if (key == "tol_eps") c.tol_eps = v.get<double>();
        else if (key == "k_reset") c.k_reset = v.get<int>();
        else if (key == "chi") c.chi = v.get<double>();
        else if (key == "replicas") c.replicas = v.get<int>();
        else if (key == "line_search_iters") c.line_search_iters = v.get<int>();
        else if (key == "seed") c.seed = v.get<std::uint64_t>();
        else if (key == "threads") c.threads = v.get<int>();
        else throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
    }
    c.validate();
    return c;
}

graph::Graph parse_edge_list(std::istream& in) {
    std::vector<std::pair<int, int>> edges;
    int n = 0;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == 'n') {
            std::string tag;
            ls >> tag >> n;
            continue;
        }
        int u, v;
        if (!(ls >> u >> v)) throw Error(ErrorKind::InvalidArgument, "bad edge line '" + line + "'");
        edges.emplace_back(u, v);
        n = std::max({n, u + 1, v + 1});
    }
    return graph::Graph::from_edges(n, edges);
}

graph::Graph parse_adjacency_csv(std::istream& in) {
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::vector<int> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stoi(trim(cell)));
        rows.push_back(row);
    }
    graph::Graph g;
    g.n = static_cast<int>(rows.size());
    g.adj = rows;
    graph::validate_graph(g);
    return g;
}

graph::Graph parse_graph_expr(const std::string& s0) {
    const std::string s = trim(s0);
    if (std::filesystem::exists(s)) {
        std::ifstream f(s);
        if (s.size() > 4 && s.substr(s.size() - 4) == ".csv") return parse_adjacency_csv(f);
        return parse_edge_list(f);
    }
    const auto plus = s.find('+');
    if (plus != std::string::npos)
        return graph::disjoint_union(parse_graph_expr(s.substr(0, plus)), parse_graph_expr(s.substr(plus + 1)));
    if (s == "petersen") return graph::petersen();
    if (s.size() >= 2 && (s[0] == 'C' || s[0] == 'K' || s[0] == 'P')) {
        int n = 0;
        try {
            n = std::stoi(s.substr(1));
        } catch (const std::exception&) {
            n = 0;
        }
        if (n >= 1) {
            if (s[0] == 'C' && n >= 3) return graph::cycle(n);
            if (s[0] == 'K') return graph::complete(n);
            if (s[0] == 'P') return graph::path(n);
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown graph '" + s + "'");
}

std::string strategy_csv(const graph::NSStrategy& s) {
    std::ostringstream os;
    os << "x_A,x_B,y_A,y_B,prob\n";
    for (int xa = 0; xa < s.n_in; ++xa)
        for (int xb = 0; xb < s.n_in; ++xb)
            for (int ya = 0; ya < s.n_out; ++ya)
                for (int yb = 0; yb < s.n_out; ++yb) {
                    const double v = s(ya, yb, xa, xb);
                    if (v != 0.0) os << xa << ',' << xb << ',' << ya << ',' << yb << ',' << fmt12(v) << '\n';
                }
    return os.str();
}

}  // namespace nlb::io
