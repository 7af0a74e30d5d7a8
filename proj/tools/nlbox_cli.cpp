#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nlbox/box.hpp"
#include "nlbox/graphgame.hpp"
#include "nlbox/io.hpp"
#include "nlbox/moe.hpp"
#include "nlbox/optimizer.hpp"
#include "nlbox/orbit.hpp"
#include "nlbox/wiring.hpp"

using namespace nlb;
using nlb::io::json;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    double tol = 1e-9;
    std::string out;
    std::string format = "text";
};

// Thrown to report a failed check after the output has been written.
struct ValidationFailure {
    std::string what;
};

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + g.out);
    f << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, sep)) parts.push_back(p);
    return parts;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

// ---- box -------------------------------------------------------------------

struct BoxArgs {
    std::string expr;
};

int run_box(const Globals& g, const BoxArgs& a) {
    const Box b = io::parse_box_expr(a.expr);
    const auto ns = validate_ns(b, g.tol);
    if (g.format == "json") {
        emit(g, io::box_to_json(b).dump() + "\n");
    } else if (g.format == "csv") {
        emit(g, io::box_to_csv(b));
    } else {
        std::ostringstream os;
        os << "P(a,b|x,y)  ab=00    ab=01    ab=10    ab=11\n";
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                os << "xy=" << x << y << "      ";
                for (int aa = 0; aa < 2; ++aa)
                    for (int bb = 0; bb < 2; ++bb) os << io::fmt4(b(aa, bb, x, y)) << "   ";
                os << '\n';
            }
        os << "CHSH    " << io::fmt12(chsh_value(b)) << '\n';
        os << "CHSH'   " << io::fmt12(chsh_value(b, Game::CHSHPrime)) << '\n';
        os << "NS      " << (ns.ok ? "yes" : "no: " + ns.summary()) << '\n';
        if (ns.ok) {
            os << "local   " << (is_local(b, g.tol).local ? "yes" : "no") << '\n';
            const auto c = collapse_criterion(b);
            os << "A+B     " << io::fmt12(c.A + c.B) << (c.satisfied ? " (collapsing)" : "") << '\n';
            os << "above (3+sqrt6)/6: " << (chsh_value(b) > kCollapseThreshold ? "yes" : "no") << '\n';
        }
        emit(g, os.str());
    }
    if (!ns.ok) throw ValidationFailure{"box is not non-signaling"};
    return 0;
}

// ---- wiring ----------------------------------------------------------------

struct WiringArgs {
    std::string expr = "W_BS";
    bool layout = false;
};

int run_wiring(const Globals& g, const WiringArgs& a) {
    if (a.layout) {
        emit(g, "index,label\n" + io::wiring_layout());
        return 0;
    }
    const Wiring w = io::parse_wiring_expr(a.expr);
    const auto rep = validate_wiring(w, g.tol);
    if (g.format == "json") {
        emit(g, io::wiring_to_json(w).dump() + "\n");
    } else if (g.format == "csv") {
        std::string s = "index,label,value\n";
        for (int i = 0; i < 32; ++i) s += std::to_string(i) + "," + coordinate_label(i) + "," + io::fmt12(w[i]) + "\n";
        emit(g, s);
    } else {
        std::ostringstream os;
        for (int i = 0; i < 32; ++i) os << std::left << std::setw(20) << coordinate_label(i) << io::fmt4(w[i]) << '\n';
        os << "valid: " << (rep.ok ? "yes" : "no: " + rep.summary()) << '\n';
        os << "deterministic: " << (is_deterministic(w) ? "yes" : "no") << '\n';
        emit(g, os.str());
    }
    if (!rep.ok) throw ValidationFailure{"wiring violates its constraints"};
    return 0;
}

// ---- table -----------------------------------------------------------------

struct TableArgs {
    std::string wiring = "W_BS";
    std::string boxes = "PR,P00,P11,I";
};

int run_table(const Globals& g, const TableArgs& a) {
    const Wiring w = io::parse_wiring_expr(a.wiring);
    const auto names = split(a.boxes, ',');
    std::vector<Box> basis;
    for (const auto& n : names) basis.push_back(io::parse_box_expr(n));
    const auto table = multiplication_table(w, basis);
    std::vector<std::vector<std::string>> cells(names.size(), std::vector<std::string>(names.size()));
    std::vector<std::vector<std::vector<double>>> coefs(names.size(), std::vector<std::vector<double>>(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j) {
            coefs[i][j] = span_coordinates(table[i][j], basis, g.tol);
            cells[i][j] = io::linear_combination(coefs[i][j], names);
        }
    std::ostringstream os;
    if (g.format == "csv") {
        os << "left,right";
        for (const auto& n : names) os << ',' << n;
        os << '\n';
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = 0; j < names.size(); ++j) {
                os << names[i] << ',' << names[j];
                for (double c : coefs[i][j]) os << ',' << io::fmt12(c);
                os << '\n';
            }
    } else if (g.format == "json") {
        json j = json::object();
        j["boxes"] = names;
        j["coefficients"] = coefs;
        os << j.dump() << '\n';
    } else {
        std::size_t w0 = 0, wc = 0;
        for (const auto& n : names) w0 = std::max(w0, n.size());
        for (const auto& row : cells)
            for (const auto& c : row) wc = std::max(wc, c.size());
        os << std::string(w0, ' ');
        for (const auto& n : names) os << " | " << std::left << std::setw(static_cast<int>(wc)) << n;
        os << '\n';
        for (std::size_t i = 0; i < names.size(); ++i) {
            os << std::left << std::setw(static_cast<int>(w0)) << names[i];
            for (const auto& c : cells[i]) os << " | " << std::left << std::setw(static_cast<int>(wc)) << c;
            os << '\n';
        }
    }
    emit(g, os.str());
    return 0;
}

// ---- orbit -----------------------------------------------------------------

struct OrbitArgs {
    std::string box = "0.39*PR+0.6*SR+0.01*I";
    std::string wiring = "W_BS";
    int depth = 4;
    bool tilted = false;
};

int run_orbit(const Globals& g, const OrbitArgs& a) {
    const Box p = io::parse_box_expr(a.box);
    const Wiring w = io::parse_wiring_expr(a.wiring);
    std::vector<io::OrbitRow> rows;
    if (a.tilted) {
        for (int k = 1; k <= a.depth; ++k)
            for (const auto& b : tilted_orbit(p, w, k).boxes) rows.push_back({k, b});
    } else {
        for (const auto& lvl : orbit_levels(p, w, a.depth))
            for (const auto& b : lvl.boxes) rows.push_back({lvl.depth, b});
    }
    if (g.format == "json") {
        json j = json::array();
        for (const auto& r : rows) j.push_back({{"k", r.k}, {"box", io::box_to_json(r.box)}});
        emit(g, j.dump() + "\n");
    } else {
        emit(g, io::orbit_csv(rows));
    }
    return 0;
}

// ---- search ----------------------------------------------------------------

struct SearchArgs {
    std::string p = "0.39*PR+0.6*SR+0.01*I";
    std::string q;
    std::string method = "lsr";
    std::string config;
    int replicas = -1;
    double chi = -1;
    int threads = 1;
};

int run_search(const Globals& g, const SearchArgs& a) {
    const Box p = io::parse_box_expr(a.p);
    const Box q = a.q.empty() ? p : io::parse_box_expr(a.q);
    opt::DescentConfig cfg;
    if (!a.config.empty()) {
        std::ifstream f(a.config);
        if (!f) throw Error(ErrorKind::InvalidArgument, "cannot read " + a.config);
        cfg = io::descent_config_from_json(json::parse(f), cfg);
    }
    cfg.seed = g.seed;
    if (a.replicas > 0) cfg.replicas = a.replicas;
    if (a.chi > 0) cfg.chi = a.chi;
    cfg.threads = a.threads;
    cfg.validate();
    opt::RunResult r;
    if (a.method == "lsr") r = opt::line_search_with_resets(cfg, p, q);
    else if (a.method == "pgd") r = opt::pgd_replicas(cfg, opt::pair_objective(p, q));
    else throw Error(ErrorKind::InvalidArgument, "method must be lsr or pgd");
    const auto& best = r.best();
    if (g.format == "json") {
        json j = {{"value", best.value}, {"replica", r.best_index()}, {"wiring", io::wiring_to_json(best.w)}};
        emit(g, j.dump() + "\n");
    } else if (g.format == "csv") {
        std::string s = "replica,value\n";
        for (std::size_t i = 0; i < r.replicas.size(); ++i)
            s += std::to_string(i) + "," + io::fmt12(r.replicas[i].value) + "\n";
        emit(g, s);
    } else {
        std::ostringstream os;
        os << "best value " << io::fmt12(best.value) << " (replica " << r.best_index() << " of " << r.replicas.size()
           << ")\n";
        for (int i = 0; i < 32; ++i)
            os << std::left << std::setw(20) << coordinate_label(i) << io::fmt4(best.w[i]) << '\n';
        emit(g, os.str());
    }
    return 0;
}

// ---- scan ------------------------------------------------------------------

struct ScanArgs {
    std::string basis = "PR,SR,I";
    int grid = 50;
    std::string method = "analytic";
    std::string wiring = "W_BS";
    int kmax = 8;
    int threads = 1;
};

int run_scan(const Globals& g, const ScanArgs& a) {
    const auto names = split(a.basis, ',');
    if (names.size() != 3) throw Error(ErrorKind::InvalidArgument, "--basis needs three boxes");
    Basis3 basis;
    for (int i = 0; i < 3; ++i) basis[i] = io::parse_box_expr(names[i]);
    const auto method = opt::parse_scan_method(a.method);
    if (!method) throw Error(ErrorKind::InvalidArgument, "unknown scan method '" + a.method + "'");
    opt::DescentConfig cfg;
    cfg.seed = g.seed;
    cfg.threads = a.threads;
    opt::ScanOptions opts;
    opts.wiring = io::parse_wiring_expr(a.wiring);
    opts.kmax = a.kmax;
    const auto pts = opt::slice_scan(basis, a.grid, *method, cfg, opts);
    bool svg = g.format == "svg" || (g.out.size() > 4 && g.out.substr(g.out.size() - 4) == ".svg");
    emit(g, svg ? io::scan_svg(pts, names) : io::scan_csv(pts));
    return 0;
}

// ---- graph -----------------------------------------------------------------

struct GraphArgs {
    std::string g = "C6";
    std::string h = "C3+C3";
    int d = 1;
    bool lp = false;
    std::string strategy_out;
};

int run_graph(const Globals& gl, const GraphArgs& a) {
    const auto G = io::parse_graph_expr(a.g);
    const auto H = io::parse_graph_expr(a.h);
    const auto cp = graph::common_equitable_partition(G, H, a.d);
    std::ostringstream os;
    json j = json::object();
    j["d"] = a.d;
    j["fractionally_isomorphic"] = cp.has_value();
    os << "G: " << G.n << " vertices, H: " << H.n << " vertices, D = " << a.d << '\n';
    os << "D-fractionally isomorphic: " << (cp ? "yes" : "no") << '\n';
    std::optional<std::string> failure;
    if (cp) {
        const auto& pp = cp->params;
        os << "cells k = " << pp.k << ", sizes";
        for (int s : pp.sizes) os << ' ' << s;
        os << '\n';
        for (std::size_t t = 0; t < pp.c.size(); ++t) {
            os << "c[" << t << "] =";
            for (const auto& row : pp.c[t]) {
                os << " [";
                for (std::size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i];
                os << ']';
            }
            os << '\n';
        }
        const double res = graph::intertwining_residual(graph::partition_witness(*cp), G, H, a.d);
        os << "witness residual " << io::fmt12(res) << '\n';
        j["k"] = pp.k;
        j["sizes"] = pp.sizes;
        j["c"] = pp.c;
        j["witness_residual"] = res;
        if (res > 1e-12) failure = "partition witness does not intertwine";
    }
    if (a.lp) {
        const bool lp = graph::lp_fractionally_isomorphic(G, H, a.d);
        os << "LP oracle: " << (lp ? "feasible" : "infeasible") << '\n';
        j["lp_feasible"] = lp;
        if (lp != cp.has_value()) failure = "refinement and LP disagree";
    }
    if (cp && !a.strategy_out.empty()) {
        const graph::DistanceGame game(G, H, a.d);
        const auto s = graph::build_perfect_strategy(game, cp);
        const auto rep = graph::validate_strategy(s, game, kExactTol);
        os << "strategy: " << (rep.ok ? "NS and perfect" : rep.summary()) << '\n';
        j["strategy_valid"] = rep.ok;
        std::ofstream f(a.strategy_out);
        if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + a.strategy_out);
        f << io::strategy_csv(s);
        if (!rep.ok) failure = "strategy fails validation";
    }
    emit(gl, gl.format == "json" ? j.dump() + "\n" : os.str());
    if (failure) throw ValidationFailure{*failure};
    return 0;
}

// ---- moe -------------------------------------------------------------------

struct MoeArgs {
    int kmin = 2;
    int kmax = 12;
    int dim = 2;
    int iters = 10;
    int restarts = 4;
    int threads = 1;
};

int run_moe_table(const Globals& g, const MoeArgs& a) {
    if (a.kmin < 2 || a.kmax < a.kmin) throw Error(ErrorKind::InvalidArgument, "need 2 <= kmin <= kmax");
    struct Row {
        int k;
        double npa, seesaw, conj;
    };
    std::vector<Row> rows;
    for (int k = a.kmin; k <= a.kmax; ++k) {
        const double conj = 0.5 + 1.0 / (2.0 * std::sqrt(static_cast<double>(k)));
        double see = NAN;
        if (a.restarts > 0) {
            const auto r = moe::seesaw(k, a.dim, a.iters, a.restarts, g.seed, a.threads);
            see = moe::win_prob(k, r.best);
        }
        rows.push_back({k, moe::npa1_value(k), see, conj});
    }
    std::ostringstream os;
    if (g.format == "csv") {
        os << "K,npa1,seesaw,conjecture\n";
        for (const auto& r : rows)
            os << r.k << ',' << io::fmt12(r.npa) << ',' << io::fmt12(r.seesaw) << ',' << io::fmt12(r.conj) << '\n';
    } else if (g.format == "json") {
        json j = json::array();
        for (const auto& r : rows)
            j.push_back({{"K", r.k}, {"npa1", r.npa}, {"seesaw", r.seesaw}, {"conjecture", r.conj}});
        os << j.dump() << '\n';
    } else {
        os << pad("K", 4) << pad("NPA-1", 10) << pad("seesaw", 10) << pad("conjecture", 12) << '\n';
        for (const auto& r : rows)
            os << pad(std::to_string(r.k), 4) << pad(io::fmt4(r.npa), 10)
               << pad(std::isnan(r.seesaw) ? "-" : io::fmt4(r.seesaw), 10) << pad(io::fmt4(r.conj), 12) << '\n';
    }
    emit(g, os.str());
    return 0;
}

int run_moe_seesaw(const Globals& g, int k, const MoeArgs& a) {
    const auto r = moe::seesaw(k, a.dim, a.iters, a.restarts, g.seed, a.threads);
    const double bound = k + 2.0 * std::sqrt(static_cast<double>(k));
    if (g.format == "json") {
        json j = {{"K", k}, {"D", a.dim}, {"best", r.best}, {"best_restart", r.best_restart}, {"finals", r.finals}};
        emit(g, j.dump() + "\n");
    } else if (g.format == "csv") {
        std::string s = "restart,step,value\n";
        for (std::size_t i = 0; i < r.traces.size(); ++i)
            for (std::size_t t = 0; t < r.traces[i].size(); ++t)
                s += std::to_string(i) + "," + std::to_string(t) + "," + io::fmt12(r.traces[i][t]) + "\n";
        emit(g, s);
    } else {
        std::ostringstream os;
        os << "K = " << k << ", D = " << a.dim << ", best " << io::fmt12(r.best) << " (restart " << r.best_restart
           << "), K+2sqrtK = " << io::fmt12(bound) << ", win prob " << io::fmt12(moe::win_prob(k, r.best)) << '\n';
        emit(g, os.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nlbox: nonlocal boxes, wirings, graph games and monogamy bounds"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Seed for stochastic subcommands");
    app.add_option("--tol", g.tol, "Validation tolerance");
    app.add_option("--out", g.out, "Write output to this file");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "svg", "text"}));

    BoxArgs box;
    auto* c_box = app.add_subcommand("box", "Inspect a box");
    c_box->add_option("expr", box.expr, "Name, mixture such as 0.5*PR+0.5*I, or JSON")->required();

    WiringArgs wir;
    auto* c_wir = app.add_subcommand("wiring", "Print and validate a wiring");
    c_wir->add_option("expr", wir.expr, "Name (W_BS, W_XOR, ...) or JSON array");
    c_wir->add_flag("--layout", wir.layout, "Print the coordinate layout");

    TableArgs tab;
    auto* c_tab = app.add_subcommand("table", "Multiplication table in a box basis");
    c_tab->add_option("--wiring", tab.wiring);
    c_tab->add_option("--boxes", tab.boxes, "Comma-separated basis");

    OrbitArgs orb;
    auto* c_orb = app.add_subcommand("orbit", "Orbit of a box under a wiring");
    c_orb->add_option("--box", orb.box);
    c_orb->add_option("--wiring", orb.wiring);
    c_orb->add_option("--depth", orb.depth)->check(CLI::Range(1, kMaxTiltedDepth));
    c_orb->add_flag("--tilted", orb.tilted, "Use the restricted p x T / T x p recurrence");

    SearchArgs sea;
    auto* c_sea = app.add_subcommand("search", "Optimize a wiring for CHSH(q x_W p)");
    c_sea->add_option("--left", sea.p, "Box p");
    c_sea->add_option("--right", sea.q, "Box q, defaults to p");
    c_sea->add_option("--method", sea.method)->check(CLI::IsMember({"lsr", "pgd"}));
    c_sea->add_option("--config", sea.config, "JSON file with DescentConfig fields");
    c_sea->add_option("--replicas", sea.replicas);
    c_sea->add_option("--chi", sea.chi, "Fraction of replicas kept at each reset");
    c_sea->add_option("--threads", sea.threads);

    ScanArgs sca;
    auto* c_sca = app.add_subcommand("scan", "Classify a slice of boxes");
    c_sca->add_option("--basis", sca.basis);
    c_sca->add_option("--grid", sca.grid)->check(CLI::Range(1, 2000));
    c_sca->add_option("--method", sca.method, "analytic, taskA, taskB or right_power");
    c_sca->add_option("--wiring", sca.wiring, "Wiring for right_power");
    c_sca->add_option("--kmax", sca.kmax);
    c_sca->add_option("--threads", sca.threads);

    GraphArgs gra;
    auto* c_gra = app.add_subcommand("graph", "D-distance game between two graphs");
    c_gra->add_option("G", gra.g, "C<n>, K<n>, P<n>, petersen, A+B, or a file")->required();
    c_gra->add_option("H", gra.h)->required();
    c_gra->add_option("--depth,-d", gra.d, "Distance bound D")->check(CLI::PositiveNumber);
    c_gra->add_flag("--lp", gra.lp, "Cross-check with the LP oracle");
    c_gra->add_option("--strategy", gra.strategy_out, "Write the perfect strategy as CSV");

    MoeArgs moe_args;
    auto* c_moe = app.add_subcommand("moe", "Monogamy-of-entanglement bounds");
    c_moe->require_subcommand(1);
    auto* c_moe_tab = c_moe->add_subcommand("table", "NPA-1, seesaw and conjectured values");
    c_moe_tab->add_option("--kmin", moe_args.kmin);
    c_moe_tab->add_option("--kmax", moe_args.kmax);
    auto* c_moe_see = c_moe->add_subcommand("seesaw", "Seesaw lower bound on the operator norm");
    int see_k = 3;
    c_moe_see->add_option("K", see_k)->required()->check(CLI::Range(1, 24));
    for (auto* c : {c_moe_tab, c_moe_see}) {
        c->add_option("--dim", moe_args.dim, "Adversary dimension D");
        c->add_option("--iters", moe_args.iters);
        c->add_option("--restarts", moe_args.restarts);
        c->add_option("--threads", moe_args.threads);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*c_box) return run_box(g, box);
        if (*c_wir) return run_wiring(g, wir);
        if (*c_tab) return run_table(g, tab);
        if (*c_orb) return run_orbit(g, orb);
        if (*c_sea) return run_search(g, sea);
        if (*c_sca) return run_scan(g, sca);
        if (*c_gra) return run_graph(g, gra);
        if (*c_moe_tab) return run_moe_table(g, moe_args);
        if (*c_moe_see) return run_moe_seesaw(g, see_k, moe_args);
    } catch (const ValidationFailure& f) {
        std::cerr << "validation failed: " << f.what << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
