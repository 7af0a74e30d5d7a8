#include "nlbox/graphgame.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include "nlbox/lp.hpp"

namespace nlb::graph {

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    Graph g;
    g.n = n;
    g.adj.assign(n, std::vector<int>(n, 0));
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n || u == v)
            throw Error(ErrorKind::InvalidArgument, "bad edge " + std::to_string(u) + " " + std::to_string(v));
        g.adj[u][v] = g.adj[v][u] = 1;
    }
    return g;
}

int Graph::edge_count() const {
    int e = 0;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e += adj[u][v];
    return e;
}

int Graph::degree(int v) const { return std::accumulate(adj[v].begin(), adj[v].end(), 0); }

void validate_graph(const Graph& g) {
    if (g.n <= 0 || static_cast<int>(g.adj.size()) != g.n) throw Error(ErrorKind::InvalidArgument, "empty graph");
    for (int u = 0; u < g.n; ++u) {
        if (static_cast<int>(g.adj[u].size()) != g.n || g.adj[u][u] != 0)
            throw Error(ErrorKind::InvalidArgument, "adjacency must be square with zero diagonal");
        for (int v = 0; v < g.n; ++v)
            if (g.adj[u][v] != g.adj[v][u] || (g.adj[u][v] != 0 && g.adj[u][v] != 1))
                throw Error(ErrorKind::InvalidArgument, "adjacency must be symmetric 0/1");
    }
}

Graph cycle(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph::from_edges(n, e);
}

Graph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Graph::from_edges(n, e);
}

Graph path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph::from_edges(n, e);
}

Graph petersen() {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < 5; ++i) {
        e.emplace_back(i, (i + 1) % 5);
        e.emplace_back(i, i + 5);
        e.emplace_back(5 + i, 5 + (i + 2) % 5);
    }
    return Graph::from_edges(10, e);
}

Graph disjoint_union(const Graph& a, const Graph& b) {
    Graph g;
    g.n = a.n + b.n;
    g.adj.assign(g.n, std::vector<int>(g.n, 0));
    for (int u = 0; u < a.n; ++u)
        for (int v = 0; v < a.n; ++v) g.adj[u][v] = a.adj[u][v];
    for (int u = 0; u < b.n; ++u)
        for (int v = 0; v < b.n; ++v) g.adj[a.n + u][a.n + v] = b.adj[u][v];
    return g;
}

Graph complement(const Graph& g) {
    Graph c = g;
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v) c.adj[u][v] = (u != v && !g.adj[u][v]) ? 1 : 0;
    return c;
}

std::vector<std::vector<int>> distance_matrix(const Graph& g) {
    std::vector<std::vector<int>> d(g.n, std::vector<int>(g.n, kInf));
    for (int s = 0; s < g.n; ++s) {
        std::queue<int> q;
        d[s][s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v = 0; v < g.n; ++v)
                if (g.adj[u][v] && d[s][v] == kInf) {
                    d[s][v] = d[s][u] + 1;
                    q.push(v);
                }
        }
    }
    return d;
}

int diameter(const Graph& g) {
    int m = 0;
    for (const auto& row : distance_matrix(g))
        for (int v : row)
            if (v != kInf) m = std::max(m, v);
    return m;
}

Eigen::MatrixXd t_adjacency(const Graph& g, int t) {
    if (t < 0) throw Error(ErrorKind::InvalidArgument, "t must be non-negative");
    const auto d = distance_matrix(g);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v)
            if (d[u][v] == t) a(u, v) = 1.0;
    return a;
}

Eigen::MatrixXd t_adjacency_recursive(const Graph& g, int t) {
    if (t < 0) throw Error(ErrorKind::InvalidArgument, "t must be non-negative");
    const int n = g.n;
    Eigen::MatrixXd A(n, n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) A(u, v) = g.adj[u][v];
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd covered = Eigen::MatrixXd::Identity(n, n);  // sum of A^(s), s < current
    Eigen::MatrixXd cur = Eigen::MatrixXd::Identity(n, n);
    for (int s = 1; s <= t; ++s) {
        power = power * A;
        // (A^s elementwise-divided by itself) masks reachable pairs; remove pairs already at smaller distance.
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, n);
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (power(u, v) > 0.5 && covered(u, v) < 0.5) next(u, v) = 1.0;
        covered += next;
        cur = next;
    }
    return cur;
}

std::vector<std::vector<int>> components(const Graph& g) {
    std::vector<int> seen(g.n, 0);
    std::vector<std::vector<int>> out;
    const auto d = distance_matrix(g);
    for (int s = 0; s < g.n; ++s) {
        if (seen[s]) continue;
        std::vector<int> comp;
        for (int v = 0; v < g.n; ++v)
            if (d[s][v] != kInf) {
                seen[v] = 1;
                comp.push_back(v);
            }
        out.push_back(comp);
    }
    return out;
}

std::optional<CommonPartition> common_equitable_partition(const Graph& g, const Graph& h, int d) {
    validate_graph(g);
    validate_graph(h);
    if (d < 0) throw Error(ErrorKind::InvalidArgument, "D must be non-negative");
    if (g.n != h.n) return std::nullopt;
    const int ng = g.n, nt = g.n + h.n;
    const auto dg = distance_matrix(g), dh = distance_matrix(h);
    auto dist = [&](int u, int v) -> int {
        if (u < ng) return v < ng ? dg[u][v] : kInf;
        return v >= ng ? dh[u - ng][v - ng] : kInf;
    };
    std::vector<int> col(nt, 0);
    int ncol = 1;
    while (true) {
        using Sig = std::pair<int, std::vector<std::tuple<int, int, int>>>;
        std::vector<Sig> sig(nt);
        for (int v = 0; v < nt; ++v) {
            std::map<std::pair<int, int>, int> cnt;
            const int lo = v < ng ? 0 : ng, hi = v < ng ? ng : nt;
            for (int w = lo; w < hi; ++w) {
                const int t = dist(v, w);
                if (t >= 1 && t <= d) ++cnt[{t, col[w]}];
            }
            std::vector<std::tuple<int, int, int>> s;
            for (const auto& [k, c] : cnt) s.emplace_back(k.first, k.second, c);
            sig[v] = {col[v], std::move(s)};
        }
        std::map<Sig, int> ids;
        for (const auto& s : sig) ids.emplace(s, 0);
        int next = 0;
        for (auto& [k, id] : ids) id = next++;
        for (int v = 0; v < nt; ++v) col[v] = ids[sig[v]];
        if (next == ncol) break;
        ncol = next;
    }
    std::vector<int> in_g(ncol, 0), in_h(ncol, 0);
    for (int v = 0; v < nt; ++v) (v < ng ? in_g : in_h)[col[v]]++;
    for (int c = 0; c < ncol; ++c)
        if (in_g[c] != in_h[c]) return std::nullopt;

    CommonPartition cp;
    cp.cell_g.assign(col.begin(), col.begin() + ng);
    cp.cell_h.assign(col.begin() + ng, col.end());
    auto& P = cp.params;
    P.k = ncol;
    P.sizes = in_g;
    P.c.assign(d + 1, std::vector<std::vector<int>>(ncol, std::vector<int>(ncol, 0)));
    std::vector<int> rep(ncol, -1);
    for (int v = 0; v < ng; ++v)
        if (rep[col[v]] < 0) rep[col[v]] = v;
    for (int i = 0; i < ncol; ++i)
        for (int w = 0; w < ng; ++w) {
            const int t = dg[rep[i]][w];
            if (t <= d) P.c[t][i][col[w]]++;
        }
    P.cbar.assign(ncol, std::vector<int>(ncol, 0));
    for (int i = 0; i < ncol; ++i)
        for (int j = 0; j < ncol; ++j) {
            int s = 0;
            for (int t = 0; t <= d; ++t) s += P.c[t][i][j];
            P.cbar[i][j] = P.sizes[j] - s;
        }
    return cp;
}

Eigen::MatrixXd partition_witness(const CommonPartition& cp) {
    const int n = static_cast<int>(cp.cell_g.size());
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
    for (int h = 0; h < n; ++h)
        for (int g = 0; g < n; ++g)
            if (cp.cell_h[h] == cp.cell_g[g]) u(h, g) = 1.0 / cp.params.sizes[cp.cell_g[g]];
    return u;
}

double intertwining_residual(const Eigen::MatrixXd& u, const Graph& g, const Graph& h, int d) {
    double r = 0.0;
    for (int t = 0; t <= d; ++t)
        r = std::max(r, (u * t_adjacency(g, t) - t_adjacency(h, t) * u).cwiseAbs().maxCoeff());
    return r;
}

bool d_fractionally_isomorphic(const Graph& g, const Graph& h, int d) {
    const auto cp = common_equitable_partition(g, h, d);
    if (!cp) return false;
    const Eigen::MatrixXd u = partition_witness(*cp);
    const double rows = (u.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double cols = (u.colwise().sum().array() - 1.0).abs().maxCoeff();
    if (rows > 1e-12 || cols > 1e-12 || intertwining_residual(u, g, h, d) > 1e-12)
        throw Error(ErrorKind::InvalidArgument, "partition witness failed verification");
    return true;
}

bool lp_fractionally_isomorphic(const Graph& g, const Graph& h, int d) {
    if (g.n != h.n) return false;
    const int n = g.n, nv = n * n;
    auto var = [n](int hh, int gg) { return hh * n + gg; };
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (int hh = 0; hh < n; ++hh) {
        std::vector<double> row(nv, 0.0);
        for (int gg = 0; gg < n; ++gg) row[var(hh, gg)] = 1.0;
        A.push_back(row);
        b.push_back(1.0);
    }
    for (int gg = 0; gg < n; ++gg) {
        std::vector<double> row(nv, 0.0);
        for (int hh = 0; hh < n; ++hh) row[var(hh, gg)] = 1.0;
        A.push_back(row);
        b.push_back(1.0);
    }
    for (int t = 1; t <= d; ++t) {
        const Eigen::MatrixXd AG = t_adjacency(g, t), AH = t_adjacency(h, t);
        if (AG.isZero() && AH.isZero()) continue;
        for (int hh = 0; hh < n; ++hh)
            for (int gg = 0; gg < n; ++gg) {
                std::vector<double> row(nv, 0.0);
                for (int k = 0; k < n; ++k) {
                    row[var(hh, k)] += AG(k, gg);
                    row[var(k, gg)] -= AH(hh, k);
                }
                A.push_back(row);
                b.push_back(0.0);
            }
    }
    return lp::find_feasible(A, b, 1e-9).feasible;
}

NSStrategy::NSStrategy(int in, int out) : n_in(in), n_out(out) {
    table.assign(static_cast<std::size_t>(in) * in * out * out, 0.0);
}

DistanceGame::DistanceGame(Graph g_, Graph h_, int d_) : g(std::move(g_)), h(std::move(h_)), d(d_) {
    validate_graph(g);
    validate_graph(h);
    dist_g = distance_matrix(g);
    dist_h = distance_matrix(h);
}

bool DistanceGame::wins(int ya, int yb, int xa, int xb) const {
    if (in_g(xa) == in_g(ya) || in_g(xb) == in_g(yb)) return false;
    const int ga = in_g(xa) ? xa : ya, ha = (in_g(xa) ? ya : xa) - g.n;
    const int gb = in_g(xb) ? xb : yb, hb = (in_g(xb) ? yb : xb) - g.n;
    const int tg = dist_g[ga][gb], th = dist_h[ha][hb];
    return tg <= d ? th == tg : th > d;
}

bool HomomorphismGame::wins(int ya, int yb, int xa, int xb) const {
    if (xa == xb) return ya == yb;
    if (g.edge(xa, xb)) return h.edge(ya, yb);
    return true;
}

ValidationReport validate_ns_strategy(const NSStrategy& s, double tol) {
    ValidationReport rep;
    const int ni = s.n_in, no = s.n_out;
    double neg = 0.0;
    for (double v : s.table) neg = std::max(neg, -v);
    rep.check("non-negativity", neg, tol);
    double norm = 0.0;
    for (int xa = 0; xa < ni; ++xa)
        for (int xb = 0; xb < ni; ++xb) {
            double t = 0.0;
            for (int ya = 0; ya < no; ++ya)
                for (int yb = 0; yb < no; ++yb) t += s(ya, yb, xa, xb);
            norm = std::max(norm, std::abs(t - 1.0));
        }
    rep.check("normalization", norm, tol);
    double sa = 0.0, sb = 0.0;
    std::vector<double> ref(no);
    for (int xa = 0; xa < ni; ++xa)
        for (int xb = 0; xb < ni; ++xb)
            for (int ya = 0; ya < no; ++ya) {
                double m = 0.0;
                for (int yb = 0; yb < no; ++yb) m += s(ya, yb, xa, xb);
                if (xb == 0) ref[ya] = m;
                sa = std::max(sa, std::abs(m - ref[ya]));
            }
    for (int xb = 0; xb < ni; ++xb)
        for (int xa = 0; xa < ni; ++xa)
            for (int yb = 0; yb < no; ++yb) {
                double m = 0.0;
                for (int ya = 0; ya < no; ++ya) m += s(ya, yb, xa, xb);
                if (xa == 0) ref[yb] = m;
                sb = std::max(sb, std::abs(m - ref[yb]));
            }
    rep.check("non-signaling Alice", sa, tol);
    rep.check("non-signaling Bob", sb, tol);
    return rep;
}

namespace {

template <class GameT>
ValidationReport validate_with_rules(const NSStrategy& s, const GameT& game, double tol, int n_in, int n_out) {
    if (s.n_in != n_in || s.n_out != n_out)
        throw Error(ErrorKind::InvalidArgument, "strategy dimensions do not match the game");
    ValidationReport rep = validate_ns_strategy(s, tol);
    double lose = 0.0;
    int worst[4] = {0, 0, 0, 0};
    for (int xa = 0; xa < n_in; ++xa)
        for (int xb = 0; xb < n_in; ++xb)
            for (int ya = 0; ya < n_out; ++ya)
                for (int yb = 0; yb < n_out; ++yb) {
                    const double v = s(ya, yb, xa, xb);
                    if (v != 0.0 && !game.wins(ya, yb, xa, xb) && std::abs(v) > lose) {
                        lose = std::abs(v);
                        worst[0] = ya, worst[1] = yb, worst[2] = xa, worst[3] = xb;
                    }
                }
    rep.check("perfect win (losing mass at y=(" + std::to_string(worst[0]) + "," + std::to_string(worst[1]) +
                  ") x=(" + std::to_string(worst[2]) + "," + std::to_string(worst[3]) + "))",
              lose, tol);
    return rep;
}

}  // namespace

ValidationReport validate_strategy(const NSStrategy& s, const DistanceGame& game, double tol) {
    return validate_with_rules(s, game, tol, game.n_total(), game.n_total());
}

ValidationReport validate_strategy(const NSStrategy& s, const HomomorphismGame& game, double tol) {
    return validate_with_rules(s, game, tol, game.g.n, game.h.n);
}

NSStrategy build_perfect_strategy(const DistanceGame& game, const std::optional<CommonPartition>& cp) {
    if (!cp) throw Error(ErrorKind::MissingPartition, "no D-common equitable partition supplied");
    const int ng = game.g.n, nt = game.n_total();
    if (static_cast<int>(cp->cell_g.size()) != ng || static_cast<int>(cp->cell_h.size()) != game.h.n)
        throw Error(ErrorKind::MissingPartition, "partition does not match the game graphs");
    const auto& P = cp->params;
    if (static_cast<int>(P.c.size()) < game.d + 1)
        throw Error(ErrorKind::MissingPartition, "partition computed for a smaller D");
    NSStrategy s(nt, nt);
    auto base = [&](int ga, int gb, int ha, int hb) -> double {
        const int i = cp->cell_g[ga], j = cp->cell_g[gb];
        if (cp->cell_h[ha] != i || cp->cell_h[hb] != j) return 0.0;
        const int tg = game.dist_g[ga][gb], th = game.dist_h[ha][hb];
        if (tg <= game.d) return th == tg ? 1.0 / (P.sizes[i] * P.c[tg][i][j]) : 0.0;
        return th > game.d ? 1.0 / (P.sizes[i] * P.cbar[i][j]) : 0.0;
    };
    for (int xa = 0; xa < nt; ++xa)
        for (int xb = 0; xb < nt; ++xb)
            for (int ya = 0; ya < nt; ++ya) {
                if (game.in_g(xa) == game.in_g(ya)) continue;
                for (int yb = 0; yb < nt; ++yb) {
                    if (game.in_g(xb) == game.in_g(yb)) continue;
                    const int ga = game.in_g(xa) ? xa : ya, ha = (game.in_g(xa) ? ya : xa) - ng;
                    const int gb = game.in_g(xb) ? xb : yb, hb = (game.in_g(xb) ? yb : xb) - ng;
                    s(ya, yb, xa, xb) = base(ga, gb, ha, hb);
                }
            }
    return s;
}

std::vector<int> component_split(const Graph& h) {
    const auto comps = components(h);
    std::vector<int> side(h.n, 1);
    for (int v : comps.front()) side[v] = 0;
    return side;
}

bool hypothesis_H(const CommonPartition& cp, const std::vector<int>& side) {
    const int k = cp.params.k;
    std::vector<long long> in1(k, 0);
    for (std::size_t v = 0; v < cp.cell_h.size(); ++v)
        if (side[v] == 0) in1[cp.cell_h[v]]++;
    // |D_i n H1| / n_i equal for all i, compared by cross-multiplication.
    for (int i = 1; i < k; ++i)
        if (in1[i] * cp.params.sizes[0] != in1[0] * cp.params.sizes[i]) return false;
    return true;
}

SymmetricParams symmetric_params(const NSStrategy& s, const DistanceGame& game, const std::vector<int>& side,
                                 const std::array<int, 3>& path, double tol) {
    if (!validate_strategy(s, game, tol).ok) throw Error(ErrorKind::NotSymmetric, "strategy is not perfect");
    const int ng = game.g.n;
    SymmetricParams out;
    bool first = true;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double p11 = 0.0, p12 = 0.0, p21 = 0.0;
            for (int ha = 0; ha < game.h.n; ++ha)
                for (int hb = 0; hb < game.h.n; ++hb) {
                    const double v = s(ng + ha, ng + hb, path[a], path[b]);
                    if (side[ha] == 0 && side[hb] == 0) p11 += v;
                    if (side[ha] == 0 && side[hb] == 1) p12 += v;
                    if (side[ha] == 1 && side[hb] == 0) p21 += v;
                }
            if (std::abs(p12 - p21) > tol) throw Error(ErrorKind::NotSymmetric, "cross-component masses differ");
            out.nu[a][b] = p12;
            const double eta = p11 + p12;
            if (first) {
                out.eta = eta;
                first = false;
            } else if (std::abs(eta - out.eta) > tol) {
                throw Error(ErrorKind::NotSymmetric, "eta depends on the question pair");
            }
        }
    return out;
}

std::optional<std::array<int, 3>> find_path3(const Graph& g) {
    const auto d = distance_matrix(g);
    for (int g1 = 0; g1 < g.n; ++g1)
        for (int g3 = 0; g3 < g.n; ++g3)
            if (d[g1][g3] == 2)
                for (int g2 = 0; g2 < g.n; ++g2)
                    if (g.edge(g1, g2) && g.edge(g2, g3)) return std::array<int, 3>{g1, g2, g3};
    return std::nullopt;
}

SimulatedBox pr_from_isomorphism(const NSStrategy& s, const DistanceGame& game, const std::array<int, 3>& path,
                                 const std::vector<int>& side, double tol) {
    if (!validate_strategy(s, game, tol).ok) throw Error(ErrorKind::ImperfectStrategy, "strategy is not perfect");
    const auto sp = symmetric_params(s, game, side, path, tol);
    const int ng = game.g.n;
    const int alice[2] = {path[1], path[0]};
    const int bob[2] = {path[1], path[2]};
    SimulatedBox out;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int ha = 0; ha < game.h.n; ++ha)
                for (int hb = 0; hb < game.h.n; ++hb) out.box(side[ha], side[hb], x, y) += s(ng + ha, ng + hb, alice[x], bob[y]);
    out.alpha = 2.0 * sp.nu[0][2];
    out.beta = sp.eta - sp.nu[0][2];
    const auto v = validate_ns(out.box, 1e-9);
    if (!v.ok) throw Error(ErrorKind::InvalidBox, v.summary());
    return out;
}

NSStrategy coloring_game_box(int m, int n) {
    if (m < 2 || n < 2) throw Error(ErrorKind::ParameterTooSmall, "need M, N >= 2");
    NSStrategy s(m, n);
    for (int ga = 0; ga < m; ++ga)
        for (int gb = 0; gb < m; ++gb)
            for (int ha = 0; ha < n; ++ha)
                for (int hb = 0; hb < n; ++hb) {
                    if (ga == gb && ha == hb) s(ha, hb, ga, gb) = 1.0 / n;
                    if (ga != gb && ha != hb) s(ha, hb, ga, gb) = 1.0 / (n * (n - 1.0));
                }
    return s;
}

Box simulate_coloring_protocol(const NSStrategy& s) {
    if (s.n_in != 3 || s.n_out != 2)
        throw Error(ErrorKind::InvalidArgument, "protocol needs a strategy for the 2-coloring game of K3");
    const int alice[2] = {0, 1};
    const int bob[2] = {2, 1};
    Box b;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int ha = 0; ha < 2; ++ha)
                for (int hb = 0; hb < 2; ++hb) b(ha, hb ^ 1, x, y) += s(ha, hb, alice[x], bob[y]);
    return b;
}

Box pr_from_coloring(const NSStrategy& s, double tol) {
    if (s.n_in != 3 || s.n_out != 2)
        throw Error(ErrorKind::InvalidArgument, "protocol needs a strategy for the 2-coloring game of K3");
    if (!validate_strategy(s, HomomorphismGame{complete(3), complete(2)}, tol).ok)
        throw Error(ErrorKind::ImperfectStrategy, "strategy does not win the coloring game");
    return simulate_coloring_protocol(s);
}

namespace {

std::vector<std::vector<int>> vertex_profiles(const Graph& g) {
    const auto d = distance_matrix(g);
    std::vector<std::vector<int>> prof(g.n);
    for (int v = 0; v < g.n; ++v) {
        prof[v] = d[v];
        std::sort(prof[v].begin(), prof[v].end());
    }
    return prof;
}

}  // namespace

std::vector<Permutation> automorphisms(const Graph& g) {
    validate_graph(g);
    if (g.n > 10) throw Error(ErrorKind::TooLarge, "automorphism search capped at 10 vertices");
    const auto prof = vertex_profiles(g);
    std::vector<Permutation> out;
    Permutation perm(g.n, -1);
    std::vector<char> used(g.n, 0);
    std::function<void(int)> rec = [&](int v) {
        if (v == g.n) {
            out.push_back(perm);
            return;
        }
        for (int w = 0; w < g.n; ++w) {
            if (used[w] || prof[w] != prof[v]) continue;
            bool ok = true;
            for (int u = 0; u < v && ok; ++u) ok = g.adj[u][v] == g.adj[perm[u]][w];
            if (!ok) continue;
            perm[v] = w;
            used[w] = 1;
            rec(v + 1);
            used[w] = 0;
        }
        perm[v] = -1;
    };
    rec(0);
    return out;
}

std::optional<TransitivityConstants> strong_transitivity(const Graph& g) {
    if (g.n > 10) throw Error(ErrorKind::TooLarge, "strong transitivity check capped at 10 vertices");
    const auto auts = automorphisms(g);
    const long long order = static_cast<long long>(auts.size());
    const int e = g.edge_count();
    const int ec = g.n * (g.n - 1) / 2 - e;
    // Reference vertex, arc and non-arc; Aut is a group, so constant counts
    // are equivalent to transitivity on vertices, arcs and non-arcs.
    int ea = -1, eb = -1, na = -1, nb = -1;
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v) {
            if (u == v) continue;
            if (g.edge(u, v) && ea < 0) ea = u, eb = v;
            if (!g.edge(u, v) && na < 0) na = u, nb = v;
        }
    std::set<int> vimg;
    std::set<std::pair<int, int>> eimg, nimg;
    for (const auto& p : auts) {
        vimg.insert(p[0]);
        if (ea >= 0) eimg.insert({p[ea], p[eb]});
        if (na >= 0) nimg.insert({p[na], p[nb]});
    }
    if (static_cast<int>(vimg.size()) != g.n) return std::nullopt;
    if (ea >= 0 && static_cast<int>(eimg.size()) != 2 * e) return std::nullopt;
    if (na >= 0 && static_cast<int>(nimg.size()) != 2 * ec) return std::nullopt;
    TransitivityConstants c;
    c.group_order = order;
    c.d1 = order / g.n;
    c.d2 = e > 0 ? order / (2 * e) : 0;
    c.d3 = ec > 0 ? order / (2 * ec) : 0;
    return c;
}

bool distance_transitive(const Graph& g) {
    const auto auts = automorphisms(g);
    const auto d = distance_matrix(g);
    std::map<int, std::pair<int, int>> ref;
    std::map<int, int> total;
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v) {
            ref.emplace(d[u][v], std::make_pair(u, v));
            total[d[u][v]]++;
        }
    for (const auto& [dist, pr] : ref) {
        std::set<std::pair<int, int>> img;
        for (const auto& p : auts) img.insert({p[pr.first], p[pr.second]});
        if (static_cast<int>(img.size()) != total[dist]) return false;
    }
    return true;
}

NSStrategy symmetrize_strategy(const NSStrategy& s, const DistanceGame& game, const std::vector<Permutation>& auts) {
    const int ng = game.g.n, nh = game.h.n, nt = game.n_total();
    if (s.n_in != nt || s.n_out != nt) throw Error(ErrorKind::InvalidArgument, "strategy does not match the game");
    if (auts.empty()) throw Error(ErrorKind::InvalidArgument, "empty automorphism set");
    for (const auto& p : auts) {
        if (static_cast<int>(p.size()) != nh) throw Error(ErrorKind::NotAutomorphism, "wrong permutation length");
        std::vector<char> seen(nh, 0);
        for (int v : p) {
            if (v < 0 || v >= nh || seen[v]) throw Error(ErrorKind::NotAutomorphism, "not a permutation");
            seen[v] = 1;
        }
        for (int u = 0; u < nh; ++u)
            for (int v = 0; v < nh; ++v)
                if (game.h.adj[u][v] != game.h.adj[p[u]][p[v]])
                    throw Error(ErrorKind::NotAutomorphism, "permutation does not preserve adjacency of H");
    }
    NSStrategy out(nt, nt);
    const double wgt = 1.0 / static_cast<double>(auts.size());
    std::vector<int> lift(nt);
    for (const auto& p : auts) {
        for (int v = 0; v < nt; ++v) lift[v] = v < ng ? v : ng + p[v - ng];
        for (int xa = 0; xa < nt; ++xa)
            for (int xb = 0; xb < nt; ++xb)
                for (int ya = 0; ya < nt; ++ya)
                    for (int yb = 0; yb < nt; ++yb) {
                        const double v = s(ya, yb, xa, xb);
                        if (v != 0.0) out(lift[ya], lift[yb], lift[xa], lift[xb]) += wgt * v;
                    }
    }
    return out;
}

CycleCounterexample cycle_counterexample(int d) {
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "D must be at least 1");
    const int n = 2 * d + 1;
    CycleCounterexample c;
    c.g = cycle(2 * n);
    c.h = disjoint_union(cycle(n), cycle(n));
    c.u = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int h = 0; h < 2 * n; ++h)
        for (int g = 0; g < 2 * n; ++g)
            if (h % n == g % n) c.u(h, g) = 0.5;
    return c;
}

namespace {

// Bit index of edge {u, v}, u < v, in the upper-triangle order.
int edge_bit(int u, int v) {
    if (u > v) std::swap(u, v);
    return v * (v - 1) / 2 + u;
}

// Canonical code: the smallest edge mask over all relabelings that list
// vertices by their colour-refinement class.
std::uint32_t canonical_mask(int n, std::uint32_t mask) {
    std::vector<std::uint32_t> nb(n, 0);
    for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u)
            if (mask >> edge_bit(u, v) & 1) {
                nb[u] |= 1u << v;
                nb[v] |= 1u << u;
            }
    std::vector<int> col(n, 0);
    int ncol = 1;
    while (true) {
        std::vector<std::pair<int, std::vector<int>>> sig(n);
        for (int v = 0; v < n; ++v) {
            std::vector<int> s;
            for (int w = 0; w < n; ++w)
                if (nb[v] >> w & 1) s.push_back(col[w]);
            std::sort(s.begin(), s.end());
            sig[v] = {col[v], s};
        }
        std::map<std::pair<int, std::vector<int>>, int> ids;
        for (const auto& x : sig) ids.emplace(x, 0);
        int next = 0;
        for (auto& [k, id] : ids) id = next++;
        for (int v = 0; v < n; ++v) col[v] = ids[sig[v]];
        if (next == ncol) break;
        ncol = next;
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return col[a] < col[b] || (col[a] == col[b] && a < b); });
    std::vector<std::pair<int, int>> cells;  // [begin, end) in order
    for (int i = 0; i < n;) {
        int j = i;
        while (j < n && col[order[j]] == col[order[i]]) ++j;
        cells.emplace_back(i, j);
        i = j;
    }
    std::uint32_t best = ~0u;
    std::function<void(std::size_t)> rec = [&](std::size_t c) {
        if (c == cells.size()) {
            std::uint32_t m = 0;
            for (int i = 1; i < n; ++i)
                for (int j = 0; j < i; ++j)
                    if (nb[order[i]] >> order[j] & 1) m |= 1u << edge_bit(j, i);
            best = std::min(best, m);
            return;
        }
        auto b = order.begin() + cells[c].first, e = order.begin() + cells[c].second;
        std::sort(b, e);
        do rec(c + 1);
        while (std::next_permutation(b, e));
    };
    rec(0);
    return best;
}

Graph graph_from_mask(int n, std::uint32_t mask) {
    std::vector<std::pair<int, int>> e;
    for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u)
            if (mask >> edge_bit(u, v) & 1) e.emplace_back(u, v);
    return Graph::from_edges(n, e);
}

}  // namespace

std::vector<Graph> all_graphs(int n) {
    if (n < 1 || n > 8) throw Error(ErrorKind::TooLarge, "exhaustive enumeration supports 1 <= n <= 8");
    // Every graph on k + 1 vertices is a graph on k vertices plus one vertex.
    std::set<std::uint32_t> level{0};
    for (int k = 1; k < n; ++k) {
        std::set<std::uint32_t> up;
        for (const std::uint32_t m : level)
            for (std::uint32_t s = 0; s < (1u << k); ++s) {
                std::uint32_t mm = m;
                for (int u = 0; u < k; ++u)
                    if (s >> u & 1) mm |= 1u << edge_bit(u, k);
                up.insert(canonical_mask(k + 1, mm));
            }
        level = std::move(up);
    }
    std::vector<Graph> out;
    out.reserve(level.size());
    for (const std::uint32_t m : level) out.push_back(graph_from_mask(n, m));
    return out;
}

}  // namespace nlb::graph
