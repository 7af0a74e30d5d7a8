#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlbox/box.hpp"
#include "nlbox/common.hpp"

namespace nlb::graph {

struct Graph {
    int n = 0;
    std::vector<std::vector<int>> adj;  // symmetric 0/1, zero diagonal

    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);
    bool edge(int u, int v) const { return adj[u][v] != 0; }
    int edge_count() const;
    int degree(int v) const;
};

void validate_graph(const Graph& g);

Graph cycle(int n);
Graph complete(int n);
Graph path(int n);
Graph petersen();
Graph disjoint_union(const Graph& a, const Graph& b);
Graph complement(const Graph& g);

// Distances are BFS-exact; unreachable pairs hold kInf (strictly larger than any n).
inline constexpr int kInf = std::numeric_limits<int>::max() / 4;
std::vector<std::vector<int>> distance_matrix(const Graph& g);
int diameter(const Graph& g);  // largest finite distance
Eigen::MatrixXd t_adjacency(const Graph& g, int t);
// Same matrix through the Hadamard-power recursion over A^t.
Eigen::MatrixXd t_adjacency_recursive(const Graph& g, int t);
std::vector<std::vector<int>> components(const Graph& g);

struct PartitionParams {
    int k = 0;
    std::vector<int> sizes;                        // n_i
    std::vector<std::vector<std::vector<int>>> c;  // c[t][i][j], t = 0..D
    std::vector<std::vector<int>> cbar;            // n_j - sum_t c[t][i][j]
};

struct CommonPartition {
    PartitionParams params;
    std::vector<int> cell_g;  // cell index of each vertex of G
    std::vector<int> cell_h;  // cell index of each vertex of H
};

std::optional<CommonPartition> common_equitable_partition(const Graph& g, const Graph& h, int d);
// Block-constant bistochastic u with u(h, g) = 1/n_i when both lie in cell i.
Eigen::MatrixXd partition_witness(const CommonPartition& cp);
// Max-norm of u A_G^(t) - A_H^(t) u over t = 0..d.
double intertwining_residual(const Eigen::MatrixXd& u, const Graph& g, const Graph& h, int d);
bool d_fractionally_isomorphic(const Graph& g, const Graph& h, int d);
// Independent oracle: LP feasibility of the bistochastic intertwining system.
bool lp_fractionally_isomorphic(const Graph& g, const Graph& h, int d);

// Conditional distribution P(yA, yB | xA, xB) with n_in questions and n_out answers per player.
struct NSStrategy {
    int n_in = 0;
    int n_out = 0;
    std::vector<double> table;

    NSStrategy() = default;
    NSStrategy(int in, int out);
    std::size_t index(int ya, int yb, int xa, int xb) const {
        return ((static_cast<std::size_t>(xa) * n_in + xb) * n_out + ya) * n_out + yb;
    }
    double operator()(int ya, int yb, int xa, int xb) const { return table[index(ya, yb, xa, xb)]; }
    double& operator()(int ya, int yb, int xa, int xb) { return table[index(ya, yb, xa, xb)]; }
};

// D-distance game on V = V(G) + V(H): G vertices are 0..n_G-1, H vertices follow.
struct DistanceGame {
    Graph g, h;
    int d = 1;
    std::vector<std::vector<int>> dist_g, dist_h;

    DistanceGame(Graph g_, Graph h_, int d_);
    int n_total() const { return g.n + h.n; }
    bool in_g(int v) const { return v < g.n; }
    bool wins(int ya, int yb, int xa, int xb) const;
};

// Homomorphism game G -> H: questions in V(G), answers in V(H).
struct HomomorphismGame {
    Graph g, h;
    bool wins(int ya, int yb, int xa, int xb) const;
};

ValidationReport validate_ns_strategy(const NSStrategy& s, double tol = kExactTol);
ValidationReport validate_strategy(const NSStrategy& s, const DistanceGame& game, double tol = kExactTol);
ValidationReport validate_strategy(const NSStrategy& s, const HomomorphismGame& game, double tol = kExactTol);

NSStrategy build_perfect_strategy(const DistanceGame& game, const std::optional<CommonPartition>& cp);

// Split of H into H1 (side 0) and H2 (side 1), whole components per side.
std::vector<int> component_split(const Graph& h);
bool hypothesis_H(const CommonPartition& cp, const std::vector<int>& side);

struct SymmetricParams {
    double eta = 0.0;
    std::array<std::array<double, 3>, 3> nu{};  // nu[a][b] for path vertices (g1, g2, g3)
};
SymmetricParams symmetric_params(const NSStrategy& s, const DistanceGame& game, const std::vector<int>& side,
                                 const std::array<int, 3>& path, double tol = 1e-12);

struct SimulatedBox {
    Box box;
    double alpha = 0.0;
    double beta = 0.0;
};
// Isomorphism-game protocol: Alice asks g2 (x=0) or g1 (x=1), Bob asks g2 (y=0) or g3 (y=1);
// each outputs 0 iff the answer lies in H1.
SimulatedBox pr_from_isomorphism(const NSStrategy& s, const DistanceGame& game, const std::array<int, 3>& path,
                                 const std::vector<int>& side, double tol = 1e-12);
// A path g1 - g2 - g3 with d(g1, g3) = 2, or nullopt if diam(G) < 2.
std::optional<std::array<int, 3>> find_path3(const Graph& g);

NSStrategy coloring_game_box(int m, int n);
// Colouring-game protocol over a K3 -> K2 strategy, without the perfectness check.
Box simulate_coloring_protocol(const NSStrategy& s);
Box pr_from_coloring(const NSStrategy& s, double tol = 1e-12);

using Permutation = std::vector<int>;
std::vector<Permutation> automorphisms(const Graph& g);

struct TransitivityConstants {
    long long d1 = 0, d2 = 0, d3 = 0;  // 0 marks a vacuous condition (no edges / no non-edges)
    long long group_order = 0;
};
std::optional<TransitivityConstants> strong_transitivity(const Graph& g);
bool distance_transitive(const Graph& g);

// Average over automorphisms of H acting on the H part of questions and answers.
NSStrategy symmetrize_strategy(const NSStrategy& s, const DistanceGame& game, const std::vector<Permutation>& auts);

struct CycleCounterexample {
    Graph g, h;
    Eigen::MatrixXd u;
};
CycleCounterexample cycle_counterexample(int d);

// Every graph on n vertices up to isomorphism (n <= 8), in canonical form.
std::vector<Graph> all_graphs(int n);

}  // namespace nlb::graph
