#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlbox/common.hpp"

namespace nlb {

// A conditional distribution P(a,b|x,y) of the two-party, two-input,
// two-output scenario. Entries are flattened as index(a,b,x,y) = 8a+4b+2x+y.
struct Box {
    std::array<double, 16> p{};

    static constexpr int index(int a, int b, int x, int y) { return 8 * a + 4 * b + 2 * x + y; }

    double operator()(int a, int b, int x, int y) const { return p[index(a, b, x, y)]; }
    double& operator()(int a, int b, int x, int y) { return p[index(a, b, x, y)]; }

    Box& operator+=(const Box& o);
    Box& operator-=(const Box& o);
    Box& operator*=(double s);

    bool operator==(const Box& o) const = default;
};

Box operator+(Box lhs, const Box& rhs);
Box operator-(Box lhs, const Box& rhs);
Box operator*(double s, Box b);

double max_abs_diff(const Box& lhs, const Box& rhs);

enum class BoxKind { PR, PRPrime, SR, I, P00, P11, Local, Nonlocal };

struct BoxName {
    BoxKind kind = BoxKind::PR;
    // Local: (alpha, beta, gamma, delta) with a = alpha x + beta, b = gamma y + delta.
    // Nonlocal: (alpha, beta, gamma) with a + b = xy + alpha x + beta y + gamma.
    std::array<int, 4> params{};
};

Box make_named_box(const BoxName& name);
Box make_pr();
Box make_pr_prime();
Box make_sr();
Box make_uniform();
Box make_p00();
Box make_p11();
Box make_local(int alpha, int beta, int gamma, int delta);
Box make_nonlocal(int alpha, int beta, int gamma);

// Parses names such as "PR", "PR'", "SR", "I", "P00", "P11", "PL0101", "PNL011".
std::optional<BoxName> parse_box_name(const std::string& s);

ValidationReport validate_ns(const Box& b, double tol = kExactTol);

enum class Game { CHSH, CHSHPrime, CHSHSecond };

// Right-hand side of the winning predicate a + b = f(x,y) mod 2.
int game_predicate(Game g, int x, int y);

double chsh_value(const Box& b, Game g = Game::CHSH);
double bias(const Box& b, int x, int y);

Box uniformize(const Box& b);
Box mix(const std::vector<std::pair<double, Box>>& terms, double tol = 1e-9);

struct LocalityResult {
    bool local = false;
    // Weight on make_local(alpha,beta,gamma,delta) at index 8alpha+4beta+2gamma+delta.
    std::optional<std::array<double, 16>> weights;
};
LocalityResult is_local(const Box& b, double tol = 1e-9);
Box local_deterministic(int k);

struct CollapseReport {
    double A = 0.0;
    double B = 0.0;
    bool satisfied = false;
    std::optional<double> mu_star;
    std::optional<double> mu_max;
};
CollapseReport collapse_criterion(const Box& b);

// mu_{k+1} = mu_k / 16 * (A + B - mu_k^2 (A - B)).
std::vector<double> iterate_bias(const Box& b, double mu0, int steps);

using Basis3 = std::array<Box, 3>;
std::array<double, 3> slice_coordinates(const Box& b, const Basis3& basis, double tol = 1e-9);

// Coefficients of b in the linear span of basis (least squares, residual checked).
std::vector<double> span_coordinates(const Box& b, const std::vector<Box>& basis, double tol = 1e-9);

// Local relabelings x -> x+s, y -> y+t, a -> a + u x + v, b -> b + w y + z.
Box relabel(const Box& b, int s, int t, int u, int v, int w, int z);

}  // namespace nlb
