#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlbox/box.hpp"

namespace nlb {

// Coordinates, in order:
//   f1(x,a2) at 0 + 2x + a2      g1(y,b2) at 4 + 2y + b2
//   f2(x,a1) at 8 + 2x + a1      g2(y,b1) at 12 + 2y + b1
//   f3(x,a1,a2) at 16 + 4x + 2a1 + a2
//   g3(y,b1,b2) at 24 + 4y + 2b1 + b2
// Alice feeds f1 into the first box and f2 into the second one and outputs
// a = f3; Bob does the same with g1, g2, g3.
struct Wiring {
    std::array<double, 32> w{};

    static constexpr int f1(int x, int a2) { return 2 * x + a2; }
    static constexpr int g1(int y, int b2) { return 4 + 2 * y + b2; }
    static constexpr int f2(int x, int a1) { return 8 + 2 * x + a1; }
    static constexpr int g2(int y, int b1) { return 12 + 2 * y + b1; }
    static constexpr int f3(int x, int a1, int a2) { return 16 + 4 * x + 2 * a1 + a2; }
    static constexpr int g3(int y, int b1, int b2) { return 24 + 4 * y + 2 * b1 + b2; }

    double& operator[](int i) { return w[i]; }
    double operator[](int i) const { return w[i]; }
    bool operator==(const Wiring& o) const = default;
};

// Human-readable description of coordinate i, e.g. "f3(x=1,a1=0,a2=1)".
std::string coordinate_label(int i);

ValidationReport validate_wiring(const Wiring& w, double tol = kExactTol);
Wiring project_wiring(const std::array<double, 32>& v);
bool is_deterministic(const Wiring& w);

enum class WiringName { Triv, Lin, Xor, BS, Dist, And, OrAnd };
Wiring named_wiring(WiringName name);
std::optional<WiringName> parse_wiring_name(const std::string& s);
std::string to_string(WiringName n);

// Both boxes used in parallel (f1 = f2 = x, g1 = g2 = y) with output
// tables fa[4x+2a1+a2] and gb[4y+2b1+b2].
Wiring parallel_wiring(const std::array<int, 8>& fa, const std::array<int, 8>& gb);

// Wired product p x_w q; validates both boxes (tol 1e-9) and the wiring.
Box box_product(const Box& p, const Box& q, const Wiring& w);
// Same sum without input validation; accepts affine boxes.
Box box_product_unchecked(const Box& p, const Box& q, const Wiring& w);

// Winning probability of game g on p x_w q; when grad is non-null it also
// receives the exact partial derivatives with respect to the 32 coordinates.
double product_value(const Box& p, const Box& q, const Wiring& w, Game g,
                     std::array<double, 32>* grad = nullptr);

std::vector<std::vector<Box>> multiplication_table(const Wiring& w, const std::vector<Box>& basis);

bool commutativity_symmetry_check(const Wiring& w, double tol = kExactTol);
bool associativity_check(const Wiring& w, double tol = kExactTol);

// Random NS boxes (convex mixtures of the 24 extreme points) for empirical checks.
Box random_ns_box(std::uint64_t seed, std::uint64_t stream);
bool empirical_commutative(const Wiring& w, int trials, std::uint64_t seed, double tol = 1e-10);
bool empirical_associative(const Wiring& w, int trials, std::uint64_t seed, double tol = 1e-10);

}  // namespace nlb
