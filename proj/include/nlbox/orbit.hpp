#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nlbox/box.hpp"
#include "nlbox/wiring.hpp"

namespace nlb {

struct OrbitLevel {
    int depth = 1;
    std::vector<Box> boxes;            // deduplicated (max-norm tolerance 1e-10)
    std::uint64_t count_before_dedup = 1;  // number of bracketings enumerated
};

inline constexpr int kMaxOrbitDepth = 14;
inline constexpr int kMaxTiltedDepth = 20;
inline constexpr double kDedupTol = 1e-10;

// All bracketings of k copies of p, level by level.
std::vector<OrbitLevel> orbit_levels(const Box& p, const Wiring& w, int k);
OrbitLevel orbit_depth(const Box& p, const Wiring& w, int k);

// Restricted recurrence T(k) = p x T(k-1)  U  T(k-1) x p.
OrbitLevel tilted_orbit(const Box& p, const Wiring& w, int k);

Box right_power(const Box& p, const Wiring& w, int k);

const Basis3& pr_sr_i_basis();
double convex_coords_c3(const Box& p);

// Box with the given (CHSH', CHSH) coordinates in the plane of PR, SR, I.
Box slice_box_from_chsh(double chsh_prime, double chsh);

struct OrbitWitness {
    int k = 1;
    Box box;
    bool from_right_power = true;
};
std::optional<OrbitWitness> orbit_collapse_search(const Box& p, const Wiring& w, int kmax);

bool triangle_table_certificate(const Wiring& w, const Box& q, const Box& r, double tol = 1e-10);
std::vector<std::pair<double, double>> triangle_affine_iteration(double alpha0, double beta0, int steps);

}  // namespace nlb
