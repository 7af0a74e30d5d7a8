#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "nlbox/orbit.hpp"

using namespace nlb;

namespace {

bool contains(const std::vector<Box>& s, const Box& b) {
    return std::any_of(s.begin(), s.end(), [&](const Box& x) { return max_abs_diff(x, b) <= kDedupTol; });
}

double max_chsh(const std::vector<Box>& s) {
    double m = 0;
    for (const auto& b : s) m = std::max(m, chsh_value(b));
    return m;
}

}  // namespace

TEST_SUITE("orbit") {

TEST_CASE("orbit levels") {
    const Wiring bs = named_wiring(WiringName::BS);
    const Box p = testutil::random_slice_box(1, 0);
    const auto l1 = orbit_depth(p, bs, 1);
    REQUIRE(l1.boxes.size() == 1);
    CHECK(l1.boxes[0] == p);
    const Box pp = box_product(p, p, bs);
    const auto l3 = orbit_depth(p, bs, 3);
    CHECK(l3.count_before_dedup == 2);
    CHECK(contains(l3.boxes, box_product(pp, p, bs)));
    CHECK(contains(l3.boxes, box_product(p, pp, bs)));
    CHECK(orbit_depth(p, bs, 4).count_before_dedup == 5);
    const std::uint64_t catalan[] = {1, 1, 2, 5, 14, 42, 132, 429};
    const auto levels = orbit_levels(p, bs, 8);
    REQUIRE(levels.size() == 8);
    for (int k = 1; k <= 8; ++k) CHECK(levels[k - 1].count_before_dedup == catalan[k - 1]);
    CHECK_THROWS_AS(orbit_depth(p, bs, kMaxOrbitDepth + 1), Error);
    CHECK_THROWS_AS(tilted_orbit(p, bs, kMaxTiltedDepth + 1), Error);
}

TEST_CASE("tilted orbit") {
    const Wiring bs = named_wiring(WiringName::BS);
    const Box p = testutil::random_slice_box(2, 0);
    const auto t2 = tilted_orbit(p, bs, 2);
    REQUIRE(t2.boxes.size() == 1);
    CHECK(max_abs_diff(t2.boxes[0], box_product(p, p, bs)) <= 1e-15);
    const auto t3 = tilted_orbit(p, bs, 3);
    const Box pp = box_product(p, p, bs);
    CHECK(contains(t3.boxes, box_product(pp, p, bs)));
    CHECK(contains(t3.boxes, box_product(p, pp, bs)));
    for (int k = 2; k <= 10; ++k) CHECK(tilted_orbit(p, bs, k).count_before_dedup == (1ull << (k - 1)));
    CHECK(right_power(p, bs, 1) == p);
    CHECK(max_abs_diff(right_power(p, bs, 3), box_product(pp, p, bs)) <= 1e-15);
}

TEST_CASE("c3 is multiplicative and orbits are aligned") {
    const Wiring bs = named_wiring(WiringName::BS);
    CHECK(std::abs(convex_coords_c3(make_pr())) <= 1e-12);
    CHECK(std::abs(convex_coords_c3(make_uniform()) - 1) <= 1e-12);
    for (int i = 0; i < 50; ++i) {
        const Box a = testutil::random_slice_box(3, i), b = testutil::random_slice_box(4, i);
        CHECK(std::abs((1 - convex_coords_c3(box_product(a, b, bs))) -
                       (1 - convex_coords_c3(a)) * (1 - convex_coords_c3(b))) <= 1e-12);
    }
    for (int i = 0; i < 10; ++i) {
        const Box p = testutil::random_slice_box(5, i);
        const double c3 = convex_coords_c3(p);
        double prev = -1;
        for (const auto& lvl : orbit_levels(p, bs, 7)) {
            const double expect = 1 - std::pow(1 - c3, lvl.depth);
            for (const auto& q : lvl.boxes) CHECK(std::abs(convex_coords_c3(q) - expect) <= 1e-10);
            if (c3 > 0) CHECK(expect > prev);
            prev = expect;
        }
    }
}

TEST_CASE("right power and the tilted maximum") {
    const Wiring bs = named_wiring(WiringName::BS);
    int distilling = 0;
    for (int i = 0; i < 100; ++i) {
        const Box p = testutil::random_slice_box(6, i);
        for (int k = 2; k <= 8; ++k) {
            // The (k-1)-orbit distills when every box in it beats P at CHSH.
            const auto prev = tilted_orbit(p, bs, k - 1).boxes;
            const bool distills =
                std::all_of(prev.begin(), prev.end(), [&](const Box& q) { return chsh_value(q) >= chsh_value(p); });
            if (!distills) continue;
            ++distilling;
            CHECK(std::abs(chsh_value(right_power(p, bs, k)) - max_chsh(tilted_orbit(p, bs, k).boxes)) <= 1e-10);
        }
    }
    CHECK(distilling > 0);
}

TEST_CASE("collapse witness search") {
    const Wiring bs = named_wiring(WiringName::BS);
    const auto pr = orbit_collapse_search(make_pr(), bs, 5);
    REQUIRE(pr);
    CHECK(pr->k == 1);
    const Box p = slice_box_from_chsh(0.627, 0.862);
    CHECK(std::abs(chsh_value(p) - 0.862) <= 1e-12);
    CHECK(std::abs(chsh_value(p, Game::CHSHPrime) - 0.627) <= 1e-12);
    const auto w = orbit_collapse_search(p, bs, 8);
    REQUIRE(w);
    // P^4 already clears the threshold, by about 3e-4.
    CHECK(w->k == 4);
    CHECK(chsh_value(w->box) > kCollapseThreshold);
    CHECK(chsh_value(right_power(p, bs, 3)) < kCollapseThreshold);
    const double c5 = chsh_value(right_power(p, bs, 5));
    CHECK(c5 >= 0.910);
    CHECK(c5 <= 0.916);
    CHECK_FALSE(orbit_collapse_search(make_uniform(), bs, 10));
}

TEST_CASE("triangle certificate") {
    CHECK(triangle_table_certificate(named_wiring(WiringName::BS), make_p00(), make_p11()));
    CHECK_FALSE(triangle_table_certificate(named_wiring(WiringName::Xor), make_p00(), make_p11()));
    CHECK_FALSE(triangle_table_certificate(named_wiring(WiringName::BS), make_uniform(), make_uniform()));
    for (const auto& [a, b] : triangle_affine_iteration(1, 0, 10)) {
        CHECK(a == 1.0);
        CHECK(b == 0.0);
    }
    const auto seq = triangle_affine_iteration(0.5, 0.25, 20);
    for (std::size_t k = 1; k < seq.size(); ++k) CHECK(seq[k].first >= seq[k - 1].first);
    CHECK(seq.back().first > 0.99);
    for (const auto& ab : triangle_affine_iteration(0, 0.5, 5)) CHECK(ab.first == 0.0);
    CHECK_THROWS_AS(triangle_affine_iteration(0.8, 0.5, 3), Error);
}

}
