#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "nlbox/optimizer.hpp"
#include "nlbox/orbit.hpp"

using namespace nlb;
using namespace nlb::opt;

namespace {

DescentConfig small_cfg(std::uint64_t seed) {
    DescentConfig c;
    c.replicas = 8;
    c.chi = 0.25;
    c.k_reset = 10;
    c.max_iters = 200;
    c.line_search_iters = 10;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("config validation") {
    DescentConfig c;
    CHECK_NOTHROW(c.validate());
    c.replicas = 100;
    CHECK_THROWS_AS(c.validate(), Error);  // chi * m < 1
    c = DescentConfig{};
    c.chi = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = DescentConfig{};
    c.learning_rate = -1;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("objective") {
    const Wiring bs = named_wiring(WiringName::BS);
    CHECK(objective(bs, make_pr(), make_pr()) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(objective(bs, make_uniform(), make_uniform()) == doctest::Approx(0.5).epsilon(1e-15));
    // Phi(W) = CHSH(q x_W p).
    const Box p = random_ns_box(1, 1), q = random_ns_box(1, 2);
    CHECK(std::abs(objective(bs, p, q) - chsh_value(box_product(q, p, bs))) <= 1e-14);
}

TEST_CASE("gradients") {
    for (int i = 0; i < 10; ++i) {
        const Box p = random_ns_box(2, i), q = random_ns_box(3, i);
        const Wiring w = testutil::random_wiring(4, i);
        const auto ga = gradient_analytic(w, p, q);
        const auto gf = gradient(w, p, q, 1e-6);
        const auto gg = gradient_fd(pair_objective(p, q), w, 1e-6);
        for (int k = 0; k < 32; ++k) {
            CHECK(std::abs(ga[k] - gf[k]) <= 1e-6);
            CHECK(std::abs(ga[k] - gg[k]) <= 1e-6);
        }
    }
    // Under W_triv the output ignores both boxes, so every partial of the
    // wiring's box-input coordinates vanishes.
    const auto g0 = gradient_analytic(named_wiring(WiringName::Triv), make_pr(), make_sr());
    for (int k = 0; k < 16; ++k) CHECK(std::abs(g0[k]) <= 1e-9);
}

TEST_CASE("projected gradient descent") {
    const Box p = 0.39 * make_pr() + 0.6 * make_sr() + 0.01 * make_uniform();
    const auto c = small_cfg(7);
    const Wiring a = projected_gradient_descent(c, p, p, 3);
    const Wiring b = projected_gradient_descent(c, p, p, 3);
    CHECK(a == b);
    CHECK(validate_wiring(a, 0.0).ok);
    const auto r1 = pgd_replicas(c, pair_objective(p, p));
    auto c4 = c;
    c4.threads = 4;
    const auto r4 = pgd_replicas(c4, pair_objective(p, p));
    REQUIRE(r1.replicas.size() == r4.replicas.size());
    for (std::size_t i = 0; i < r1.replicas.size(); ++i) {
        CHECK(r1.replicas[i].w == r4.replicas[i].w);
        CHECK(r1.replicas[i].value == r4.replicas[i].value);
        CHECK(validate_wiring(r1.replicas[i].w, 0.0).ok);
    }
}

TEST_CASE("line search with resets") {
    const Box p = 0.39 * make_pr() + 0.6 * make_sr() + 0.01 * make_uniform();
    const auto c = small_cfg(11);
    const auto a = line_search_with_resets(c, p, p);
    auto c3 = c;
    c3.threads = 3;
    const auto b = line_search_with_resets(c3, p, p);
    REQUIRE(a.replicas.size() == 8);
    for (std::size_t i = 0; i < a.replicas.size(); ++i) {
        CHECK(a.replicas[i].w == b.replicas[i].w);
        CHECK(a.replicas[i].value == b.replicas[i].value);
        CHECK(validate_wiring(a.replicas[i].w, 0.0).ok);
        CHECK(std::abs(a.replicas[i].value - objective(a.replicas[i].w, p, p)) <= 1e-12);
    }
    CHECK(a.round_best.size() == 4);
    for (std::size_t k = 1; k < a.round_best.size(); ++k) CHECK(a.round_best[k] >= a.round_best[k - 1]);
    double top = 0;
    for (const auto& r : a.replicas) top = std::max(top, r.value);
    CHECK(a.best().value == top);
    CHECK(a.round_best.back() == top);
    CHECK(top > 0.5);

    auto c1 = c;
    c1.chi = 1.0;
    c1.replicas = 2;
    const auto one = line_search_with_resets(c1, p, p);
    CHECK(one.round_best.size() == 1);
}

TEST_CASE("task A and task B") {
    auto c = small_cfg(5);
    const auto pr = task_a_adaptive(make_pr(), 3, c);
    REQUIRE(pr);
    CHECK(pr->wirings.size() == 1);
    CHECK_FALSE(task_a_adaptive(make_uniform(), 2, c));
    const auto prb = task_b_constant(make_pr(), 3, 1, c);
    REQUIRE(prb);
    CHECK(prb->winning_power == 1);
    CHECK_FALSE(task_b_constant(make_uniform(), 3, 1, c));

    c.replicas = 40;
    c.chi = 0.05;
    const Box w = slice_box_from_chsh(0.627, 0.862);
    const auto ta = task_a_adaptive(w, 5, c);
    REQUIRE(ta);
    CHECK(ta->wirings.size() <= 5);
    CHECK(ta->chsh.back() > kCollapseThreshold);
    for (const auto& wi : ta->wirings) CHECK(validate_wiring(wi, 0.0).ok);
}

TEST_CASE("analytic scan") {
    const Basis3 basis{make_pr(), make_sr(), make_uniform()};
    const auto pts = slice_scan(basis, 40, ScanMethod::Analytic, DescentConfig{});
    CHECK(pts.size() == 41 * 42 / 2);
    for (const auto& s : pts) {
        CHECK(s.c1 >= 0);
        CHECK(s.c2 >= 0);
        CHECK(s.c3 >= -1e-15);
        const Box b = s.c1 * basis[0] + s.c2 * basis[1] + s.c3 * basis[2];
        if (chsh_value(b) > kCollapseThreshold) CHECK(s.label == "collapsing");
    }
    const Basis3 odd{make_pr(), make_p00(), 3.0 * make_uniform() - 2.0 * make_pr()};
    const auto pts2 = slice_scan(odd, 10, ScanMethod::Analytic, DescentConfig{});
    CHECK(std::any_of(pts2.begin(), pts2.end(), [](const ScanPoint& s) { return s.label == "not-ns"; }));
    CHECK(parse_scan_method("taskB") == ScanMethod::TaskB);
    CHECK_FALSE(parse_scan_method("nope"));
}

TEST_CASE("analytic verdict uses relabelings") {
    // PR' collapses only after relabeling x -> x + 1.
    const auto v = analytic_collapse(make_pr_prime());
    CHECK(v.collapsing);
    CHECK(collapse_criterion(make_pr_prime()).A + collapse_criterion(make_pr_prime()).B < 24);
    CHECK_FALSE(analytic_collapse(make_sr()).collapsing);
}

}
