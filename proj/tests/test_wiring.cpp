#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nlbox/box.hpp"
#include "nlbox/rng.hpp"
#include "nlbox/wiring.hpp"

using namespace nlb;

namespace {

std::array<int, 8> table_of(int (*f)(int, int)) {
    std::array<int, 8> t{};
    for (int x = 0; x < 2; ++x)
        for (int a1 = 0; a1 < 2; ++a1)
            for (int a2 = 0; a2 < 2; ++a2) t[4 * x + 2 * a1 + a2] = f(a1, a2);
    return t;
}

}  // namespace

TEST_SUITE("wiring") {

TEST_CASE("validation") {
    for (auto n : {WiringName::Triv, WiringName::Lin, WiringName::Xor, WiringName::BS, WiringName::Dist,
                   WiringName::And, WiringName::OrAnd}) {
        const Wiring w = named_wiring(n);
        CHECK(validate_wiring(w).ok);
        CHECK(is_deterministic(w));
        CHECK(parse_wiring_name(to_string(n)) == n);
    }
    CHECK(validate_wiring(Wiring{}).ok);
    Wiring bad;
    bad[Wiring::f1(0, 0)] = 1;
    bad[Wiring::f2(0, 0)] = 1;
    const auto rep = validate_wiring(bad);
    CHECK_FALSE(rep.ok);
    Wiring range;
    range[20] = 1.5;
    CHECK_FALSE(validate_wiring(range).ok);
}

TEST_CASE("projection") {
    const Wiring bs = named_wiring(WiringName::BS);
    CHECK(project_wiring(bs.w) == bs);

    std::array<double, 32> v{};
    v[Wiring::f1(0, 0)] = 0.2;
    v[Wiring::f1(0, 1)] = 0.8;
    v[Wiring::f2(0, 0)] = 0.1;
    v[Wiring::f2(0, 1)] = 0.3;
    const Wiring p = project_wiring(v);
    CHECK(p[Wiring::f1(0, 0)] == 0.2);
    CHECK(p[Wiring::f1(0, 1)] == 0.8);
    CHECK(std::abs(p[Wiring::f2(0, 0)] - 0.2) <= 1e-15);
    CHECK(std::abs(p[Wiring::f2(0, 1)] - 0.2) <= 1e-15);

    std::array<double, 32> c{};
    c[Wiring::f3(1, 1, 1)] = 1.7;
    c[Wiring::g3(0, 0, 0)] = -0.4;
    const Wiring pc = project_wiring(c);
    CHECK(pc[Wiring::f3(1, 1, 1)] == 1.0);
    CHECK(pc[Wiring::g3(0, 0, 0)] == 0.0);

    // Ties average f1.
    std::array<double, 32> t{};
    t[Wiring::f1(1, 0)] = 0.0;
    t[Wiring::f1(1, 1)] = 0.4;
    t[Wiring::f2(1, 0)] = 0.6;
    t[Wiring::f2(1, 1)] = 1.0;
    const Wiring pt = project_wiring(t);
    CHECK(std::abs(pt[Wiring::f1(1, 0)] - 0.2) <= 1e-15);
    CHECK(pt[Wiring::f2(1, 1)] == 1.0);
}

TEST_CASE("projection is idempotent and feasible") {
    for (int i = 0; i < 1000; ++i) {
        CounterRng r(5, i);
        std::array<double, 32> v{};
        for (double& x : v) x = 3 * r.uniform() - 1;
        const Wiring w = project_wiring(v);
        CHECK(validate_wiring(w, 0.0).ok);
        CHECK(project_wiring(w.w) == w);
    }
}

TEST_CASE("named wiring semantics") {
    for (int i = 0; i < 20; ++i) {
        const Box p = random_ns_box(3, i), q = random_ns_box(4, i);
        // W_xor: outputs are the parities of the two boxes' outputs.
        const Box x = box_product(p, q, named_wiring(WiringName::Xor));
        Box ref;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int xx = 0; xx < 2; ++xx)
                    for (int y = 0; y < 2; ++y) {
                        double s = 0;
                        for (int a1 = 0; a1 < 2; ++a1)
                            for (int b1 = 0; b1 < 2; ++b1) s += p(a1, b1, xx, y) * q(a ^ a1, b ^ b1, xx, y);
                        ref(a, b, xx, y) = s;
                    }
        CHECK(max_abs_diff(x, ref) <= 1e-15);
        // W_triv: (a, b) = (x, y).
        const Box t = box_product(p, q, named_wiring(WiringName::Triv));
        for (int xx = 0; xx < 2; ++xx)
            for (int y = 0; y < 2; ++y) CHECK(std::abs(t(xx, y, xx, y) - 1.0) <= 1e-15);
    }
}

TEST_CASE("W_BS products") {
    const Wiring bs = named_wiring(WiringName::BS);
    const Box pr = make_pr(), p00 = make_p00(), p11 = make_p11(), I = make_uniform();
    CHECK(max_abs_diff(box_product(pr, pr, bs), pr) <= 1e-12);
    CHECK(max_abs_diff(box_product(p00, pr, bs), 0.5 * p00 + 0.5 * p11) <= 1e-12);
    const Box q1 = 0.25 * pr - 0.125 * p00 - 0.125 * p11 + I;
    CHECK(max_abs_diff(box_product(I, pr, bs), q1) <= 1e-12);

    const std::vector<Box> basis{pr, p00, p11, I};
    const std::vector<std::vector<Box>> expected{{pr, pr, pr, I},
                                                 {0.5 * p00 + 0.5 * p11, p00, p11, I},
                                                 {pr, p11, p00, I},
                                                 {q1, I, I, I}};
    const auto tab = multiplication_table(bs, basis);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(max_abs_diff(tab[i][j], expected[i][j]) <= 1e-12);

    for (int i = 0; i < 1000; ++i) {
        const Box p = random_ns_box(8, i);
        CHECK(max_abs_diff(box_product(p, p00, bs), p) <= 1e-12);
        CHECK(max_abs_diff(box_product(p, I, bs), I) <= 1e-12);
    }
}

TEST_CASE("product errors") {
    Box bad = make_pr();
    bad.p[0] = 0.9;
    CHECK_THROWS_AS(box_product(bad, make_pr(), named_wiring(WiringName::BS)), Error);
    Wiring w;
    w[Wiring::f1(0, 0)] = 1;
    w[Wiring::f2(0, 0)] = 1;
    try {
        box_product(make_pr(), make_pr(), w);
        FAIL("expected InvalidWiring");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidWiring);
    }
}

TEST_CASE("bilinearity and NS closure") {
    for (int i = 0; i < 1000; ++i) {
        const Box p1 = random_ns_box(1, i), p2 = random_ns_box(2, i), q = random_ns_box(3, i);
        const Wiring w = testutil::random_wiring(4, i);
        const double al = CounterRng(5, i).uniform();
        const Box lhs = box_product(al * p1 + (1 - al) * p2, q, w);
        const Box rhs = al * box_product(p1, q, w) + (1 - al) * box_product(p2, q, w);
        CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
        const Box lhs2 = box_product(q, al * p1 + (1 - al) * p2, w);
        const Box rhs2 = al * box_product(q, p1, w) + (1 - al) * box_product(q, p2, w);
        CHECK(max_abs_diff(lhs2, rhs2) <= 1e-12);
        CHECK(validate_ns(box_product(p1, q, w), 1e-10).ok);
    }
}

TEST_CASE("mixed wiring equals the expectation over deterministic ones") {
    for (int trial = 0; trial < 30; ++trial) {
        CounterRng r(17, trial);
        Wiring w;
        // One function of each party's input pair ignores the other box's output,
        // so every completion of the half coordinates stays non-cyclic.
        std::vector<int> halves;
        const bool alice_f1_const = r.below(2), bob_g1_const = r.below(2);
        for (int x = 0; x < 2; ++x) {
            const double c = static_cast<double>(r.below(2));
            for (int u = 0; u < 2; ++u) {
                w[alice_f1_const ? Wiring::f1(x, u) : Wiring::f2(x, u)] = c;
                w[alice_f1_const ? Wiring::f2(x, u) : Wiring::f1(x, u)] = static_cast<double>(r.below(2));
            }
            const double d = static_cast<double>(r.below(2));
            for (int u = 0; u < 2; ++u) {
                w[bob_g1_const ? Wiring::g1(x, u) : Wiring::g2(x, u)] = d;
                w[bob_g1_const ? Wiring::g2(x, u) : Wiring::g1(x, u)] = static_cast<double>(r.below(2));
            }
        }
        for (int i = 16; i < 32; ++i) w[i] = static_cast<double>(r.below(2));
        for (int f = 0; f < 2; ++f) {
            const int base = alice_f1_const ? 8 : 0;  // the free one of f1/f2
            halves.push_back(base + static_cast<int>(r.below(4)));
            const int gbase = bob_g1_const ? 12 : 4;
            halves.push_back(gbase + static_cast<int>(r.below(4)));
        }
        for (int k = 0; k < 4; ++k) halves.push_back(16 + static_cast<int>(r.below(16)));
        std::sort(halves.begin(), halves.end());
        halves.erase(std::unique(halves.begin(), halves.end()), halves.end());
        for (int i : halves) w[i] = 0.5;
        REQUIRE(validate_wiring(w).ok);

        const Box p = random_ns_box(18, trial), q = random_ns_box(19, trial);
        Box expect;
        const int m = static_cast<int>(halves.size());
        for (int mask = 0; mask < (1 << m); ++mask) {
            Wiring d = w;
            for (int b = 0; b < m; ++b) d[halves[b]] = (mask >> b) & 1;
            REQUIRE(validate_wiring(d).ok);
            expect += (1.0 / (1 << m)) * box_product(p, q, d);
        }
        CHECK(max_abs_diff(box_product(p, q, w), expect) <= 1e-12);
    }
}

TEST_CASE("commutativity and associativity predicates") {
    const Wiring xorw = named_wiring(WiringName::Xor);
    const Wiring andw = named_wiring(WiringName::And);
    CHECK(commutativity_symmetry_check(xorw));
    CHECK(commutativity_symmetry_check(andw));
    CHECK(associativity_check(xorw));

    auto first = [](int a1, int) { return a1; };
    auto nand = [](int a1, int a2) { return (a1 & a2) ^ 1; };
    const Wiring wp = parallel_wiring(table_of(first), table_of(first));
    const Wiring wpp = parallel_wiring(table_of(nand), table_of(nand));
    CHECK_FALSE(commutativity_symmetry_check(wp));
    CHECK(associativity_check(wp));
    CHECK(commutativity_symmetry_check(wpp));
    CHECK_FALSE(associativity_check(wpp));

    const Wiring bs = named_wiring(WiringName::BS);
    try {
        associativity_check(bs);
        FAIL("expected UnsupportedClass");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedClass);
    }
    CHECK_FALSE(empirical_associative(bs, 50, 1));
    CHECK_FALSE(empirical_commutative(bs, 50, 1));
    const Box p00 = make_p00(), p11 = make_p11(), pr = make_pr();
    CHECK(max_abs_diff(box_product(box_product(p00, p11, bs), pr, bs), box_product(p00, box_product(p11, pr, bs), bs)) >
          0.1);

    // Predicate answers agree with the empirical checks on every parallel wiring
    // with identity inputs.
    for (int code = 0; code < 256; code += 7) {
        std::array<int, 8> fa{}, gb{};
        for (int i = 0; i < 8; ++i) fa[i] = gb[i] = (code >> (i % 8)) & 1;
        const Wiring w = parallel_wiring(fa, gb);
        CHECK(commutativity_symmetry_check(w) == empirical_commutative(w, 30, code));
        CHECK(associativity_check(w) == empirical_associative(w, 30, code));
    }
}

TEST_CASE("analytic gradient matches finite differences") {
    for (int i = 0; i < 20; ++i) {
        const Box p = random_ns_box(61, i), q = random_ns_box(62, i);
        const Wiring w = testutil::random_wiring(63, i);
        std::array<double, 32> g{};
        const double v = product_value(p, q, w, Game::CHSH, &g);
        CHECK(v == doctest::Approx(chsh_value(box_product(p, q, w))).epsilon(1e-12));
        for (int k = 0; k < 32; ++k) {
            Wiring a = w, b = w;
            a[k] += 1e-6;
            b[k] -= 1e-6;
            const double fd = (product_value(p, q, a, Game::CHSH) - product_value(p, q, b, Game::CHSH)) / 2e-6;
            CHECK(std::abs(fd - g[k]) <= 1e-6);
        }
    }
}

}
