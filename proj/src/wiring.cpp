#include "nlbox/wiring.hpp"

#include <algorithm>
#include <cmath>

#include "nlbox/rng.hpp"

namespace nlb {

std::string coordinate_label(int i) {
    auto two = [](const char* f, const char* v, const char* u, int k) {
        return std::string(f) + "(" + v + "=" + std::to_string(k >> 1) + "," + u + "=" + std::to_string(k & 1) + ")";
    };
    auto three = [](const char* f, const char* v, const char* u1, const char* u2, int k) {
        return std::string(f) + "(" + v + "=" + std::to_string(k >> 2) + "," + u1 + "=" + std::to_string((k >> 1) & 1) +
               "," + u2 + "=" + std::to_string(k & 1) + ")";
    };
    if (i < 4) return two("f1", "x", "a2", i);
    if (i < 8) return two("g1", "y", "b2", i - 4);
    if (i < 12) return two("f2", "x", "a1", i - 8);
    if (i < 16) return two("g2", "y", "b1", i - 12);
    if (i < 24) return three("f3", "x", "a1", "a2", i - 16);
    return three("g3", "y", "b1", "b2", i - 24);
}

ValidationReport validate_wiring(const Wiring& w, double tol) {
    ValidationReport rep;
    double range = 0.0;
    for (double v : w.w) range = std::max({range, -v, v - 1.0});
    rep.check("range", range, tol);
    for (int x = 0; x < 2; ++x) {
        const double r = std::abs((w[Wiring::f1(x, 0)] - w[Wiring::f1(x, 1)]) * (w[Wiring::f2(x, 0)] - w[Wiring::f2(x, 1)]));
        rep.check("non-cyclicity x=" + std::to_string(x), r, tol);
    }
    for (int y = 0; y < 2; ++y) {
        const double r = std::abs((w[Wiring::g1(y, 0)] - w[Wiring::g1(y, 1)]) * (w[Wiring::g2(y, 0)] - w[Wiring::g2(y, 1)]));
        rep.check("non-cyclicity y=" + std::to_string(y), r, tol);
    }
    return rep;
}

Wiring project_wiring(const std::array<double, 32>& v) {
    Wiring w;
    for (int i = 0; i < 32; ++i) w[i] = std::min(std::max(v[i], 0.0), 1.0);
    auto fix = [&](int i0, int i1, int j0, int j1) {
        if (std::abs(w[i0] - w[i1]) <= std::abs(w[j0] - w[j1])) {
            const double m = 0.5 * (w[i0] + w[i1]);
            w[i0] = w[i1] = m;
        } else {
            const double m = 0.5 * (w[j0] + w[j1]);
            w[j0] = w[j1] = m;
        }
    };
    for (int x = 0; x < 2; ++x) fix(Wiring::f1(x, 0), Wiring::f1(x, 1), Wiring::f2(x, 0), Wiring::f2(x, 1));
    for (int y = 0; y < 2; ++y) fix(Wiring::g1(y, 0), Wiring::g1(y, 1), Wiring::g2(y, 0), Wiring::g2(y, 1));
    return w;
}

bool is_deterministic(const Wiring& w) {
    return std::all_of(w.w.begin(), w.w.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

namespace {

// Wiring from Boolean rules; the same rule shape is used for both parties.
template <class In1, class In2, class Out>
Wiring from_rules(In1 in1, In2 in2, Out out) {
    Wiring w;
    for (int x = 0; x < 2; ++x)
        for (int u = 0; u < 2; ++u) {
            w[Wiring::f1(x, u)] = w[Wiring::g1(x, u)] = in1(x, u);
            w[Wiring::f2(x, u)] = w[Wiring::g2(x, u)] = in2(x, u);
        }
    for (int x = 0; x < 2; ++x)
        for (int a1 = 0; a1 < 2; ++a1)
            for (int a2 = 0; a2 < 2; ++a2) w[Wiring::f3(x, a1, a2)] = w[Wiring::g3(x, a1, a2)] = out(x, a1, a2);
    return w;
}

}  // namespace

Wiring parallel_wiring(const std::array<int, 8>& fa, const std::array<int, 8>& gb) {
    Wiring w;
    for (int x = 0; x < 2; ++x)
        for (int u = 0; u < 2; ++u) {
            w[Wiring::f1(x, u)] = w[Wiring::f2(x, u)] = x;
            w[Wiring::g1(x, u)] = w[Wiring::g2(x, u)] = x;
        }
    for (int k = 0; k < 8; ++k) {
        w[16 + k] = fa[k];
        w[24 + k] = gb[k];
    }
    return w;
}

Wiring named_wiring(WiringName name) {
    auto id = [](int x, int) { return x; };
    switch (name) {
        case WiringName::Triv:
            return from_rules(id, id, [](int x, int, int) { return x; });
        case WiringName::Lin:
            return from_rules(id, [](int, int u) { return u; }, [](int, int, int a2) { return a2; });
        case WiringName::Xor:
            return from_rules(id, id, [](int, int a1, int a2) { return a1 ^ a2; });
        case WiringName::BS:
            return from_rules(id, [](int x, int u) { return x * u; }, [](int, int a1, int a2) { return a1 ^ a2; });
        case WiringName::And:
            return from_rules(id, id, [](int, int a1, int a2) { return a1 & a2; });
        case WiringName::OrAnd: {
            Wiring w = from_rules(id, id, [](int, int a1, int a2) { return a1 | a2; });
            for (int y = 0; y < 2; ++y)
                for (int b1 = 0; b1 < 2; ++b1)
                    for (int b2 = 0; b2 < 2; ++b2) w[Wiring::g3(y, b1, b2)] = b1 & b2;
            return w;
        }
        case WiringName::Dist: {
            // Alice: x a2 | x !a1 | !x a2 a1. Bob's formula is the same shape.
            return from_rules(id, id, [](int x, int a1, int a2) {
                const int nx = x ^ 1;
                return (x & a2) | (x & (a1 ^ 1)) | (nx & a2 & a1);
            });
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown wiring");
}

std::optional<WiringName> parse_wiring_name(const std::string& s) {
    static const std::pair<const char*, WiringName> names[] = {
        {"W_triv", WiringName::Triv}, {"W_lin", WiringName::Lin}, {"W_xor", WiringName::Xor},
        {"W_BS", WiringName::BS},     {"W_dist", WiringName::Dist}, {"W_and", WiringName::And},
        {"W_or_and", WiringName::OrAnd}};
    for (const auto& [n, v] : names)
        if (s == n) return v;
    return std::nullopt;
}

std::string to_string(WiringName n) {
    switch (n) {
        case WiringName::Triv: return "W_triv";
        case WiringName::Lin: return "W_lin";
        case WiringName::Xor: return "W_xor";
        case WiringName::BS: return "W_BS";
        case WiringName::Dist: return "W_dist";
        case WiringName::And: return "W_and";
        case WiringName::OrAnd: return "W_or_and";
    }
    return "?";
}

namespace {

// Box evaluated at real-valued inputs (alpha, beta) by bilinear interpolation.
inline double interp(const Box& p, int a, int b, double al, double be) {
    return (1 - al) * (1 - be) * p(a, b, 0, 0) + (1 - al) * be * p(a, b, 0, 1) + al * (1 - be) * p(a, b, 1, 0) +
           al * be * p(a, b, 1, 1);
}

}  // namespace

Box box_product_unchecked(const Box& p, const Box& q, const Wiring& w) {
    Box r;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a1 = 0; a1 < 2; ++a1)
                for (int a2 = 0; a2 < 2; ++a2)
                    for (int b1 = 0; b1 < 2; ++b1)
                        for (int b2 = 0; b2 < 2; ++b2) {
                            const double pp = interp(p, a1, b1, w[Wiring::f1(x, a2)], w[Wiring::g1(y, b2)]);
                            const double qq = interp(q, a2, b2, w[Wiring::f2(x, a1)], w[Wiring::g2(y, b1)]);
                            const double t = pp * qq;
                            if (t == 0.0) continue;
                            const double f = w[Wiring::f3(x, a1, a2)];
                            const double g = w[Wiring::g3(y, b1, b2)];
                            r(0, 0, x, y) += t * (1 - f) * (1 - g);
                            r(0, 1, x, y) += t * (1 - f) * g;
                            r(1, 0, x, y) += t * f * (1 - g);
                            r(1, 1, x, y) += t * f * g;
                        }
    return r;
}

Box box_product(const Box& p, const Box& q, const Wiring& w) {
    const auto vw = validate_wiring(w, kComputedTol);
    if (!vw.ok) throw Error(ErrorKind::InvalidWiring, vw.summary());
    const auto vp = validate_ns(p, kComputedTol);
    if (!vp.ok) throw Error(ErrorKind::InvalidBox, "left factor: " + vp.summary());
    const auto vq = validate_ns(q, kComputedTol);
    if (!vq.ok) throw Error(ErrorKind::InvalidBox, "right factor: " + vq.summary());
    return box_product_unchecked(p, q, w);
}

double product_value(const Box& p, const Box& q, const Wiring& w, Game game, std::array<double, 32>* grad) {
    double val = 0.0;
    if (grad) grad->fill(0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const bool flip = game_predicate(game, x, y) == 1;
            for (int a1 = 0; a1 < 2; ++a1)
                for (int a2 = 0; a2 < 2; ++a2)
                    for (int b1 = 0; b1 < 2; ++b1)
                        for (int b2 = 0; b2 < 2; ++b2) {
                            const int if1 = Wiring::f1(x, a2), ig1 = Wiring::g1(y, b2);
                            const int if2 = Wiring::f2(x, a1), ig2 = Wiring::g2(y, b1);
                            const int if3 = Wiring::f3(x, a1, a2), ig3 = Wiring::g3(y, b1, b2);
                            const double al = w[if1], be = w[ig1], ga = w[if2], de = w[ig2];
                            const double pp = interp(p, a1, b1, al, be);
                            const double qq = interp(q, a2, b2, ga, de);
                            const double f = w[if3], g = w[ig3];
                            // Probability that (a, b) satisfy the winning predicate.
                            const double s = flip ? f * (1 - g) + (1 - f) * g : f * g + (1 - f) * (1 - g);
                            val += pp * qq * s;
                            if (!grad) continue;
                            auto& G = *grad;
                            const double dpa = (1 - be) * (p(a1, b1, 1, 0) - p(a1, b1, 0, 0)) + be * (p(a1, b1, 1, 1) - p(a1, b1, 0, 1));
                            const double dpb = (1 - al) * (p(a1, b1, 0, 1) - p(a1, b1, 0, 0)) + al * (p(a1, b1, 1, 1) - p(a1, b1, 1, 0));
                            const double dqg = (1 - de) * (q(a2, b2, 1, 0) - q(a2, b2, 0, 0)) + de * (q(a2, b2, 1, 1) - q(a2, b2, 0, 1));
                            const double dqd = (1 - ga) * (q(a2, b2, 0, 1) - q(a2, b2, 0, 0)) + ga * (q(a2, b2, 1, 1) - q(a2, b2, 1, 0));
                            const double dsf = flip ? 1 - 2 * g : 2 * g - 1;
                            const double dsg = flip ? 1 - 2 * f : 2 * f - 1;
                            G[if1] += dpa * qq * s;
                            G[ig1] += dpb * qq * s;
                            G[if2] += pp * dqg * s;
                            G[ig2] += pp * dqd * s;
                            G[if3] += pp * qq * dsf;
                            G[ig3] += pp * qq * dsg;
                        }
        }
    if (grad)
        for (double& v : *grad) v *= 0.25;
    return 0.25 * val;
}

std::vector<std::vector<Box>> multiplication_table(const Wiring& w, const std::vector<Box>& basis) {
    std::vector<std::vector<Box>> t(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (const Box& c : basis) t[i].push_back(box_product(basis[i], c, w));
    return t;
}

namespace {

bool parallel_class(const Wiring& w, double tol) {
    for (int x = 0; x < 2; ++x) {
        const double v = w[Wiring::f1(x, 0)];
        for (int u = 0; u < 2; ++u)
            if (std::abs(w[Wiring::f1(x, u)] - v) > tol || std::abs(w[Wiring::f2(x, u)] - v) > tol) return false;
        const double g = w[Wiring::g1(x, 0)];
        for (int u = 0; u < 2; ++u)
            if (std::abs(w[Wiring::g1(x, u)] - g) > tol || std::abs(w[Wiring::g2(x, u)] - g) > tol) return false;
    }
    return true;
}

}  // namespace

bool commutativity_symmetry_check(const Wiring& w, double tol) {
    if (!parallel_class(w, tol))
        throw Error(ErrorKind::UnsupportedClass, "requires f1 = f2 depending on x only, g1 = g2 depending on y only");
    for (int x = 0; x < 2; ++x) {
        if (std::abs(w[Wiring::f3(x, 0, 1)] - w[Wiring::f3(x, 1, 0)]) > tol) return false;
        if (std::abs(w[Wiring::g3(x, 0, 1)] - w[Wiring::g3(x, 1, 0)]) > tol) return false;
    }
    return true;
}

bool associativity_check(const Wiring& w, double tol) {
    if (!parallel_class(w, tol) || !is_deterministic(w))
        throw Error(ErrorKind::UnsupportedClass, "requires a deterministic parallel wiring");
    for (int x = 0; x < 2; ++x)
        if (std::abs(w[Wiring::f1(x, 0)] - x) > tol || std::abs(w[Wiring::g1(x, 0)] - x) > tol)
            throw Error(ErrorKind::UnsupportedClass, "requires f(x) = x and g(y) = y");
    for (int base : {16, 24})
        for (int x = 0; x < 2; ++x) {
            auto op = [&](int u, int v) { return static_cast<int>(w[base + 4 * x + 2 * u + v]); };
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c)
                        if (op(op(a, b), c) != op(a, op(b, c))) return false;
        }
    return true;
}

Box random_ns_box(std::uint64_t seed, std::uint64_t stream) {
    CounterRng rng(seed, stream, 0x6e73);
    Box out;
    double total = 0.0;
    std::array<double, 24> wts{};
    for (double& v : wts) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        v = -std::log(u);
        v = v * v * v;  // sharpen toward the extreme points
        total += v;
    }
    for (int k = 0; k < 16; ++k) out += (wts[k] / total) * local_deterministic(k);
    for (int k = 0; k < 8; ++k) out += (wts[16 + k] / total) * make_nonlocal((k >> 2) & 1, (k >> 1) & 1, k & 1);
    return out;
}

bool empirical_commutative(const Wiring& w, int trials, std::uint64_t seed, double tol) {
    for (int t = 0; t < trials; ++t) {
        const Box p = random_ns_box(seed, 2 * t), q = random_ns_box(seed, 2 * t + 1);
        if (max_abs_diff(box_product(p, q, w), box_product(q, p, w)) > tol) return false;
    }
    return true;
}

bool empirical_associative(const Wiring& w, int trials, std::uint64_t seed, double tol) {
    const std::vector<Box> fixed = {make_pr(), make_p00(), make_p11(), make_uniform()};
    for (const Box& p : fixed)
        for (const Box& q : fixed)
            for (const Box& r : fixed)
                if (max_abs_diff(box_product(box_product(p, q, w), r, w), box_product(p, box_product(q, r, w), w)) > tol)
                    return false;
    for (int t = 0; t < trials; ++t) {
        const Box p = random_ns_box(seed, 3 * t), q = random_ns_box(seed, 3 * t + 1), r = random_ns_box(seed, 3 * t + 2);
        if (max_abs_diff(box_product(box_product(p, q, w), r, w), box_product(p, box_product(q, r, w), w)) > tol)
            return false;
    }
    return true;
}

}  // namespace nlb
