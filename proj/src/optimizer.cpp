#include "nlbox/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "nlbox/orbit.hpp"
#include "nlbox/rng.hpp"

namespace nlb::opt {

void DescentConfig::validate() const {
    if (!(learning_rate > 0) || max_iters <= 0 || !(tol_eps > 0) || k_reset <= 0 || !(chi > 0) || chi > 1 ||
        replicas <= 0 || line_search_iters < 0 || threads <= 0)
        throw Error(ErrorKind::InvalidArgument, "descent configuration fields must be positive, chi in (0,1]");
    if (chi * replicas < 1.0 - 1e-12) throw Error(ErrorKind::InvalidArgument, "need chi * replicas >= 1");
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int t = std::min(threads, n);
    for (int k = 0; k < t; ++k)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

double objective(const Wiring& w, const Box& p, const Box& q) { return product_value(q, p, w, Game::CHSH); }

Gradient gradient_analytic(const Wiring& w, const Box& p, const Box& q) {
    Gradient g;
    product_value(q, p, w, Game::CHSH, &g);
    return g;
}

Gradient gradient_fd(const Objective& f, const Wiring& w, double h) {
    Gradient g;
    Wiring t = w;
    for (int i = 0; i < 32; ++i) {
        const double v = w[i];
        t[i] = v + h;
        const double up = f.value(t);
        t[i] = v - h;
        const double dn = f.value(t);
        t[i] = v;
        g[i] = (up - dn) / (2 * h);
    }
    return g;
}

Gradient gradient(const Wiring& w, const Box& p, const Box& q, double h) {
    Objective f;
    f.value = [&](const Wiring& x) { return objective(x, p, q); };
    return gradient_fd(f, w, h);
}

Objective pair_objective(const Box& p, const Box& q) {
    Objective f;
    f.value = [p, q](const Wiring& w) { return product_value(q, p, w, Game::CHSH); };
    f.value_grad = [p, q](const Wiring& w, Gradient& g) { return product_value(q, p, w, Game::CHSH, &g); };
    return f;
}

Objective power_objective(const Box& p, int n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "power must be at least 1");
    if (n == 2) return pair_objective(p, p);
    Objective f;
    f.value = [p, n](const Wiring& w) { return chsh_value(right_power(p, w, n)); };
    return f;
}

std::size_t RunResult::best_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < replicas.size(); ++i)
        if (replicas[i].value > replicas[best].value) best = i;
    return best;
}

namespace {

double value_and_grad(const Objective& f, const Wiring& w, Gradient& g) {
    if (f.value_grad) return f.value_grad(w, g);
    g = gradient_fd(f, w);
    return f.value(w);
}

Wiring step(const Wiring& w, const Gradient& g, double a) {
    std::array<double, 32> v;
    for (int i = 0; i < 32; ++i) v[i] = w[i] + a * g[i];
    return project_wiring(v);
}

Wiring random_wiring(std::uint64_t seed, std::uint64_t replica, std::uint64_t round) {
    CounterRng rng(seed, replica, round);
    std::array<double, 32> v;
    for (double& x : v) x = rng.uniform();
    return project_wiring(v);
}

double max_step(const Wiring& a, const Wiring& b) {
    double m = 0.0;
    for (int i = 0; i < 32; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Gains below this count as a stalled replica.
constexpr double kStallGain = 1e-10;

// One line-search step. Returns false when no step size improves the value.
bool line_search_step(const Objective& f, Replica& r, int refine_iters, double tol_eps) {
    Gradient g;
    const double v0 = value_and_grad(f, r.w, g);
    r.value = v0;
    double best_a = 0.0, best_v = v0;
    Wiring best_w = r.w;
    auto probe = [&](double a) {
        Wiring c = step(r.w, g, a);
        const double v = f.value(c);
        if (v > best_v) {
            best_v = v;
            best_a = a;
            best_w = c;
        }
        return v;
    };
    for (int e = -10; e <= 3; ++e) probe(std::ldexp(1.0, e));
    if (best_a > 0.0 && refine_iters > 0) {
        // Golden-section refinement on the bracket around the best grid point.
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = 0.5 * best_a, hi = 2.0 * best_a;
        double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
        double f1 = probe(x1), f2 = probe(x2);
        for (int it = 2; it < refine_iters; ++it) {
            if (f1 >= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = probe(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = probe(x2);
            }
        }
    }
    if (best_a == 0.0) return false;
    const double moved = max_step(r.w, best_w);
    r.w = best_w;
    r.value = best_v;
    return moved >= tol_eps && best_v - v0 > kStallGain;
}

}  // namespace

Replica projected_gradient_descent(const DescentConfig& cfg, const Objective& f, std::uint64_t replica) {
    Replica r{random_wiring(cfg.seed, replica, 0x5067640000000000ULL), 0.0};
    Gradient g;
    for (int it = 0; it < cfg.max_iters; ++it) {
        value_and_grad(f, r.w, g);
        const Wiring next = step(r.w, g, cfg.learning_rate);
        const double moved = max_step(next, r.w);
        r.w = next;
        if (moved < cfg.tol_eps) break;
    }
    r.value = f.value(r.w);
    return r;
}

Wiring projected_gradient_descent(const DescentConfig& cfg, const Box& p, const Box& q, std::uint64_t replica) {
    cfg.validate();
    return projected_gradient_descent(cfg, pair_objective(p, q), replica).w;
}

RunResult pgd_replicas(const DescentConfig& cfg, const Objective& f) {
    cfg.validate();
    RunResult out;
    out.replicas.resize(cfg.replicas);
    parallel_for(cfg.replicas, cfg.threads,
                 [&](int i) { out.replicas[i] = projected_gradient_descent(cfg, f, static_cast<std::uint64_t>(i)); });
    out.round_best.push_back(out.best().value);
    return out;
}

RunResult line_search_with_resets(const DescentConfig& cfg, const Objective& f) {
    cfg.validate();
    const int m = cfg.replicas;
    const int rounds = std::max(1, static_cast<int>(std::floor(1.0 / cfg.chi + 1e-9)));
    RunResult out;
    out.replicas.assign(m, Replica{Wiring{}, 0.0});
    const double v0 = f.value(Wiring{});
    for (auto& r : out.replicas) r.value = v0;
    std::vector<char> converged(m, 0);
    std::vector<int> order(m);

    for (int j = 0; j < rounds; ++j) {
        const int keep = std::min(m, static_cast<int>(std::floor(j * m * cfg.chi + 1e-9)));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return out.replicas[a].value > out.replicas[b].value; });
        for (int r = keep; r < m; ++r) {
            const int i = order[r];
            out.replicas[i].w = random_wiring(cfg.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
            out.replicas[i].value = f.value(out.replicas[i].w);
            converged[i] = 0;
        }
        const int steps = cfg.k_reset * (j == rounds - 1 ? 10 : 1);
        parallel_for(m, cfg.threads, [&](int i) {
            for (int k = 0; k < steps && !converged[i]; ++k)
                if (!line_search_step(f, out.replicas[i], cfg.line_search_iters, cfg.tol_eps)) converged[i] = 1;
        });
        out.round_best.push_back(out.best().value);
    }
    return out;
}

RunResult line_search_with_resets(const DescentConfig& cfg, const Box& p, const Box& q) {
    return line_search_with_resets(cfg, pair_objective(p, q));
}

std::optional<TaskAResult> task_a_adaptive(const Box& p, int n_products, const DescentConfig& cfg) {
    TaskAResult res;
    Box pn = p;
    for (int n = 1; n <= n_products; ++n) {
        DescentConfig c = cfg;
        c.seed = derive_key(cfg.seed, 0x7A, static_cast<std::uint64_t>(n));
        const auto run = line_search_with_resets(c, pair_objective(p, pn));
        const Wiring& w = run.best().w;
        pn = box_product_unchecked(pn, p, w);
        res.wirings.push_back(w);
        res.chsh.push_back(chsh_value(pn));
        if (res.chsh.back() > kCollapseThreshold) return res;
    }
    return std::nullopt;
}

std::optional<TaskBResult> task_b_constant(const Box& p, int n_max, int l_max, const DescentConfig& cfg) {
    for (int l = 1; l <= l_max; ++l) {
        DescentConfig c = cfg;
        c.seed = derive_key(cfg.seed, 0x7B, static_cast<std::uint64_t>(l));
        const auto run = line_search_with_resets(c, power_objective(p, l + 1));
        const Wiring& w = run.best().w;
        Box q = p;
        for (int n = 1; n <= n_max + 1; ++n) {
            if (n > 1) q = box_product_unchecked(q, p, w);
            const double v = chsh_value(q);
            if (v > kCollapseThreshold) return TaskBResult{w, l + 1, n, v};
        }
    }
    return std::nullopt;
}

std::optional<ScanMethod> parse_scan_method(const std::string& s) {
    if (s == "analytic") return ScanMethod::Analytic;
    if (s == "taskA") return ScanMethod::TaskA;
    if (s == "taskB") return ScanMethod::TaskB;
    if (s == "right_power") return ScanMethod::RightPower;
    return std::nullopt;
}

AnalyticVerdict analytic_collapse(const Box& b) {
    AnalyticVerdict v;
    double best_ab = -1.0, best_chsh = 0.0;
    for (int k = 0; k < 64; ++k) {
        const Box r = relabel(b, k & 1, (k >> 1) & 1, (k >> 2) & 1, (k >> 3) & 1, (k >> 4) & 1, (k >> 5) & 1);
        const auto c = collapse_criterion(r);
        best_ab = std::max(best_ab, c.A + c.B);
        best_chsh = std::max(best_chsh, chsh_value(r));
    }
    if (best_ab > 16.0) {
        v.collapsing = true;
        v.kind = "bbp";
        v.value = best_ab;
    } else if (best_chsh > kCollapseThreshold) {
        v.collapsing = true;
        v.kind = "chsh";
        v.value = best_chsh;
    } else {
        v.value = best_ab;
    }
    return v;
}

std::vector<ScanPoint> slice_scan(const Basis3& basis, int grid_n, ScanMethod method, const DescentConfig& cfg,
                                  const ScanOptions& opts) {
    if (grid_n < 1) throw Error(ErrorKind::InvalidArgument, "grid must be at least 1");
    std::vector<ScanPoint> pts;
    for (int i = 0; i <= grid_n; ++i)
        for (int j = 0; i + j <= grid_n; ++j) {
            ScanPoint s;
            s.i = i;
            s.j = j;
            s.c1 = static_cast<double>(i) / grid_n;
            s.c2 = static_cast<double>(j) / grid_n;
            s.c3 = static_cast<double>(grid_n - i - j) / grid_n;
            pts.push_back(s);
        }
    parallel_for(static_cast<int>(pts.size()), cfg.threads, [&](int idx) {
        ScanPoint& s = pts[idx];
        const Box b = s.c1 * basis[0] + s.c2 * basis[1] + s.c3 * basis[2];
        if (!validate_ns(b, kComputedTol).ok) {
            s.label = "not-ns";
            s.witness_kind = "none";
            return;
        }
        s.label = "unknown";
        s.witness_kind = "none";
        DescentConfig c = cfg;
        c.seed = derive_key(cfg.seed, 0x5CA, static_cast<std::uint64_t>(idx));
        switch (method) {
            case ScanMethod::Analytic: {
                const auto v = analytic_collapse(b);
                s.witness_kind = v.kind;
                s.witness_value = v.value;
                if (v.collapsing) s.label = "collapsing";
                break;
            }
            case ScanMethod::RightPower: {
                if (auto wit = orbit_collapse_search(b, opts.wiring, opts.kmax)) {
                    s.label = "collapsing";
                    s.witness_kind = "power";
                    s.witness_value = wit->k;
                }
                break;
            }
            case ScanMethod::TaskA: {
                if (auto r = task_a_adaptive(b, opts.kmax, c)) {
                    s.label = "collapsing";
                    s.witness_kind = "taskA";
                    s.witness_value = static_cast<double>(r->wirings.size());
                }
                break;
            }
            case ScanMethod::TaskB: {
                if (auto r = task_b_constant(b, opts.kmax, opts.l_max, c)) {
                    s.label = "collapsing";
                    s.witness_kind = "taskB";
                    s.witness_value = r->winning_power;
                }
                break;
            }
        }
    });
    return pts;
}

}  // namespace nlb::opt
