#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlbox/box.hpp"
#include "nlbox/wiring.hpp"

namespace nlb::opt {

struct DescentConfig {
    double learning_rate = 0.01;
    int max_iters = 5000;
    double tol_eps = 1e-6;
    int k_reset = 100;
    double chi = 0.002;
    int replicas = 1000;
    int line_search_iters = 20;
    std::uint64_t seed = 0;
    // Worker threads for replica-parallel loops; results do not depend on it.
    int threads = 1;

    void validate() const;
};

using Gradient = std::array<double, 32>;

// Objective with an optional exact gradient; when value_grad is empty the
// gradient is taken by central finite differences.
struct Objective {
    std::function<double(const Wiring&)> value;
    std::function<double(const Wiring&, Gradient&)> value_grad;
};

// Phi(W) = CHSH(q x_W p).
double objective(const Wiring& w, const Box& p, const Box& q);
Gradient gradient(const Wiring& w, const Box& p, const Box& q, double h = 1e-6);
Gradient gradient_analytic(const Wiring& w, const Box& p, const Box& q);
Gradient gradient_fd(const Objective& f, const Wiring& w, double h = 1e-6);
Objective pair_objective(const Box& p, const Box& q);
// CHSH of the left-bracketed power p^{x_W n}.
Objective power_objective(const Box& p, int n);

struct Replica {
    Wiring w;
    double value = 0.0;
};

struct RunResult {
    std::vector<Replica> replicas;      // in replica order
    std::vector<double> round_best;     // best value after each reset round
    std::size_t best_index() const;     // highest value, lowest index on ties
    const Replica& best() const { return replicas[best_index()]; }
};

Wiring projected_gradient_descent(const DescentConfig& cfg, const Box& p, const Box& q, std::uint64_t replica = 0);
Replica projected_gradient_descent(const DescentConfig& cfg, const Objective& f, std::uint64_t replica);
RunResult pgd_replicas(const DescentConfig& cfg, const Objective& f);

RunResult line_search_with_resets(const DescentConfig& cfg, const Box& p, const Box& q);
RunResult line_search_with_resets(const DescentConfig& cfg, const Objective& f);

struct TaskAResult {
    std::vector<Wiring> wirings;
    std::vector<double> chsh;  // CHSH(P_{n+1}) after each product
};
std::optional<TaskAResult> task_a_adaptive(const Box& p, int n_products, const DescentConfig& cfg);

struct TaskBResult {
    Wiring w;
    int optimized_power = 0;  // l + 1
    int winning_power = 0;    // n
    double chsh = 0.0;
};
std::optional<TaskBResult> task_b_constant(const Box& p, int n_max, int l_max, const DescentConfig& cfg);

enum class ScanMethod { Analytic, TaskA, TaskB, RightPower };
std::optional<ScanMethod> parse_scan_method(const std::string& s);

struct ScanOptions {
    Wiring wiring = named_wiring(WiringName::BS);  // used by RightPower
    int kmax = 8;                                  // RightPower depth, TaskA products, TaskB n_max
    int l_max = 2;                                 // TaskB
};

struct ScanPoint {
    int i = 0, j = 0;
    double c1 = 0, c2 = 0, c3 = 0;
    std::string label;         // collapsing, not-ns, unknown
    std::string witness_kind;  // bbp, chsh, power, taskA, taskB, none
    double witness_value = 0;
};

// Collapse test used by the analytic method: the A+B>16 criterion
// on all 64 local relabelings, or CHSH above the threshold.
struct AnalyticVerdict {
    bool collapsing = false;
    std::string kind = "none";
    double value = 0.0;
};
AnalyticVerdict analytic_collapse(const Box& b);

std::vector<ScanPoint> slice_scan(const Basis3& basis, int grid_n, ScanMethod method, const DescentConfig& cfg,
                                  const ScanOptions& opts = {});

// Deterministic parallel for over [0, n).
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace nlb::opt
