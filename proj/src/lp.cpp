#include "nlbox/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace nlb::lp {

FeasibilityResult find_feasible(const std::vector<std::vector<double>>& A,
                                const std::vector<double>& b, double tol) {
    const std::size_t m = b.size();
    const std::size_t n = m ? A[0].size() : 0;
    const std::size_t cols = n + m;
    // Tableau rows: [A | I_art | rhs], rows flipped so that rhs >= 0.
    std::vector<std::vector<double>> T(m, std::vector<double>(cols + 1, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sgn = b[i] < 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) T[i][j] = sgn * A[i][j];
        T[i][n + i] = 1.0;
        T[i][cols] = sgn * b[i];
        basis[i] = n + i;
    }
    // Reduced costs for minimizing the artificial sum.
    std::vector<double> cost(cols + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= cols; ++j)
            if (j < n || j == cols) cost[j] -= T[i][j];

    FeasibilityResult res;
    const int max_pivots = 50 * static_cast<int>(cols + 10);
    while (res.pivots < max_pivots) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < n; ++j) {
            if (cost[j] < -tol) {
                enter = j;
                break;
            }
        }
        if (enter == cols) break;
        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (T[i][enter] > tol) {
                const double r = T[i][cols] / T[i][enter];
                if (r < best - 1e-15 || (std::abs(r - best) <= 1e-15 && leave < m && basis[i] < basis[leave])) {
                    best = r;
                    leave = i;
                }
            }
        }
        if (leave == m) break;  // unbounded direction cannot occur in Phase I
        const double piv = T[leave][enter];
        for (double& v : T[leave]) v /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double f = T[i][enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) T[i][j] -= f * T[leave][j];
        }
        const double f = cost[enter];
        for (std::size_t j = 0; j <= cols; ++j) cost[j] -= f * T[leave][j];
        basis[leave] = enter;
        ++res.pivots;
    }

    res.infeasibility = -cost[cols];
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = T[i][cols];

    // Confirm with the original system rather than trusting the tableau.
    double resid = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += A[i][j] * res.x[j];
        resid = std::max(resid, std::abs(s - b[i]));
    }
    res.feasible = res.infeasibility <= tol * static_cast<double>(m + 1) && resid <= 1e3 * tol;
    return res;
}

}  // namespace nlb::lp
