#pragma once

#include <optional>
#include <vector>

namespace nlb::lp {

// Dense Phase-I simplex: finds x >= 0 with A x = b, or reports infeasibility.
// A is row-major with rows.size() == b.size(). Bland's rule prevents cycling.
struct FeasibilityResult {
    bool feasible = false;
    std::vector<double> x;
    double infeasibility = 0.0;  // Phase-I optimum (sum of artificials)
    int pivots = 0;
};

FeasibilityResult find_feasible(const std::vector<std::vector<double>>& A,
                                const std::vector<double>& b, double tol = 1e-9);

}  // namespace nlb::lp
