#pragma once

#include <cstdint>

#include "nlbox/box.hpp"
#include "nlbox/rng.hpp"
#include "nlbox/wiring.hpp"

namespace testutil {

// Random point of Conv{PR, SR, I}.
inline nlb::Box random_slice_box(std::uint64_t seed, std::uint64_t i) {
    nlb::CounterRng r(seed, i, 77);
    double u = r.uniform(), v = r.uniform();
    if (u + v > 1) {
        u = 1 - u;
        v = 1 - v;
    }
    return u * nlb::make_pr() + v * nlb::make_sr() + (1 - u - v) * nlb::make_uniform();
}

// Random valid wiring: uniform coordinates pushed through the projection.
inline nlb::Wiring random_wiring(std::uint64_t seed, std::uint64_t i) {
    nlb::CounterRng r(seed, i, 91);
    std::array<double, 32> v{};
    for (double& x : v) x = r.uniform();
    return nlb::project_wiring(v);
}

}  // namespace testutil
