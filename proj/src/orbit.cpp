#include "nlbox/orbit.hpp"

#include <cmath>
#include <unordered_map>

namespace nlb {

namespace {

// Set of boxes with max-norm deduplication. Boxes are bucketed by a
// quantized linear functional; two boxes within tol land in adjacent buckets.
class BoxSet {
public:
    explicit BoxSet(double tol) : tol_(tol) {}

    bool insert(const Box& b) {
        const long long k = key(b);
        for (long long kk = k - 1; kk <= k + 1; ++kk) {
            auto it = buckets_.find(kk);
            if (it == buckets_.end()) continue;
            for (std::size_t idx : it->second)
                if (max_abs_diff(items_[idx], b) <= tol_) return false;
        }
        buckets_[k].push_back(items_.size());
        items_.push_back(b);
        return true;
    }

    std::vector<Box> take() { return std::move(items_); }
    std::size_t size() const { return items_.size(); }

private:
    static long long key(const Box& b) {
        double s = 0.0;
        for (int i = 0; i < 16; ++i) s += b.p[i] * (1.0 + 0.37 * i);
        return std::llround(s * 1e7);
    }

    double tol_;
    std::vector<Box> items_;
    std::unordered_map<long long, std::vector<std::size_t>> buckets_;
};

}  // namespace

std::vector<OrbitLevel> orbit_levels(const Box& p, const Wiring& w, int k) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "depth must be at least 1");
    if (k > kMaxOrbitDepth) throw Error(ErrorKind::DepthLimit, "orbit depth capped at 14");
    std::vector<OrbitLevel> levels(k + 1);
    levels[1] = {1, {p}, 1};
    for (int d = 2; d <= k; ++d) {
        BoxSet set(kDedupTol);
        std::uint64_t count = 0;
        for (int l = 1; l < d; ++l) {
            count += levels[l].count_before_dedup * levels[d - l].count_before_dedup;
            for (const Box& a : levels[l].boxes)
                for (const Box& b : levels[d - l].boxes) set.insert(box_product_unchecked(a, b, w));
        }
        levels[d] = {d, set.take(), count};
    }
    levels.erase(levels.begin());
    return levels;
}

OrbitLevel orbit_depth(const Box& p, const Wiring& w, int k) { return orbit_levels(p, w, k).back(); }

OrbitLevel tilted_orbit(const Box& p, const Wiring& w, int k) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "depth must be at least 1");
    if (k > kMaxTiltedDepth) throw Error(ErrorKind::DepthLimit, "tilted orbit depth capped at 20");
    OrbitLevel cur{1, {p}, 1};
    for (int d = 2; d <= k; ++d) {
        BoxSet set(kDedupTol);
        for (const Box& q : cur.boxes) {
            set.insert(box_product_unchecked(p, q, w));
            set.insert(box_product_unchecked(q, p, w));
        }
        cur = {d, set.take(), 2 * cur.count_before_dedup};
    }
    return cur;
}

Box right_power(const Box& p, const Wiring& w, int k) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "power must be at least 1");
    Box q = p;
    for (int i = 1; i < k; ++i) q = box_product_unchecked(q, p, w);
    return q;
}

const Basis3& pr_sr_i_basis() {
    static const Basis3 basis = {make_pr(), make_sr(), make_uniform()};
    return basis;
}

double convex_coords_c3(const Box& p) { return slice_coordinates(p, pr_sr_i_basis())[2]; }

Box slice_box_from_chsh(double chsh_prime, double chsh) {
    const double c1 = 2.0 * (chsh - chsh_prime);
    const double c2 = 4.0 * (chsh_prime - 0.5);
    const double c3 = 1.0 - c1 - c2;
    return c1 * make_pr() + c2 * make_sr() + c3 * make_uniform();
}

std::optional<OrbitWitness> orbit_collapse_search(const Box& p, const Wiring& w, int kmax) {
    Box q = p;
    for (int k = 1; k <= kmax; ++k) {
        if (k > 1) q = box_product_unchecked(q, p, w);
        if (chsh_value(q) > kCollapseThreshold) return OrbitWitness{k, q, true};
    }
    // Fallback: enumerate the tilted orbit level by level.
    const int cap = std::min(kmax, kMaxTiltedDepth);
    std::vector<Box> cur{p};
    for (int k = 2; k <= cap; ++k) {
        BoxSet set(kDedupTol);
        for (const Box& b : cur) {
            set.insert(box_product_unchecked(p, b, w));
            set.insert(box_product_unchecked(b, p, w));
        }
        cur = set.take();
        for (const Box& b : cur)
            if (chsh_value(b) > kCollapseThreshold) return OrbitWitness{k, b, false};
        if (cur.size() > 200000) break;
    }
    return std::nullopt;
}

bool triangle_table_certificate(const Wiring& w, const Box& q, const Box& r, double tol) {
    const Box pr = make_pr();
    const Box half = 0.5 * (q + r);
    const Box expect[3][3] = {{pr, pr, pr}, {half, q, r}, {pr, r, q}};
    const Box rows[3] = {pr, q, r};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (max_abs_diff(box_product(rows[i], rows[j], w), expect[i][j]) > tol) return false;
    return true;
}

std::vector<std::pair<double, double>> triangle_affine_iteration(double alpha0, double beta0, int steps) {
    if (alpha0 < 0 || beta0 < 0 || alpha0 + beta0 > 1 + 1e-12)
        throw Error(ErrorKind::InvalidArgument, "need alpha0, beta0 >= 0 and alpha0 + beta0 <= 1");
    const double A11 = 1 - alpha0, A12 = -alpha0;
    const double A21 = -1 + alpha0 + beta0, A22 = -1 + 1.5 * alpha0 + 2 * beta0;
    const double b1 = alpha0, b2 = 1 - alpha0 - beta0;
    std::vector<std::pair<double, double>> seq{{alpha0, beta0}};
    double a = alpha0, b = beta0;
    for (int k = 0; k < steps; ++k) {
        const double na = A11 * a + A12 * b + b1;
        const double nb = A21 * a + A22 * b + b2;
        a = na;
        b = nb;
        seq.emplace_back(a, b);
    }
    return seq;
}

}  // namespace nlb
