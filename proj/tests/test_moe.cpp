#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nlbox/moe.hpp"
#include "nlbox/rng.hpp"

using namespace nlb;
using namespace nlb::moe;

namespace {

HermitianOperator identity(Eigen::Index n) { return HermitianOperator::Identity(n, n); }

double lambda_max(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<HermitianOperator> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

// alpha_K as a function of real K, for bracketing its sign change.
double alpha_real(double K) { return ((3 * K - 2) * std::sqrt(K) - K * K) / (2 * K * (K - 1)); }

}  // namespace

TEST_SUITE("moe") {

TEST_CASE("generators") {
    const auto k2 = clifford_generators(2);
    REQUIRE(k2.gammas.size() == 2);
    HermitianOperator sy(2, 2), sz(2, 2);
    sy << 0, cd(0, -1), cd(0, 1), 0;
    sz << 1, 0, 0, -1;
    CHECK((k2.gammas[0] - sy).norm() == 0.0);
    CHECK((k2.gammas[1] - sz).norm() == 0.0);
    for (int k = 1; k <= 17; ++k) {
        const auto cs = clifford_generators(k);
        CHECK(cs.d == (std::size_t{1} << (k / 2)));
        CHECK(cs.gammas.size() == static_cast<std::size_t>(k));
        if (k <= 12) CHECK(anticommutation_residual(cs) <= 1e-12);
        for (const auto& g : cs.gammas) {
            if (k >= 2) CHECK(std::abs(g.trace()) <= 1e-12);
            CHECK(is_hermitian_unitary(g));
        }
        for (std::size_t i = 0; i < cs.strings.size(); ++i) CHECK((cs.strings[i].dense() - cs.gammas[i]).norm() == 0.0);
    }
    CHECK_THROWS_AS(clifford_generators(18), Error);
    CHECK(pauli_generators(24).front().dim() == 4096);
    CHECK_THROWS_AS(pauli_generators(26), Error);
}

TEST_CASE("pauli apply matches dense") {
    const auto gens = pauli_generators(7);
    const std::size_t d = gens.front().dim(), inner = 3;
    Eigen::VectorXcd v = Eigen::VectorXcd::Random(static_cast<Eigen::Index>(d * inner));
    for (const auto& p : gens) {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
        p.apply(v.data(), out.data(), inner, cd(0.5, 0.25));
        const HermitianOperator full = kron(p.dense(), identity(static_cast<Eigen::Index>(inner)));
        CHECK((out - cd(0.5, 0.25) * full * v).norm() <= 1e-12);
    }
}

TEST_CASE("norm of linear combinations and spectrum symmetry") {
    for (int k = 2; k <= 9; ++k) {
        const auto cs = clifford_generators(k);
        CounterRng r(101, k);
        for (int t = 0; t < 100; ++t) {
            HermitianOperator s = HermitianOperator::Zero(cs.d, cs.d);
            double n2 = 0;
            for (int i = 0; i < k; ++i) {
                const double v = r.normal();
                s += v * cs.gammas[i];
                n2 += v * v;
            }
            CHECK(std::abs(opnorm_hermitian(s) - std::sqrt(n2)) <= 1e-10);
        }
        HermitianOperator sum = HermitianOperator::Zero(cs.d, cs.d);
        for (const auto& g : cs.gammas) sum += g;
        CHECK(std::abs(opnorm_hermitian(sum) - std::sqrt(static_cast<double>(k))) <= 1e-10);
        Eigen::SelfAdjointEigenSolver<HermitianOperator> es(sum, Eigen::EigenvaluesOnly);
        Eigen::VectorXd ev = es.eigenvalues();
        std::vector<double> e(ev.data(), ev.data() + ev.size());
        std::sort(e.begin(), e.end());
        for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] + e[e.size() - 1 - i]) <= 1e-10);
    }
    CHECK(opnorm_hermitian(identity(4)) == doctest::Approx(1.0));
    HermitianOperator dg = HermitianOperator::Zero(2, 2);
    dg(0, 0) = 3;
    dg(1, 1) = -5;
    CHECK(opnorm_hermitian(dg) == doctest::Approx(5.0));
}

TEST_CASE("tensor bound with a random unitary") {
    for (int k = 2; k <= 6; ++k) {
        const auto cs = clifford_generators(k);
        const auto u = random_hermitian_unitary(3, 5, k, true);
        HermitianOperator s = HermitianOperator::Zero(cs.d * 3, cs.d * 3);
        for (const auto& g : cs.gammas) s += kron(g, u);
        CHECK(opnorm_hermitian(s) <= std::sqrt(static_cast<double>(k)) * opnorm_hermitian(u) + 1e-10);
    }
}

TEST_CASE("encryption") {
    const auto cs = clifford_generators(5);
    for (int key = 1; key <= 5; ++key)
        for (int m = 0; m < 2; ++m) {
            const auto rho = encrypt(m, key, cs);
            CHECK(std::abs(rho.trace() - 1.0) <= 1e-12);
            CHECK((rho - rho.adjoint()).norm() <= 1e-12);
            Eigen::SelfAdjointEigenSolver<HermitianOperator> es(rho, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() >= -1e-12);
            const auto right = decrypt(rho, key, cs);
            CHECK(std::abs(right[m] - 1.0) <= 1e-12);
            for (int other = 1; other <= 5; ++other) {
                if (other == key) continue;
                const auto wrong = decrypt(rho, other, cs);
                CHECK(std::abs(wrong[0] - 0.5) <= 1e-12);
                CHECK(std::abs(wrong[1] - 0.5) <= 1e-12);
            }
        }
    try {
        encrypt(0, 6, cs);
        FAIL("expected InvalidKey");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidKey);
    }
}

TEST_CASE("W_K norms") {
    for (int k = 2; k <= 8; ++k) {
        const auto cs = clifford_generators(k);
        const std::vector<HermitianOperator> ids(k, identity(2));
        const double n = opnorm_hermitian(w_k_operator(cs, ids));
        CHECK(std::abs(n - (k + 2 * std::sqrt(static_cast<double>(k)))) <= 1e-9);
        CHECK(std::abs(win_prob(k, n) - (0.5 + 0.5 / std::sqrt(static_cast<double>(k)))) <= 1e-10);
    }
    const double listed[] = {4, 3, 6, 7, 8, 9};
    for (int k = 2; k <= 7; ++k) {
        const auto cs = clifford_generators(k);
        CHECK(std::abs(opnorm_hermitian(w_k_operator(cs, cs.gammas)) - listed[k - 2]) <= 1e-9);
    }
    const auto cs = clifford_generators(3);
    HermitianOperator notu = identity(2);
    notu(0, 0) = 0.5;
    CHECK_THROWS_AS(w_k_operator(cs, {notu, notu, notu}), Error);
}

TEST_CASE("win probability and alpha") {
    CHECK(std::abs(win_prob(2, 2 + 2 * std::sqrt(2.0)) - 0.8535533905932737) <= 1e-12);
    CHECK(win_prob(5, 15) == doctest::Approx(1.0));
    CHECK(std::abs(alpha_k(2) - (std::sqrt(2.0) - 1)) <= 1e-12);
    CHECK(alpha_k(7) > 0);
    CHECK(alpha_k(8) < 0);
    double lo = 7, hi = 8;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (alpha_real(mid) > 0 ? lo : hi) = mid;
    }
    CHECK(lo > 7.0);
    CHECK(hi < 8.0);
}

TEST_CASE("sum of squares residuals") {
    for (int k = 2; k <= 7; ++k)
        for (int t = 0; t < 20; ++t) {
            std::vector<HermitianOperator> b, c;
            for (int i = 0; i < k; ++i) {
                b.push_back(kron(random_hermitian_unitary(2, 7, 1000 * k + 2 * i + 100 * t, true), identity(2)));
                c.push_back(kron(identity(2), random_hermitian_unitary(2, 8, 1000 * k + 2 * i + 1 + 100 * t, true)));
            }
            CHECK(sos_residual(k, b, c) <= 1e-8);
        }
    for (int t = 0; t < 20; ++t) {
        std::vector<HermitianOperator> b, c;
        for (int i = 0; i < 2; ++i) {
            b.push_back(kron(random_hermitian_unitary(2, 9, 10 * t + i, true), identity(2)));
            c.push_back(kron(identity(2), random_hermitian_unitary(2, 10, 10 * t + i, true)));
        }
        CHECK(sos_k2_residual(b, c) <= 1e-10);
    }
    HermitianOperator sx(2, 2);
    sx << 0, 1, 1, 0;
    HermitianOperator sz(2, 2);
    sz << 1, 0, 0, -1;
    try {
        sos_residual(2, {sx, sx}, {sz, sz});
        FAIL("expected NonCommuting");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonCommuting);
    }
    CHECK_THROWS_AS(sos_residual(8, {}, {}), Error);
}

TEST_CASE("NPA level 1") {
    const std::pair<int, double> fig[] = {{2, 0.8536},  {4, 0.7500},  {7, 0.6890},  {8, 0.6771},  {12, 0.6542},
                                          {16, 0.6451}, {17, 0.6436}, {18, 0.6424}, {25, 0.6367}, {35, 0.6330}};
    for (const auto& [k, v] : fig) CHECK(std::abs(npa1_value(k) - v) <= 5e-5);
    CHECK(std::abs(npa1_value(100000) - 0.625) <= 1e-5);
    for (int k = 2; k <= 40; ++k) CHECK(std::abs(npa1_feasible_max(k) - npa1_value(k)) <= 1e-12);
    // Both branches, crossing near K = 7..8.
    CHECK(npa1_value(7) > npa1_value(8));
}

TEST_CASE("random Hermitian unitaries") {
    for (int n : {1, 2, 3, 6}) {
        const auto u = random_hermitian_unitary(n, 3, n);
        CHECK(is_hermitian_unitary(u));
        CHECK(std::abs(u.trace().real() - (n % 2)) <= 1e-10);  // ceil(n/2) eigenvalues +1
    }
    CHECK((random_hermitian_unitary(4, 9, 2) - random_hermitian_unitary(4, 9, 2)).norm() == 0.0);
}

TEST_CASE("seesaw") {
    const auto a = seesaw(3, 2, 6, 4, 42);
    const auto b = seesaw(3, 2, 6, 4, 42, 3);
    CHECK(a.finals == b.finals);
    CHECK(a.traces == b.traces);
    const double bound = 3 + 2 * std::sqrt(3.0);
    const auto cs = clifford_generators(3);
    for (std::size_t r = 0; r < a.finals.size(); ++r) {
        CHECK(a.traces[r].size() == 18);
        for (std::size_t t = 1; t < a.traces[r].size(); ++t) CHECK(a.traces[r][t] >= a.traces[r][t - 1] - 1e-9);
        CHECK(a.finals[r] <= bound + 1e-6);
        CHECK(a.finals[r] <= lambda_max(w_k_pair_operator(cs, a.b[r], a.c[r])) + 1e-9);
        for (const auto& m : a.b[r]) CHECK(is_hermitian_unitary(m));
    }
    CHECK(a.best == *std::max_element(a.finals.begin(), a.finals.end()));
    const auto c = seesaw(3, 2, 6, 4, 43);
    CHECK(c.traces != a.traces);

    const auto big = seesaw(18, 1, 3, 1, 7);
    CHECK(big.best <= 18 + 2 * std::sqrt(18.0) + 1e-6);
}

}
