#include "nlbox/moe.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "nlbox/rng.hpp"

namespace nlb::moe {

namespace {

const cd kI(0.0, 1.0);

HermitianOperator eye(Eigen::Index n) { return HermitianOperator::Identity(n, n); }

HermitianOperator sign_matrix(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<HermitianOperator> es(0.5 * (h + h.adjoint()));
    Eigen::VectorXd s = es.eigenvalues();
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = s[i] < -1e-12 ? -1.0 : 1.0;
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

HermitianOperator haar_unitary(int n, CounterRng& rng) {
    HermitianOperator g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = cd(rng.normal(), rng.normal());
    Eigen::HouseholderQR<HermitianOperator> qr(g);
    HermitianOperator q = qr.householderQ();
    const HermitianOperator r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0) q.col(j) *= r(j, j) / a;
    }
    return q;
}

void require_key(int key, const CliffordSet& cs) {
    if (key < 1 || key > cs.k) throw Error(ErrorKind::InvalidKey, "key must lie in 1..K");
    if (cs.gammas.empty()) throw Error(ErrorKind::DimensionLimit, "dense generators unavailable");
}

}  // namespace

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
    HermitianOperator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

cd PauliString::phase(std::uint32_t c) const {
    static const cd pw[4] = {1.0, kI, -1.0, -kI};
    cd p = pw[ny & 3];
    return (std::popcount(c & zmask) & 1) ? -p : p;
}

HermitianOperator PauliString::dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    HermitianOperator m = HermitianOperator::Zero(n, n);
    for (std::uint32_t c = 0; c < n; ++c) m(c ^ xmask, c) = phase(c);
    return m;
}

void PauliString::apply(const cd* v, cd* out, std::size_t inner, cd coef) const {
    const std::uint32_t n = static_cast<std::uint32_t>(dim());
    for (std::uint32_t c = 0; c < n; ++c) {
        const cd ph = coef * phase(c);
        const cd* src = v + c * inner;
        cd* dst = out + (c ^ xmask) * inner;
        for (std::size_t r = 0; r < inner; ++r) dst[r] += ph * src[r];
    }
}

std::vector<PauliString> pauli_generators(int k) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "K must be at least 1");
    const int n = k / 2;
    if (n >= 31 || (std::size_t{1} << n) > kMaxPauliDim)
        throw Error(ErrorKind::DimensionLimit, "generator dimension 2^" + std::to_string(n) + " exceeds the cap");
    auto bit = [n](int q) { return std::uint32_t{1} << (n - q); };  // qubit q in 1..n
    std::uint32_t xprefix = 0;
    std::vector<PauliString> out;
    for (int i = 1; i <= n; ++i) {
        PauliString y{n, xprefix | bit(i), bit(i), 1};
        PauliString z{n, xprefix, bit(i), 0};
        out.push_back(y);
        out.push_back(z);
        xprefix |= bit(i);
    }
    if (k % 2 == 1) out.push_back(PauliString{n, xprefix, 0, 0});
    return out;
}

CliffordSet clifford_generators(int k) {
    CliffordSet cs;
    cs.k = k;
    cs.strings = pauli_generators(k);
    cs.d = cs.strings.front().dim();
    if (cs.d > kMaxDenseGeneratorDim)
        throw Error(ErrorKind::DimensionLimit, "dense generators capped at dimension " +
                                                   std::to_string(kMaxDenseGeneratorDim));
    for (const auto& p : cs.strings) cs.gammas.push_back(p.dense());
    return cs;
}

double anticommutation_residual(const CliffordSet& cs) {
    double r = 0.0;
    const auto d = static_cast<Eigen::Index>(cs.d);
    for (int i = 0; i < cs.k; ++i)
        for (int j = i; j < cs.k; ++j) {
            HermitianOperator ac = cs.gammas[i] * cs.gammas[j] + cs.gammas[j] * cs.gammas[i];
            if (i == j) ac -= 2.0 * eye(d);
            r = std::max(r, ac.cwiseAbs().maxCoeff());
        }
    return r;
}

HermitianOperator encrypt(int m, int key, const CliffordSet& cs) {
    require_key(key, cs);
    if (m != 0 && m != 1) throw Error(ErrorKind::InvalidArgument, "message must be a bit");
    const double s = m == 0 ? 1.0 : -1.0;
    return (eye(cs.d) + s * cs.gammas[key - 1]) / static_cast<double>(cs.d);
}

std::array<double, 2> decrypt(const HermitianOperator& rho, int key, const CliffordSet& cs) {
    require_key(key, cs);
    const auto d = static_cast<Eigen::Index>(cs.d);
    if (rho.rows() != d || rho.cols() != d) throw Error(ErrorKind::InvalidArgument, "state has the wrong dimension");
    std::array<double, 2> p{};
    for (int i = 0; i < 2; ++i) {
        const HermitianOperator proj = 0.5 * (eye(d) + (i == 0 ? 1.0 : -1.0) * cs.gammas[key - 1]);
        p[i] = (proj * rho * proj).trace().real();
    }
    return p;
}

bool is_hermitian_unitary(const HermitianOperator& u, double tol) {
    if (u.rows() != u.cols()) return false;
    if ((u - u.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    return (u * u - eye(u.rows())).cwiseAbs().maxCoeff() <= tol;
}

HermitianOperator w_k_operator(const CliffordSet& cs, const std::vector<HermitianOperator>& u_list) {
    if (static_cast<int>(u_list.size()) != cs.k) throw Error(ErrorKind::InvalidArgument, "need one U per key");
    if (cs.gammas.empty()) throw Error(ErrorKind::DimensionLimit, "dense generators unavailable");
    const Eigen::Index D = u_list.front().rows();
    if (cs.d * D * D > kMaxDenseDim) throw Error(ErrorKind::DimensionLimit, "d * D^2 exceeds the dense cap");
    for (const auto& u : u_list)
        if (u.rows() != D || !is_hermitian_unitary(u))
            throw Error(ErrorKind::NotHermitianUnitary, "every U_k must be a Hermitian unitary of one size");
    const auto d = static_cast<Eigen::Index>(cs.d);
    HermitianOperator w = HermitianOperator::Zero(d * D * D, d * D * D);
    for (int k = 0; k < cs.k; ++k) {
        const auto& u = u_list[k];
        w += kron(cs.gammas[k], kron(u, eye(D)) + kron(eye(D), u));
        w += kron(eye(d), kron(u, u));
    }
    return w;
}

HermitianOperator w_k_pair_operator(const CliffordSet& cs, const std::vector<HermitianOperator>& b_list,
                                    const std::vector<HermitianOperator>& c_list) {
    if (static_cast<int>(b_list.size()) != cs.k || static_cast<int>(c_list.size()) != cs.k)
        throw Error(ErrorKind::InvalidArgument, "need K operators B and K operators C");
    if (cs.gammas.empty()) throw Error(ErrorKind::DimensionLimit, "dense generators unavailable");
    const Eigen::Index D = b_list.front().rows();
    if (cs.d * D * D > kMaxDenseDim) throw Error(ErrorKind::DimensionLimit, "d * D^2 exceeds the dense cap");
    const auto d = static_cast<Eigen::Index>(cs.d);
    HermitianOperator w = HermitianOperator::Zero(d * D * D, d * D * D);
    for (int k = 0; k < cs.k; ++k) {
        w += kron(cs.gammas[k], kron(b_list[k], eye(D)) + kron(eye(D), c_list[k]));
        w += kron(eye(d), kron(b_list[k], c_list[k]));
    }
    return w;
}

EigenPair lanczos_largest(const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& matvec,
                          Eigen::Index n, const Eigen::VectorXcd& start, double tol, double stall) {
    if (n <= 0 || start.size() != n) throw Error(ErrorKind::InvalidArgument, "bad Lanczos dimensions");
    // Thick-restart Lanczos: the basis spans a Krylov space of the start vector; on
    // overflow it shrinks to the leading Ritz vectors and keeps expanding by residuals.
    const Eigen::Index m = std::min<Eigen::Index>(n, 64);
    const Eigen::Index keep = std::min<Eigen::Index>(m - 1, 16);
    Eigen::MatrixXcd V(n, m), AV(n, m);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m, m);
    Eigen::VectorXcd w = start;
    if (w.norm() == 0.0) w.setOnes();
    Eigen::Index j = 0;
    EigenPair best;
    double last_cycle = -std::numeric_limits<double>::infinity();
    Eigen::VectorXcd aw(n);
    for (int step = 0; step < 20000; ++step) {
        // Gram-Schmidt with a second pass only when cancellation is severe.
        for (int pass = 0; pass < 2 && j > 0; ++pass) {
            const double before = w.norm();
            w -= V.leftCols(j) * (V.leftCols(j).adjoint() * w);
            if (w.norm() > 0.7 * before) break;
        }
        const double wn = w.norm();
        const bool exhausted = wn < 1e-14;  // invariant subspace reached
        if (!exhausted) {
            V.col(j) = w / wn;
            matvec(V.col(j), aw);
            AV.col(j) = aw;
            H.block(0, j, j + 1, 1) = V.leftCols(j + 1).adjoint() * aw;
            H.block(j, 0, 1, j) = H.block(0, j, j, 1).adjoint();
            H(j, j) = H(j, j).real();
            ++j;
            w = aw;
        }
        if (!exhausted && j % 8 != 0 && j < m && j < n) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.topLeftCorner(j, j));
        const Eigen::VectorXcd y = es.eigenvectors().col(j - 1);
        best.value = es.eigenvalues()[j - 1];
        best.vector = V.leftCols(j) * y;
        const Eigen::VectorXcd r = AV.leftCols(j) * y - best.value * best.vector;
        const double scale = std::max(1.0, std::abs(best.value));
        if (exhausted || r.norm() <= tol * scale || j == n) break;
        if (j == m) {
            // Stop when a whole restart cycle no longer moves the Ritz value.
            if (best.value - last_cycle <= stall * scale) break;
            last_cycle = best.value;
            const Eigen::MatrixXcd Y = es.eigenvectors().rightCols(keep);
            const Eigen::MatrixXcd nv = V * Y, nav = AV * Y;
            V.leftCols(keep) = nv;
            AV.leftCols(keep) = nav;
            H.setZero();
            for (Eigen::Index i = 0; i < keep; ++i) H(i, i) = es.eigenvalues()[j - keep + i];
            j = keep;
            w = r;
        }
    }
    best.vector.normalize();
    return best;
}

double opnorm_hermitian(const HermitianOperator& h) {
    if (h.rows() == 0) return 0.0;
    if (h.rows() <= static_cast<Eigen::Index>(kMaxDenseDim)) {
        Eigen::SelfAdjointEigenSolver<HermitianOperator> es(h, Eigen::EigenvaluesOnly);
        return std::max(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[h.rows() - 1]));
    }
    Eigen::VectorXcd start = Eigen::VectorXcd::Ones(h.rows());
    const auto hi = lanczos_largest([&](const Eigen::VectorXcd& v, Eigen::VectorXcd& o) { o = h * v; }, h.rows(), start);
    const auto lo = lanczos_largest([&](const Eigen::VectorXcd& v, Eigen::VectorXcd& o) { o = -(h * v); }, h.rows(), start);
    return std::max(std::abs(hi.value), std::abs(lo.value));
}

double win_prob(int k, double norm) {
    if (k < 1 || norm < 0) throw Error(ErrorKind::InvalidArgument, "need K >= 1 and norm >= 0");
    return 0.25 + norm / (4.0 * k);
}

double alpha_k(int k) {
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "need K >= 2");
    const double K = k;
    return ((3 * K - 2) * std::sqrt(K) - K * K) / (2 * K * (K - 1));
}

namespace {

void check_sos_inputs(int k, const std::vector<HermitianOperator>& b_list, const std::vector<HermitianOperator>& c_list) {
    if (static_cast<int>(b_list.size()) != k || static_cast<int>(c_list.size()) != k)
        throw Error(ErrorKind::InvalidArgument, "need K operators b and K operators c");
    const Eigen::Index n = b_list.front().rows();
    for (int i = 0; i < k; ++i) {
        if (b_list[i].rows() != n || c_list[i].rows() != n || !is_hermitian_unitary(b_list[i]) ||
            !is_hermitian_unitary(c_list[i]))
            throw Error(ErrorKind::NotHermitianUnitary, "b and c must be Hermitian unitaries of one size");
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if ((b_list[i] * c_list[j] - c_list[j] * b_list[i]).cwiseAbs().maxCoeff() > 1e-10)
                throw Error(ErrorKind::NonCommuting, "b_i and c_j must commute");
}

HermitianOperator p_operator(const std::vector<HermitianOperator>& gammas, const std::vector<HermitianOperator>& b,
                             const std::vector<HermitianOperator>& c) {
    const double K = static_cast<double>(gammas.size());
    const Eigen::Index d = gammas.front().rows(), n = b.front().rows();
    HermitianOperator p = (K + 2 * std::sqrt(K)) * eye(d * n);
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        p -= kron(gammas[i], b[i] + c[i]);
        p -= kron(eye(d), b[i] * c[i]);
    }
    return p;
}

}  // namespace

double sos_residual(int k, const std::vector<HermitianOperator>& b_list, const std::vector<HermitianOperator>& c_list) {
    if (k < 2 || k > 7) throw Error(ErrorKind::OutOfRange, "the parameterized SoS is defined for 2 <= K <= 7");
    check_sos_inputs(k, b_list, c_list);
    const CliffordSet cs = clifford_generators(k);
    const double K = k, rk = std::sqrt(K);
    const Eigen::Index d = static_cast<Eigen::Index>(cs.d), n = b_list.front().rows();
    HermitianOperator q = rk * eye(d * n);
    for (int j = 0; j < k; ++j) q -= kron(cs.gammas[j], c_list[j]);
    HermitianOperator rhs = alpha_k(k) * q * q;
    const double coef = (K - rk) / (2 * K * (K - 1));
    for (int i = 0; i < k; ++i) {
        const HermitianOperator h = q + (rk + 1) * kron(cs.gammas[i], c_list[i] - b_list[i]);
        rhs += coef * h * h;
    }
    return (p_operator(cs.gammas, b_list, c_list) - rhs).cwiseAbs().maxCoeff();
}

double sos_k2_residual(const std::vector<HermitianOperator>& b_list, const std::vector<HermitianOperator>& c_list) {
    check_sos_inputs(2, b_list, c_list);
    HermitianOperator sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    const Eigen::Index n = b_list.front().rows();
    const HermitianOperator id = eye(2 * n);
    const auto& b = b_list;
    const auto& c = c_list;
    const HermitianOperator h1 = kron(sx, b[0]) + kron(sz, c[1]) - std::sqrt(2.0) * id;
    const HermitianOperator h2 = kron(sx, c[0]) + kron(sz, b[1]) - std::sqrt(2.0) * id;
    const HermitianOperator h3 = kron(eye(2), b[0] - c[0]);
    const HermitianOperator h4 = kron(eye(2), b[1] - c[1]);
    const double w = 1.0 / (2.0 * std::sqrt(2.0));
    const HermitianOperator rhs = w * h1 * h1 + w * h2 * h2 + 0.5 * h3 * h3 + 0.5 * h4 * h4;
    return (p_operator({sx, sz}, b, c) - rhs).cwiseAbs().maxCoeff();
}

double npa1_value(int k) {
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "need K >= 2");
    const double K = k;
    if (k <= 7) return 0.5 + 1.0 / (2.0 * std::sqrt(K));
    return 0.625 + 1.0 / (2.0 * (K - 2)) - 1.0 / (4.0 * K);
}

double npa1_feasible_max(int k) {
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "need K >= 2");
    const double K = k;
    auto lambda = [K](double x) { return x / 2 + std::sqrt(std::max(0.0, 2 - x * (K - 2) / K)); };
    // lambda is concave on [0, 2]; clamp the stationary point.
    double x = 2.0;
    if (k > 2) x = std::clamp(2 * K / (K - 2) - (K - 2) / K, 0.0, 2.0);
    return 0.25 + lambda(x) / 4;
}

HermitianOperator random_hermitian_unitary(int n, std::uint64_t seed, std::uint64_t stream, bool random_signs) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
    CounterRng rng(seed, stream, 0x5eed);
    const HermitianOperator v = haar_unitary(n, rng);
    Eigen::VectorXcd s(n);
    for (int i = 0; i < n; ++i)
        s[i] = random_signs ? (rng.uniform() < 0.5 ? 1.0 : -1.0) : (i < (n + 1) / 2 ? 1.0 : -1.0);
    return v * s.asDiagonal() * v.adjoint();
}

namespace {

constexpr Eigen::Index kSeesawDenseDim = 1024;
constexpr double kSeesawTol = 1e-8;
constexpr double kSeesawStall = 1e-8;

struct SeesawState {
    int k, D;
    std::size_t d;
    const std::vector<PauliString>* gens;
    std::vector<HermitianOperator> B, C;
    HermitianOperator S;                // sum_k B_k (x) C_k
    std::vector<HermitianOperator> BT;  // B_k^T

    void refresh() {
        const Eigen::Index D2 = static_cast<Eigen::Index>(D) * D;
        S = HermitianOperator::Zero(D2, D2);
        BT.resize(k);
        for (int i = 0; i < k; ++i) {
            S += kron(B[i], C[i]);
            BT[i] = B[i].transpose();
        }
    }

    // W v = (I (x) S) v + sum_k (Gamma_k (x) I) (B_k (x) I + I (x) C_k) v. Each block of
    // D^2 entries is a D x D column-major matrix with rows j (C factor), columns i (B factor).
    void apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
        const Eigen::Index D2 = static_cast<Eigen::Index>(D) * D, dd = static_cast<Eigen::Index>(d);
        out.resize(v.size());
        Eigen::Map<const Eigen::MatrixXcd> V(v.data(), D2, dd);
        Eigen::Map<Eigen::MatrixXcd> O(out.data(), D2, dd);
        O.noalias() = S * V;
        Eigen::Map<const Eigen::MatrixXcd> Vj(v.data(), D, D * dd);
        Eigen::MatrixXcd T(D, D * dd);
        for (int i = 0; i < k; ++i) {
            T.noalias() = C[i] * Vj;
            for (Eigen::Index a = 0; a < dd; ++a) T.middleCols(a * D, D).noalias() += Vj.middleCols(a * D, D) * BT[i];
            (*gens)[i].apply(T.data(), out.data(), static_cast<std::size_t>(D2));
        }
    }

    double value(const Eigen::VectorXcd& z) const {
        Eigen::VectorXcd wz;
        apply(z, wz);
        return z.dot(wz).real();
    }
};

EigenPair top_eigenpair(const SeesawState& st, Eigen::Index n, const Eigen::VectorXcd& start) {
    if (n > kSeesawDenseDim)
        return lanczos_largest([&](const Eigen::VectorXcd& v, Eigen::VectorXcd& o) { st.apply(v, o); }, n, start,
                               kSeesawTol, kSeesawStall);
    HermitianOperator w(n, n);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n), col;
    for (Eigen::Index i = 0; i < n; ++i) {
        e[i] = 1.0;
        st.apply(e, col);
        w.col(i) = col;
        e[i] = 0.0;
    }
    Eigen::SelfAdjointEigenSolver<HermitianOperator> es(0.5 * (w + w.adjoint()));
    return {es.eigenvalues()[n - 1], es.eigenvectors().col(n - 1)};
}

// Block a of z as a D x D matrix with rows i (B factor) and columns j (C factor).
HermitianOperator block(const Eigen::VectorXcd& z, std::size_t a, int D) {
    HermitianOperator m(D, D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) m(i, j) = z[(a * D + i) * D + j];
    return m;
}

std::vector<HermitianOperator> blocks(const Eigen::VectorXcd& z, std::size_t d, int D) {
    std::vector<HermitianOperator> out(d);
    for (std::size_t a = 0; a < d; ++a) out[a] = block(z, a, D);
    return out;
}

// T_a = sum over c with c ^ xmask = a of phase(c) M_c.
std::vector<HermitianOperator> gamma_mix(const PauliString& p, const std::vector<HermitianOperator>& m) {
    std::vector<HermitianOperator> t(m.size(), HermitianOperator::Zero(m[0].rows(), m[0].cols()));
    for (std::uint32_t c = 0; c < m.size(); ++c) t[c ^ p.xmask] += p.phase(c) * m[c];
    return t;
}

}  // namespace

SeesawResult seesaw(int k, int adversary_dim, int iters, int restarts, std::uint64_t seed, int threads) {
    if (k < 1 || adversary_dim < 1 || iters < 1 || restarts < 1)
        throw Error(ErrorKind::InvalidArgument, "K, D, iters and restarts must be positive");
    const auto gens = pauli_generators(k);
    const std::size_t d = gens.front().dim();
    const int D = adversary_dim;
    const std::size_t n = d * D * D;
    if (n > (std::size_t{1} << 16)) throw Error(ErrorKind::DimensionLimit, "d * D^2 exceeds 65536");

    SeesawResult res;
    res.finals.assign(restarts, 0.0);
    res.traces.assign(restarts, {});
    res.b.assign(restarts, {});
    res.c.assign(restarts, {});
    auto run = [&](int r) {
        CounterRng rng(seed, static_cast<std::uint64_t>(r), 0);
        SeesawState st{k, D, d, &gens, {}, {}, {}, {}};
        for (int i = 0; i < k; ++i) {
            st.B.push_back(random_hermitian_unitary(D, rng.next_u64(), 2 * i));
            st.C.push_back(random_hermitian_unitary(D, rng.next_u64(), 2 * i + 1));
        }
        st.refresh();
        Eigen::VectorXcd z(static_cast<Eigen::Index>(n));
        for (auto& v : z) v = cd(rng.normal(), rng.normal());
        z.normalize();
        double cur = st.value(z);
        std::vector<double> trace;
        for (int it = 0; it < iters; ++it) {
            // (1) z: top eigenvector, started near the current z.
            CounterRng prng(seed, static_cast<std::uint64_t>(r), 1 + static_cast<std::uint64_t>(it));
            Eigen::VectorXcd start = z;
            for (auto& v : start) v += 1e-3 * cd(prng.normal(), prng.normal());
            const auto ep = top_eigenpair(st, static_cast<Eigen::Index>(n), start);
            if (ep.value > cur) {
                z = ep.vector;
                cur = st.value(z);
            }
            trace.push_back(std::max(cur, 0.0));
            // (2) B_k = conj(sign(N_k)), N_k = sum_a conj(M_a) T_a^T with T = (Gamma_k (x) I + I (x) C_k) z.
            auto m = blocks(z, d, D);
            for (int i = 0; i < k; ++i) {
                auto t = gamma_mix(gens[i], m);
                HermitianOperator nk = HermitianOperator::Zero(D, D);
                for (std::size_t a = 0; a < d; ++a) nk += m[a].conjugate() * (t[a] + m[a] * st.C[i].transpose()).transpose();
                st.B[i] = sign_matrix(nk).conjugate();
            }
            st.refresh();
            cur = st.value(z);
            trace.push_back(std::max(cur, 0.0));
            // (3) C_k from M_k = sum_a M_a^* (Gamma_k (x) I + I (x) B_k) M_a.
            for (int i = 0; i < k; ++i) {
                auto t = gamma_mix(gens[i], m);
                HermitianOperator mk = HermitianOperator::Zero(D, D);
                for (std::size_t a = 0; a < d; ++a) mk += m[a].adjoint() * (t[a] + st.B[i] * m[a]);
                st.C[i] = sign_matrix(mk).conjugate();
            }
            st.refresh();
            cur = st.value(z);
            trace.push_back(std::max(cur, 0.0));
        }
        res.finals[r] = std::max(cur, 0.0);
        res.traces[r] = std::move(trace);
        res.b[r] = st.B;
        res.c[r] = st.C;
    };
    if (threads <= 1) {
        for (int r = 0; r < restarts; ++r) run(r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < std::min(threads, restarts); ++t)
            pool.emplace_back([&] {
                for (int r = next++; r < restarts; r = next++) run(r);
            });
        for (auto& th : pool) th.join();
    }
    res.best_restart = static_cast<int>(std::max_element(res.finals.begin(), res.finals.end()) - res.finals.begin());
    res.best = res.finals[res.best_restart];
    return res;
}

}  // namespace nlb::moe
