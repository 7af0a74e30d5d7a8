#include "nlbox/box.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlbox/lp.hpp"

namespace nlb {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NotInSpan: return "NotInSpan";
        case ErrorKind::DegenerateBasis: return "DegenerateBasis";
        case ErrorKind::WeightSum: return "WeightSum";
        case ErrorKind::InvalidWiring: return "InvalidWiring";
        case ErrorKind::InvalidBox: return "InvalidBox";
        case ErrorKind::UnsupportedClass: return "UnsupportedClass";
        case ErrorKind::DepthLimit: return "DepthLimit";
        case ErrorKind::MissingPartition: return "MissingPartition";
        case ErrorKind::NotSymmetric: return "NotSymmetric";
        case ErrorKind::ImperfectStrategy: return "ImperfectStrategy";
        case ErrorKind::ParameterTooSmall: return "ParameterTooSmall";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::NotAutomorphism: return "NotAutomorphism";
        case ErrorKind::DimensionLimit: return "DimensionLimit";
        case ErrorKind::InvalidKey: return "InvalidKey";
        case ErrorKind::NotHermitianUnitary: return "NotHermitianUnitary";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::NonCommuting: return "NonCommuting";
    }
    return "Unknown";
}

std::string ValidationReport::summary() const {
    if (ok) return "ok";
    std::ostringstream os;
    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (i) os << "; ";
        os << failures[i].condition << " residual " << failures[i].value;
    }
    return os.str();
}

Box& Box::operator+=(const Box& o) {
    for (int i = 0; i < 16; ++i) p[i] += o.p[i];
    return *this;
}

Box& Box::operator-=(const Box& o) {
    for (int i = 0; i < 16; ++i) p[i] -= o.p[i];
    return *this;
}

Box& Box::operator*=(double s) {
    for (double& v : p) v *= s;
    return *this;
}

Box operator+(Box lhs, const Box& rhs) { return lhs += rhs; }
Box operator-(Box lhs, const Box& rhs) { return lhs -= rhs; }
Box operator*(double s, Box b) { return b *= s; }

double max_abs_diff(const Box& lhs, const Box& rhs) {
    double m = 0.0;
    for (int i = 0; i < 16; ++i) m = std::max(m, std::abs(lhs.p[i] - rhs.p[i]));
    return m;
}

namespace {

template <class F>
Box tabulate(F f) {
    Box b;
    for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) b(a, bb, x, y) = f(a, bb, x, y);
    return b;
}

}  // namespace

Box make_local(int alpha, int beta, int gamma, int delta) {
    return tabulate([=](int a, int b, int x, int y) {
        return (a == ((alpha * x) ^ beta) && b == ((gamma * y) ^ delta)) ? 1.0 : 0.0;
    });
}

Box make_nonlocal(int alpha, int beta, int gamma) {
    return tabulate([=](int a, int b, int x, int y) {
        return (a ^ b) == ((x * y) ^ (alpha * x) ^ (beta * y) ^ gamma) ? 0.5 : 0.0;
    });
}

Box make_pr() { return make_nonlocal(0, 0, 0); }

Box make_pr_prime() {
    return tabulate([](int a, int b, int x, int y) {
        return (a ^ b) == ((x ^ 1) * (y ^ 1)) ? 0.5 : 0.0;
    });
}

Box make_sr() {
    return tabulate([](int a, int b, int, int) { return a == b ? 0.5 : 0.0; });
}

Box make_uniform() {
    Box b;
    b.p.fill(0.25);
    return b;
}

Box make_p00() { return make_local(0, 0, 0, 0); }
Box make_p11() { return make_local(0, 1, 0, 1); }

Box make_named_box(const BoxName& name) {
    const auto& q = name.params;
    for (int v : q)
        if (v != 0 && v != 1) throw Error(ErrorKind::InvalidArgument, "box parameters must be bits");
    switch (name.kind) {
        case BoxKind::PR: return make_pr();
        case BoxKind::PRPrime: return make_pr_prime();
        case BoxKind::SR: return make_sr();
        case BoxKind::I: return make_uniform();
        case BoxKind::P00: return make_p00();
        case BoxKind::P11: return make_p11();
        case BoxKind::Local: return make_local(q[0], q[1], q[2], q[3]);
        case BoxKind::Nonlocal: return make_nonlocal(q[0], q[1], q[2]);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown box kind");
}

std::optional<BoxName> parse_box_name(const std::string& s) {
    auto bits = [](const std::string& t, std::size_t n) -> std::optional<std::array<int, 4>> {
        if (t.size() != n) return std::nullopt;
        std::array<int, 4> r{};
        for (std::size_t i = 0; i < n; ++i) {
            if (t[i] != '0' && t[i] != '1') return std::nullopt;
            r[i] = t[i] - '0';
        }
        return r;
    };
    if (s == "PR") return BoxName{BoxKind::PR, {}};
    if (s == "PR'" || s == "PRp" || s == "PRprime") return BoxName{BoxKind::PRPrime, {}};
    if (s == "SR") return BoxName{BoxKind::SR, {}};
    if (s == "I") return BoxName{BoxKind::I, {}};
    if (s == "P00") return BoxName{BoxKind::P00, {}};
    if (s == "P11") return BoxName{BoxKind::P11, {}};
    if (s.rfind("PNL", 0) == 0) {
        if (auto r = bits(s.substr(3), 3)) return BoxName{BoxKind::Nonlocal, *r};
        return std::nullopt;
    }
    if (s.rfind("PL", 0) == 0) {
        if (auto r = bits(s.substr(2), 4)) return BoxName{BoxKind::Local, *r};
    }
    return std::nullopt;
}

ValidationReport validate_ns(const Box& b, double tol) {
    ValidationReport rep;
    double neg = 0.0;
    for (double v : b.p) neg = std::max(neg, -v);
    rep.check("non-negativity", neg, tol);
    double norm = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            double s = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb) s += b(a, bb, x, y);
            norm = std::max(norm, std::abs(s - 1.0));
        }
    rep.check("normalization", norm, tol);
    double sigA = 0.0, sigB = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int x = 0; x < 2; ++x) {
            const double m0 = b(a, 0, x, 0) + b(a, 1, x, 0);
            const double m1 = b(a, 0, x, 1) + b(a, 1, x, 1);
            sigA = std::max(sigA, std::abs(m0 - m1));
        }
    for (int bb = 0; bb < 2; ++bb)
        for (int y = 0; y < 2; ++y) {
            const double m0 = b(0, bb, 0, y) + b(1, bb, 0, y);
            const double m1 = b(0, bb, 1, y) + b(1, bb, 1, y);
            sigB = std::max(sigB, std::abs(m0 - m1));
        }
    rep.check("non-signaling Alice", sigA, tol);
    rep.check("non-signaling Bob", sigB, tol);
    return rep;
}

int game_predicate(Game g, int x, int y) {
    switch (g) {
        case Game::CHSH: return x * y;
        case Game::CHSHPrime: return (x ^ 1) * (y ^ 1);
        case Game::CHSHSecond: return x * (y ^ 1);
    }
    return 0;
}

double chsh_value(const Box& b, Game g) {
    double s = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const int f = game_predicate(g, x, y);
            for (int a = 0; a < 2; ++a) s += b(a, a ^ f, x, y);
        }
    return 0.25 * s;
}

double bias(const Box& b, int x, int y) {
    const int f = x * y;
    return 2.0 * (b(0, f, x, y) + b(1, 1 ^ f, x, y)) - 1.0;
}

Box uniformize(const Box& b) {
    return tabulate([&](int a, int bb, int x, int y) { return 0.5 * (b(a, bb, x, y) + b(a ^ 1, bb ^ 1, x, y)); });
}

Box mix(const std::vector<std::pair<double, Box>>& terms, double tol) {
    double w = 0.0;
    Box out;
    for (const auto& [c, box] : terms) {
        w += c;
        out += c * box;
    }
    if (std::abs(w - 1.0) > tol) throw Error(ErrorKind::WeightSum, "weights sum to " + std::to_string(w));
    return out;
}

Box local_deterministic(int k) { return make_local((k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1); }

namespace {

// Eight coordinates that determine a non-signaling box: Alice's and Bob's
// marginals for output 0 and the four probabilities of (0,0).
std::array<double, 8> ns_coordinates(const Box& b) {
    return {b(0, 0, 0, 0) + b(0, 1, 0, 0), b(0, 0, 1, 0) + b(0, 1, 1, 0),
            b(0, 0, 0, 0) + b(1, 0, 0, 0), b(0, 0, 0, 1) + b(1, 0, 0, 1),
            b(0, 0, 0, 0),                 b(0, 0, 0, 1),
            b(0, 0, 1, 0),                 b(0, 0, 1, 1)};
}

}  // namespace

LocalityResult is_local(const Box& b, double tol) {
    LocalityResult out;
    if (!validate_ns(b, tol).ok) return out;
    std::vector<std::vector<double>> A(9, std::vector<double>(16, 0.0));
    std::vector<double> rhs(9, 0.0);
    const auto target = ns_coordinates(b);
    for (int k = 0; k < 16; ++k) {
        const auto c = ns_coordinates(local_deterministic(k));
        for (int r = 0; r < 8; ++r) A[r][k] = c[r];
        A[8][k] = 1.0;
    }
    for (int r = 0; r < 8; ++r) rhs[r] = target[r];
    rhs[8] = 1.0;
    const auto res = lp::find_feasible(A, rhs, tol);
    if (!res.feasible) return out;
    std::array<double, 16> w{};
    Box rec;
    for (int k = 0; k < 16; ++k) {
        w[k] = res.x[k];
        rec += w[k] * local_deterministic(k);
    }
    if (max_abs_diff(rec, b) > tol) return out;
    out.local = true;
    out.weights = w;
    return out;
}

CollapseReport collapse_criterion(const Box& b) {
    const double e00 = bias(b, 0, 0), e01 = bias(b, 0, 1), e10 = bias(b, 1, 0), e11 = bias(b, 1, 1);
    CollapseReport r;
    const double s = e00 + e01 + e10 + e11;
    r.A = s * s;
    r.B = 2 * e00 * e00 + 4 * e01 * e10 + 2 * e11 * e11;
    r.satisfied = r.A + r.B > 16.0;
    if (r.A > r.B) {
        r.mu_max = std::sqrt((r.A + r.B) / (3.0 * (r.A - r.B)));
        if (r.satisfied) r.mu_star = std::sqrt((r.A + r.B - 16.0) / (r.A - r.B));
    }
    return r;
}

std::vector<double> iterate_bias(const Box& b, double mu0, int steps) {
    if (std::abs(mu0) > 1.0) throw Error(ErrorKind::InvalidArgument, "|mu0| must be at most 1");
    const auto r = collapse_criterion(b);
    std::vector<double> seq{mu0};
    double mu = mu0;
    for (int k = 0; k < steps; ++k) {
        mu = mu / 16.0 * (r.A + r.B - mu * mu * (r.A - r.B));
        seq.push_back(mu);
    }
    return seq;
}

std::array<double, 3> slice_coordinates(const Box& b, const Basis3& basis, double tol) {
    Eigen::Matrix<double, 17, 3> M;
    Eigen::Matrix<double, 17, 1> rhs;
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 16; ++i) M(i, k) = basis[k].p[i];
        M(16, k) = 1.0;
    }
    for (int i = 0; i < 16; ++i) rhs(i) = b.p[i];
    rhs(16) = 1.0;

    Eigen::Matrix<double, 16, 2> D;
    for (int i = 0; i < 16; ++i) {
        D(i, 0) = basis[1].p[i] - basis[0].p[i];
        D(i, 1) = basis[2].p[i] - basis[0].p[i];
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 16, 2>> svd(D);
    if (svd.singularValues()(1) < 1e-9 * std::max(1.0, svd.singularValues()(0)))
        throw Error(ErrorKind::DegenerateBasis, "basis boxes are affinely dependent");

    const Eigen::Vector3d c = M.colPivHouseholderQr().solve(rhs);
    const double resid = (M * c - rhs).cwiseAbs().maxCoeff();
    if (resid > tol) throw Error(ErrorKind::NotInSpan, "residual " + std::to_string(resid));
    return {c(0), c(1), c(2)};
}

std::vector<double> span_coordinates(const Box& b, const std::vector<Box>& basis, double tol) {
    if (basis.empty()) throw Error(ErrorKind::InvalidArgument, "empty basis");
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd M(16, n);
    Eigen::VectorXd rhs(16);
    for (Eigen::Index k = 0; k < n; ++k)
        for (int i = 0; i < 16; ++i) M(i, k) = basis[k].p[i];
    for (int i = 0; i < 16; ++i) rhs(i) = b.p[i];
    const auto qr = M.colPivHouseholderQr();
    if (qr.rank() < n) throw Error(ErrorKind::DegenerateBasis, "basis boxes are linearly dependent");
    const Eigen::VectorXd c = qr.solve(rhs);
    const double resid = (M * c - rhs).cwiseAbs().maxCoeff();
    if (resid > tol) throw Error(ErrorKind::NotInSpan, "residual " + std::to_string(resid));
    return {c.data(), c.data() + n};
}

Box relabel(const Box& b, int s, int t, int u, int v, int w, int z) {
    return tabulate([&](int a, int bb, int x, int y) {
        const int xs = x ^ s, yt = y ^ t;
        return b(a ^ (u * xs) ^ v, bb ^ (w * yt) ^ z, xs, yt);
    });
}

}  // namespace nlb
