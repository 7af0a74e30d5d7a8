#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "nlbox/common.hpp"

namespace nlb::moe {

using cd = std::complex<double>;
using HermitianOperator = Eigen::MatrixXcd;

// Pauli string on n qubits, qubit 1 being the most significant bit.
// P|c> = phase(c) |c ^ xmask>.
struct PauliString {
    int qubits = 0;
    std::uint32_t xmask = 0;  // X or Y
    std::uint32_t zmask = 0;  // Y or Z
    int ny = 0;               // number of Y factors

    std::size_t dim() const { return std::size_t{1} << qubits; }
    cd phase(std::uint32_t c) const;
    HermitianOperator dense() const;
    // out += coef * (P (x) I_inner) v.
    void apply(const cd* v, cd* out, std::size_t inner, cd coef = 1.0) const;
};

inline constexpr std::size_t kMaxDenseGeneratorDim = 256;
inline constexpr std::size_t kMaxPauliDim = 4096;
inline constexpr std::size_t kMaxDenseDim = 4096;

struct CliffordSet {
    int k = 0;
    std::size_t d = 1;
    std::vector<PauliString> strings;
    std::vector<HermitianOperator> gammas;  // dense copies, empty when d > kMaxDenseGeneratorDim
};

// Jordan-Wigner generators on floor(k/2) qubits; odd k appends sigma_x^{(x)n}.
std::vector<PauliString> pauli_generators(int k);
CliffordSet clifford_generators(int k);
double anticommutation_residual(const CliffordSet& cs);

HermitianOperator encrypt(int m, int key, const CliffordSet& cs);
std::array<double, 2> decrypt(const HermitianOperator& rho, int key, const CliffordSet& cs);

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);
bool is_hermitian_unitary(const HermitianOperator& u, double tol = 1e-10);
HermitianOperator w_k_operator(const CliffordSet& cs, const std::vector<HermitianOperator>& u_list);
// Sum_k Gamma_k (x) B_k (x) I + Gamma_k (x) I (x) C_k + I (x) B_k (x) C_k.
HermitianOperator w_k_pair_operator(const CliffordSet& cs, const std::vector<HermitianOperator>& b_list,
                                    const std::vector<HermitianOperator>& c_list);

// Largest eigenpair by thick-restart Lanczos. Stops at relative residual tol, or
// when a full restart cycle raises the Ritz value by less than stall (relative).
struct EigenPair {
    double value = 0.0;
    Eigen::VectorXcd vector;
};
EigenPair lanczos_largest(const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& matvec,
                          Eigen::Index n, const Eigen::VectorXcd& start, double tol = 1e-10, double stall = 1e-13);

double opnorm_hermitian(const HermitianOperator& h);
double win_prob(int k, double norm);
double alpha_k(int k);

// Max-norm residual of the parameterized SoS identity; b and c act on one space.
double sos_residual(int k, const std::vector<HermitianOperator>& b_list, const std::vector<HermitianOperator>& c_list);
// Four-square decomposition for K = 2 with Gamma_1 = sigma_x, Gamma_2 = sigma_z.
double sos_k2_residual(const std::vector<HermitianOperator>& b_list, const std::vector<HermitianOperator>& c_list);

double npa1_value(int k);
double npa1_feasible_max(int k);

// Random Hermitian unitary with Haar eigenvectors and ceil(n/2) eigenvalues +1.
HermitianOperator random_hermitian_unitary(int n, std::uint64_t seed, std::uint64_t stream, bool random_signs = false);

struct SeesawResult {
    double best = 0.0;
    int best_restart = 0;
    std::vector<double> finals;               // per restart
    std::vector<std::vector<double>> traces;  // per restart, 3 * iters values
    std::vector<std::vector<HermitianOperator>> b, c;  // final contractions per restart
};

// Alternating maximization of <z|W_K|z> over z, B_k and C_k.
// State layout z[(a * D + i) * D + j]: a on C^d, i on the B factor, j on the C factor.
// The B-step reshapes z into Z_{13|2} with Z[(a * D + j), i] = z[(a * D + i) * D + j].
SeesawResult seesaw(int k, int adversary_dim, int iters, int restarts, std::uint64_t seed, int threads = 1);

}  // namespace nlb::moe
