#pragma once

// Spatial transfer matrices, influence matrices (IM) and the exact one-step
// reduced channel on a subsystem A embedded in a dimerized bath.
//
// Temporal legs. The space-time network is cut vertically through the bond
// Hadamard tiles of the second layer, one leg per time step. Leg tau carries
// the folded pair (z, z') of the Z value exported by the site to the left of
// the cut at its second-layer vertex, index 2 z + z'. A leg vector on t steps
// has dimension 4^t, step 0 most significant.
//
// A transfer-matrix column is the dimer (2k, 2k+1). Its left legs enter as
// the controlled sign (-1)^{a z} on site 2k's second-layer vertex; its right
// legs export site 2k+1's second-layer Z value. Open chains close the far
// left with (0,0) legs and the far right with the trace o on every leg.
//
// Superoperators use column-stacking: vec(rho)[i + d j] = rho(i, j).

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "akim/circuit.hpp"

namespace akim {

inline constexpr int kMaxTransferSteps = 4;
inline constexpr int kMaxDenseChannelQubits = 6;
inline constexpr int kMaxChannelQubits = 10;

struct TransferMatrix {
    int t = 0;
    GatePhases phases;
    Vector2 phi0, phi1;
    Matrix matrix;  // 4^t x 4^t, rows = left legs, cols = right legs
};

struct InfluenceMatrix {
    int t = 0;
    Vector v;  // 4^t
};

TransferMatrix build_transfer_matrix(int t, GatePhases phases, const Vector2& phi0, const Vector2& phi1);
// Product of t vectorised identities, scaled so that <L|R> = 1 for L = R.
InfluenceMatrix bell_product_im(int t);
InfluenceMatrix left_edge_im(int t);   // far-left boundary of an open chain
InfluenceMatrix right_edge_im(int t);  // far-right boundary of an open chain
// Schmidt rank of an IM across the cut after the first k legs.
int temporal_schmidt_rank(const InfluenceMatrix& im, int k, double tol = 1e-12);

struct TransferReport {
    double left_fixed_residual = 0.0;   // |<L|T - <L||, L = R = Bell product
    double right_fixed_residual = 0.0;  // |T|R> - |R>|
    int power_rank = 0;                 // numerical rank of T^{2t}
    double power_residual = 0.0;        // |T^{2t} - |R><L||
    // Certificate that spec(T) = {1} u {0,...}: with P = |R><L| (<L|R> = 1),
    // max(|TP - P|, |PT - P|, |(T - P)^{2t}|). When it vanishes, P is a spectral
    // projector for eigenvalue 1 and T - P is nilpotent.
    double spectrum_residual = 0.0;
    std::vector<cplx> eigenvalues;  // certified multiset {1, 0, ..., 0}
    std::vector<cplx> raw_eigenvalues;  // LAPACK-style values, informational (ill-conditioned)
};
TransferReport transfer_checks(const TransferMatrix& T);

// rho_A(t) = <L| W |R> for an A-state on N_A sites. Without explicit IMs the
// Bell product is used (valid for baths satisfying the solvable IM conditions).
DensityMatrix rdm_via_im(const PureState& psi_a, int t, GatePhases phases);
DensityMatrix rdm_via_im(const PureState& psi_a, int t, GatePhases phases, const InfluenceMatrix& left,
                         const InfluenceMatrix& right);
// Exact IMs of a semi-infinite dimer bath (phi0, phi1), obtained from the
// transfer matrix applied to the open-chain edges.
std::pair<InfluenceMatrix, InfluenceMatrix> bath_ims(int t, GatePhases phases, const Vector2& phi0,
                                                     const Vector2& phi1);

struct Channel {
    int n = 0;
    GatePhases phases;
    Matrix bulk;               // boundary Hadamards times the two gate layers inside A
    Vector boundary_phase;     // diagonal of the final boundary phase gates
    std::vector<Matrix> kraus; // operation elements, sum K^dag K = I
    std::optional<Matrix> superop;

    Matrix apply(const Matrix& rho) const;
    // Same map on m operators stacked horizontally (d x d m), via two large GEMMs.
    Matrix apply_stacked(const Matrix& stack) const;
    Matrix apply_power(const Matrix& rho, int k) const;
};

// One step on A: the first-layer gates, the internal second-layer gates, then
// on each boundary site a Hadamard, Z-dephasing and the vertex phase (g1 on
// site 0, g0 on site N_A - 1).
Channel build_channel(int n_a, GatePhases phases, bool dense = false);
Matrix dense_superoperator(const Channel& c);
Matrix choi_matrix(const Channel& c);

struct ChannelSpectrum {
    std::vector<cplx> eigenvalues;  // sorted by |lambda| desc, then phase asc
    double gap = 0.0;
    // Smallest k with S^{k+1} = S^k (checked for N_A <= 4, k <= 2 N_A + 2), else 0.
    // Then spec(C) = {0, 1} exactly; the raw eigenvalues of the nilpotent part
    // scatter as eps^{1/k} and are snapped.
    int stabilization_index = 0;
    int fixed_dimension = 0;
    std::vector<Matrix> fixed_basis;  // Hermitian, HS-orthonormal
};
ChannelSpectrum channel_spectrum(const Channel& c, double tol = 1e-8);
// Coefficients c_P = tr(P X) / 2^n over Pauli strings in lexicographic IXYZ order.
std::vector<double> pauli_coefficients(const Matrix& x, int n);

// max_{basis E} |A(E) - B(E)| over all 4^n matrix units, with maps given as callables.
template <class F, class G>
double superoperator_distance(int n, F a, G b) {
    const Eigen::Index d = Eigen::Index{1} << n;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) {
            Matrix e = Matrix::Zero(d, d);
            e(i, j) = 1.0;
            worst = std::max(worst, max_abs_diff(a(e), b(e)));
        }
    return worst;
}

struct FiniteTimeReport {
    int k = 0;
    double residual = 0.0;         // |C^{k+1} - C^k|
    double residual_before = 0.0;  // |C^k - C^{k-1}|, nonzero: k is minimal
    int fixed_dimension = 0;       // tr C^k (C^k is idempotent when residual vanishes)
};
// case 'a': k = N_A; case 'b': k = N_A/2 + 1.
FiniteTimeReport finite_time_identity(char solvable_case, int n_a, GatePhases phases);

struct CaseBReport {
    int n_a = 0;
    std::string assignment;  // bond assignment of the ZZ dissipators that matches
    double composed_residual = 0.0;
    double other_assignment_residual = 0.0;
    std::vector<std::string> generators;
    int group_size = 0;
    double invariance_residual = 0.0;  // max over the full group of |C[O] - O|
    bool abelian = false;  // the ZZ and XX generators overlapping on a site anticommute
};
CaseBReport case_b_structure(int n_a);

struct CaseCReport {
    int n_a = 0;
    int plus_one = 0, minus_one = 0;  // eigenvalue +/-1 multiplicities (trace formula)
    double min_real_eigenvalue = 0.0;  // from the dense spectrum when n_a <= 4
    std::vector<cplx> eigenvalues;
    int even_t = 0, odd_t = 0;
    double even_residual = 0.0, odd_residual = 0.0;
};
CaseCReport case_c_cycle(int n_a);

}  // namespace akim
