#pragma once

// Gate, hexagonal-tile reconstruction, brickwork Floquet operator and the
// brute-force statevector quench oracle.
//
// Layout conventions
// ------------------
// Sites are 0-indexed. The first layer U_o acts on bonds (0,1),(2,3),...; the
// second layer U_e on (1,2),(3,4),... plus (L-1,0) under periodic boundaries.
// U = U_e U_o. Every two-site gate is u(a,b) = (P(a) x P(b)) CZ (H x H) with its
// first tensor factor on the left site of the bond.
//
// Each site is a vertex of the hexagonal lattice once per layer and carries a
// phase per layer. In the dimerized chain the left site of every bond carries
// g0 and the right site g1, in both layers; site k therefore holds g0 in one
// layer and g1 in the other.

#include <array>
#include <cstdint>
#include <vector>

#include "akim/qlinalg.hpp"

namespace akim {

struct ModelConstants {
    static constexpr double J = kPi / 4;
    static constexpr double h = kPi / 4;
    static constexpr int q = 2;
};

double wrap_angle(double x);  // into [0, 2pi)

struct GatePhases {
    double g0 = 0.0;
    double g1 = 0.0;
    GatePhases() = default;
    GatePhases(double a, double b) : g0(wrap_angle(a)), g1(wrap_angle(b)) {}
    GatePhases reflected() const { return {g1, g0}; }
};

enum class Boundary { periodic, open };

struct ChainSpec {
    int L = 0;
    Boundary boundary = Boundary::periodic;
    // layer_phases[0][k]: phase of site k in U_o, layer_phases[1][k]: in U_e.
    std::array<std::vector<double>, 2> layer_phases;

    ChainSpec() = default;
    ChainSpec(int length, Boundary b, std::array<std::vector<double>, 2> phases);
    static ChainSpec dimerized(int length, Boundary b, GatePhases g);
};

struct GatePlacement {
    int left = 0, right = 0;
    GatePhases phases;
};
// An open-boundary edge site without a partner in a layer receives the
// single-site part P(g) H of the gate.
struct EdgePlacement {
    int site = 0;
    double phase = 0.0;
};

struct FloquetStep {
    ChainSpec chain;
    std::array<std::vector<GatePlacement>, 2> layers;
    std::array<std::vector<EdgePlacement>, 2> edges;
};

Matrix2 hadamard();
Matrix2 phase_gate(double g);  // diag(1, e^{ig})
Matrix4 controlled_z();
Matrix4 build_gate(GatePhases phases);

// Basic tensors of the hexagonal tiling.
ComplexTensor delta_tensor(double g);  // [a,b,c] = e^{i g a} if a=b=c else 0
ComplexTensor hadamard_tensor();       // [z1,z2] = (-1)^{z1 z2} / sqrt(2)
// Contracting the tiles yields u / sqrt(2); build_gate_from_tiles multiplies
// by this factor so the result equals build_gate exactly (global phase 1).
inline constexpr double kTileNormalization = 1.4142135623730950488;
Matrix4 build_gate_from_tiles(GatePhases phases);

FloquetStep floquet_step(const ChainSpec& chain);
void apply_floquet_step(Vector& psi, const FloquetStep& step);
Matrix floquet_operator(const ChainSpec& chain);
PureState evolve_statevector(const PureState& state, const ChainSpec& chain, int steps);

inline constexpr int kMaxStatevectorQubits = 24;
inline constexpr int kMaxDenseQubits = 12;

// Finite open chain: bath | A | bath, each bath 2t + margin sites. A starts on
// an even site, so its first-layer bonds are internal and its boundary bonds
// belong to the second layer. Bath site k holds phi_{k mod 2}.
struct OracleOptions {
    int margin = 2;  // even, >= 2
};
DensityMatrix quench_oracle(int n_a, const PureState& psi_a, const Vector2& phi0, const Vector2& phi1,
                            GatePhases phases, int t, OracleOptions opt = {});
int oracle_max_steps(int n_a, int margin = 2);
// Max-norm difference between margin and margin + 2 (light-cone certificate).
double oracle_margin_sensitivity(int n_a, const PureState& psi_a, const Vector2& phi0, const Vector2& phi1,
                                 GatePhases phases, int t, int margin = 2);

// Single-qubit Clifford group modulo phase (24 elements), in a fixed order.
const std::vector<Matrix2>& single_qubit_cliffords();
struct LocalEquivalence {
    bool found = false;
    std::array<int, 4> index{};  // (A, B, C, D): (A x B) u (C x D) = target up to phase
    double residual = 0.0;
};
LocalEquivalence find_local_equivalence(const Matrix4& u, const Matrix4& target, double tol = 1e-10);
Matrix4 cnot();

}  // namespace akim
