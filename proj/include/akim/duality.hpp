#pragma once

// Folded (forward x backward) tensor calculus.
//
// Folded leg convention: a site leg carries the pair (z, z') of forward and
// backward indices as 2 z + z'. A single-site operator rho is folded to the
// 4-vector rho(z, z') at 2 z + z' (its row-major vectorisation). The folded
// trace tensor is o = (1, 0, 0, 1), with <o|o> = q.
//
// A folded gate W = u (x) u* is stored as a 16x16 matrix acting on two
// folded legs, row index 4 * out_left + out_right, column index
// 4 * in_left + in_right.

#include <string>
#include <utility>
#include <vector>

#include "akim/circuit.hpp"

namespace akim {

struct FoldedGate {
    Matrix w;  // 16 x 16
    ComplexTensor tensor() const;  // legs (out_left, out_right, in_left, in_right), each of dim 4
};

using FoldedVector = Vector;  // folded state on one or more legs

FoldedGate fold(const Matrix4& u, double tol = 1e-12);
Matrix fold_operator(const Matrix& op);  // op (x) op* in folded leg order, any number of qubits
Matrix4 unfold(const FoldedGate& w);     // recovers u up to a global phase
FoldedVector fold_state(const Vector& psi);
FoldedVector fold_density(const Matrix& rho);
Matrix unfold_density(const FoldedVector& v, int n_qubits);
FoldedVector folded_trace();            // o
Matrix4 cross_projector();              // sum_z |z z><z z| on one folded leg
Matrix fold_compose(const Matrix& a, const Matrix& b);  // a after b

struct CheckResult {
    bool pass = false;
    double residual = 0.0;
    std::vector<double> parts;  // residual of each individual condition
};

// Second-level dual unitarity: a two-gate staircase sharing the middle site,
// with the four outer legs capped by o, equals q (o x o) on the middle
// site's in/out legs. Both staircase orientations are checked.
CheckResult check_2du(GatePhases phases, double tol = 1e-10);
CheckResult check_2du_gate(const Matrix4& u, double tol = 1e-10);

// Solvable influence-matrix conditions on the gated bath dimer
// w = W (phi0 x phi1): for each member, dephase and Hadamard its output leg
// after tracing the partner, and compare to o / q.
CheckResult check_sic(const Vector2& phi0, const Vector2& phi1, GatePhases phases, double tol = 1e-10);
// Solvable entanglement conditions, parts:
//  [0] both output legs of w read out (Hadamard, then the cross) equal (o x o) / q^2;
//  [1] the right leg of w and the left leg of a neighbouring copy (partners
//      traced) after the second-layer gate, both read out, equal (o x o) / q^2;
//  [2] two dimers through two full steps of the reduced dynamics, with the
//      outer legs closed by the Bell-pair IM, give the maximally mixed state.
// Parts [0] and [1] alone still admit one-parameter sets off the families
// below that violate the entanglement law; with [2] none remain.
CheckResult check_sec(const Vector2& phi0, const Vector2& phi1, GatePhases phases, double tol = 1e-10);

struct StateFamily {
    char solvable_case = 'a';  // 'a' (g0 in {0, pi}) or 'b' (g0 = g1 = pi/2)
    int branch = 1;            // 1 or 2
    int variant = 0;           // discrete label: z in {0,1} (branch 1) or sign (branch 2: 0 -> +, 1 -> -)
    bool swapped = false;      // phi0 <-> phi1
    std::string label;
    std::pair<Vector2, Vector2> generate(double theta) const;
};
std::vector<StateFamily> solvable_families(char solvable_case);
// Fidelity distance 1 - |<a|b>|^2 summed over both sites, minimised over all
// members of the given families on a fine parameter grid plus local refinement.
double family_distance(const Vector2& phi0, const Vector2& phi1, const std::vector<StateFamily>& families);

enum class ScanTarget { sic, sic_and_sec };
struct ScanHit {
    double theta0, phi0, theta1, phi1;
    double residual_sic, residual_sec;
};
// Grid: theta_k = k pi / resolution (k = 0..resolution), phi_k = 2 pi k / resolution.
// Grid points whose residual is below a spacing-scaled threshold are refined
// by damped least squares to residual < 1e-8; refined duplicates are merged.
std::vector<ScanHit> scan_bloch_grid(GatePhases phases, int resolution, ScanTarget which);

bool check_clifford(const Matrix4& u, double tol = 1e-10);

}  // namespace akim
