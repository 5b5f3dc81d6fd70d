#include "akim/circuit.hpp"

#include <cmath>
#include <string>

namespace akim {

double wrap_angle(double x) {
    if (!std::isfinite(x)) throw ArgumentError("angle is not finite");
    double r = std::fmod(x, 2 * kPi);
    if (r < 0) r += 2 * kPi;
    if (r >= 2 * kPi) r = 0.0;
    return r;
}

ChainSpec::ChainSpec(int length, Boundary b, std::array<std::vector<double>, 2> phases)
    : L(length), boundary(b), layer_phases(std::move(phases)) {
    if (L < 2 || L % 2 != 0) throw ArgumentError("chain length must be even and >= 2");
    for (const auto& p : layer_phases)
        if (static_cast<int>(p.size()) != L) throw ArgumentError("site phase list length must equal L");
}

ChainSpec ChainSpec::dimerized(int length, Boundary b, GatePhases g) {
    if (length < 2 || length % 2 != 0) throw ArgumentError("chain length must be even and >= 2");
    std::array<std::vector<double>, 2> ph{std::vector<double>(length), std::vector<double>(length)};
    for (int k = 0; k < length; ++k) {
        ph[0][k] = (k % 2 == 0) ? g.g0 : g.g1;  // left member of (2j, 2j+1)
        ph[1][k] = (k % 2 == 1) ? g.g0 : g.g1;  // left member of (2j+1, 2j+2)
    }
    return ChainSpec(length, b, std::move(ph));
}

Matrix2 hadamard() {
    Matrix2 h;
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

Matrix2 phase_gate(double g) {
    Matrix2 p = Matrix2::Zero();
    p(0, 0) = 1.0;
    p(1, 1) = std::polar(1.0, g);
    return p;
}

Matrix4 controlled_z() {
    Matrix4 cz = Matrix4::Identity();
    cz(3, 3) = -1.0;
    return cz;
}

Matrix4 build_gate(GatePhases g) {
    const Matrix4 p = kron(phase_gate(g.g0), phase_gate(g.g1));
    const Matrix4 hh = kron(hadamard(), hadamard());
    return p * controlled_z() * hh;
}

ComplexTensor delta_tensor(double g) {
    ComplexTensor d({2, 2, 2});
    d.at({0, 0, 0}) = 1.0;
    d.at({1, 1, 1}) = std::polar(1.0, g);
    return d;
}

ComplexTensor hadamard_tensor() {
    const double s = 1.0 / std::sqrt(2.0);
    return ComplexTensor({2, 2}, {s, s, s, -s});
}

Matrix4 build_gate_from_tiles(GatePhases g) {
    // Input legs pass through Hadamard tiles into the phase-delta vertices;
    // the two vertices share a Hadamard tile on the bond.
    const ComplexTensor left = contract(delta_tensor(g.g0), {1}, hadamard_tensor(), {0});   // [o0,b0,i0]
    const ComplexTensor right = contract(delta_tensor(g.g1), {1}, hadamard_tensor(), {0});  // [o1,b1,i1]
    const ComplexTensor bonded = contract(left, {1}, hadamard_tensor(), {0});               // [o0,i0,b1]
    const ComplexTensor full = contract(bonded, {2}, right, {1});                           // [o0,i0,o1,i1]
    const ComplexTensor ordered = full.permute({0, 2, 1, 3});
    if (ordered.shape() != std::vector<std::size_t>{2, 2, 2, 2})
        throw InternalError("tile contraction produced an unexpected shape");
    return ordered.as_matrix(2) * kTileNormalization;
}

FloquetStep floquet_step(const ChainSpec& chain) {
    FloquetStep s;
    s.chain = chain;
    const int L = chain.L;
    const auto& ph = chain.layer_phases;
    for (int i = 0; i + 1 < L; i += 2) s.layers[0].push_back({i, i + 1, GatePhases(ph[0][i], ph[0][i + 1])});
    for (int i = 1; i + 1 < L; i += 2) s.layers[1].push_back({i, i + 1, GatePhases(ph[1][i], ph[1][i + 1])});
    if (chain.boundary == Boundary::periodic) {
        s.layers[1].push_back({L - 1, 0, GatePhases(ph[1][L - 1], ph[1][0])});
    } else {
        s.edges[1].push_back({0, ph[1][0]});
        s.edges[1].push_back({L - 1, ph[1][L - 1]});
    }
    return s;
}

namespace {

template <class Apply2, class Apply1>
void run_layers(const FloquetStep& step, Apply2 two, Apply1 one) {
    for (int layer = 0; layer < 2; ++layer) {
        for (const auto& gp : step.layers[layer]) two(gp.left, gp.right, build_gate(gp.phases));
        for (const auto& e : step.edges[layer]) one(e.site, Matrix2(phase_gate(e.phase) * hadamard()));
    }
}

}  // namespace

void apply_floquet_step(Vector& psi, const FloquetStep& step) {
    const int L = step.chain.L;
    run_layers(
        step, [&](int a, int b, const Matrix4& u) { apply_2q(psi, L, a, b, u); },
        [&](int a, const Matrix2& u) { apply_1q(psi, L, a, u); });
}

Matrix floquet_operator(const ChainSpec& chain) {
    if (chain.L > kMaxDenseQubits)
        throw CapacityError("floquet_operator: L=" + std::to_string(chain.L) + " exceeds dense limit " +
                            std::to_string(kMaxDenseQubits));
    const Eigen::Index d = Eigen::Index{1} << chain.L;
    Matrix u = Matrix::Identity(d, d);
    const FloquetStep step = floquet_step(chain);
    run_layers(
        step, [&](int a, int b, const Matrix4& g) { apply_2q_left(u, chain.L, a, b, g); },
        [&](int a, const Matrix2& g) { apply_1q_left(u, chain.L, a, g); });
    return u;
}

PureState evolve_statevector(const PureState& state, const ChainSpec& chain, int steps) {
    if (chain.L > kMaxStatevectorQubits)
        throw CapacityError("evolve_statevector: L=" + std::to_string(chain.L) + " exceeds " +
                            std::to_string(kMaxStatevectorQubits));
    if (state.n_qubits != chain.L) throw ArgumentError("state size does not match chain length");
    if (steps < 0) throw ArgumentError("steps must be non-negative");
    Vector psi = state.amplitudes;
    const FloquetStep step = floquet_step(chain);
    for (int s = 0; s < steps; ++s) apply_floquet_step(psi, step);
    return PureState(chain.L, std::move(psi), 1e-9);
}

int oracle_max_steps(int n_a, int margin) {
    return (kMaxStatevectorQubits - n_a - 2 * margin) / 4;
}

DensityMatrix quench_oracle(int n_a, const PureState& psi_a, const Vector2& phi0, const Vector2& phi1,
                            GatePhases phases, int t, OracleOptions opt) {
    if (n_a < 2 || n_a % 2 != 0) throw ArgumentError("N_A must be even and >= 2");
    if (psi_a.n_qubits != n_a) throw ArgumentError("A-state size does not match N_A");
    if (t < 0) throw ArgumentError("t must be non-negative");
    if (opt.margin < 2 || opt.margin % 2 != 0) throw ArgumentError("margin must be even and >= 2");
    const int pad = 2 * t + opt.margin;
    const int L = n_a + 2 * pad;
    if (L > kMaxStatevectorQubits)
        throw CapacityError("quench_oracle: chain of " + std::to_string(L) + " sites exceeds " +
                            std::to_string(kMaxStatevectorQubits) + "; maximum feasible t is " +
                            std::to_string(oracle_max_steps(n_a, opt.margin)));
    const Vector2 bath[2] = {normalized(phi0), normalized(phi1)};

    std::vector<Vector2> left, right;
    for (int k = 0; k < pad; ++k) left.push_back(bath[k % 2]);
    for (int k = pad + n_a; k < L; ++k) right.push_back(bath[k % 2]);
    const PureState pl = PureState::product(left), pr = PureState::product(right);
    Vector psi = kron(kron(pl.amplitudes, psi_a.amplitudes), pr.amplitudes);

    const ChainSpec chain = ChainSpec::dimerized(L, Boundary::open, phases);
    const FloquetStep step = floquet_step(chain);
    for (int s = 0; s < t; ++s) apply_floquet_step(psi, step);

    // psi index = (l * dA + a) * dR + r
    const Eigen::Index dA = Eigen::Index{1} << n_a, dR = Eigen::Index{1} << pad, dL = dR;
    Matrix rho = Matrix::Zero(dA, dA);
    for (Eigen::Index l = 0; l < dL; ++l) {
        Eigen::Map<const Matrix> x(psi.data() + l * dA * dR, dR, dA);  // x(r, a)
        rho.noalias() += x.transpose() * x.conjugate();
    }
    return DensityMatrix(n_a, 0.5 * (rho + rho.adjoint()), 1e-9);
}

double oracle_margin_sensitivity(int n_a, const PureState& psi_a, const Vector2& phi0, const Vector2& phi1,
                                 GatePhases phases, int t, int margin) {
    const auto a = quench_oracle(n_a, psi_a, phi0, phi1, phases, t, {margin});
    const auto b = quench_oracle(n_a, psi_a, phi0, phi1, phases, t, {margin + 2});
    return max_abs_diff(a.matrix, b.matrix);
}

const std::vector<Matrix2>& single_qubit_cliffords() {
    static const std::vector<Matrix2> group = [] {
        auto canonical = [](const Matrix2& m) {
            for (int k = 0; k < 4; ++k) {
                const cplx x = m.data()[k];
                if (std::abs(x) > 1e-9) return Matrix2(m * (std::abs(x) / x));
            }
            return m;
        };
        const Matrix2 gens[2] = {hadamard(), phase_gate(kPi / 2)};
        std::vector<Matrix2> out{Matrix2::Identity()};
        for (std::size_t head = 0; head < out.size(); ++head)
            for (const auto& g : gens) {
                const Matrix2 c = canonical(g * out[head]);
                bool seen = false;
                for (const auto& e : out)
                    if ((e - c).cwiseAbs().maxCoeff() < 1e-9) seen = true;
                if (!seen) out.push_back(c);
            }
        if (out.size() != 24) throw InternalError("single-qubit Clifford group does not have 24 elements");
        return out;
    }();
    return group;
}

Matrix4 cnot() {
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

LocalEquivalence find_local_equivalence(const Matrix4& u, const Matrix4& target, double tol) {
    const auto& cl = single_qubit_cliffords();
    const int n = static_cast<int>(cl.size());
    std::vector<Matrix4> pre(n * n);
    for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) pre[c * n + d] = u * kron(cl[c], cl[d]);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const Matrix4 post = kron(cl[a], cl[b]);
            for (int cd = 0; cd < n * n; ++cd) {
                const Matrix4 m = post * pre[cd];
                const cplx overlap = (target.adjoint() * m).trace() / 4.0;
                if (std::abs(std::abs(overlap) - 1.0) > 1e-6) continue;
                const double res = max_abs_diff(target, align_global_phase(target, m));
                if (res <= tol) return {true, {a, b, cd / n, cd % n}, res};
            }
        }
    return {};
}

}  // namespace akim
