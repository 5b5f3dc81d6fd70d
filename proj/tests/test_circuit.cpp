#include <doctest.h>

#include <cmath>
#include <random>

#include "akim/circuit.hpp"

using namespace akim;

TEST_CASE("gate at zero phases") {
    Matrix4 expected;
    expected << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, -1, 1, 1, -1;
    CHECK(max_abs_diff(build_gate({0, 0}), expected / 2.0) < 1e-15);
}

TEST_CASE("phase g0 multiplies the left-qubit-one rows by e^{i g0}") {
    const Matrix4 a = build_gate({0, 0}), b = build_gate({kPi / 2, 0});
    for (int r = 0; r < 4; ++r) {
        const cplx f = r >= 2 ? cplx(0, 1) : cplx(1, 0);
        CHECK(max_abs_diff(b.row(r), f * a.row(r)) < 1e-15);
    }
}

TEST_CASE("gate from tiles agrees with the gate") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    CHECK(max_abs_diff(align_global_phase(build_gate_from_tiles({0, 0}), build_gate({0, 0})), build_gate({0, 0})) <
          1e-15);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const GatePhases g(u(gen), u(gen));
        const Matrix tiles = build_gate_from_tiles(g);
        worst = std::max(worst, max_abs_diff(align_global_phase(tiles, build_gate(g)), build_gate(g)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("delta tensor") {
    const auto d = delta_tensor(0.0);
    CHECK(d.at({0, 0, 0}) == cplx(1, 0));
    CHECK(d.at({0, 0, 1}) == cplx(0, 0));
    CHECK(std::abs(delta_tensor(0.4).at({1, 1, 1}) - std::polar(1.0, 0.4)) < 1e-16);
}

TEST_CASE("two-site open chain is one gate followed by the edge tiles") {
    const GatePhases g(0.3, 1.1);
    const Matrix u = floquet_operator(ChainSpec::dimerized(2, Boundary::open, g));
    const Matrix edge = kron(phase_gate(g.g1) * hadamard(), phase_gate(g.g0) * hadamard());
    CHECK(max_abs_diff(u, edge * build_gate(g)) < 1e-14);
}

TEST_CASE("dense operator matches statevector evolution") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    const ChainSpec chain = ChainSpec::dimerized(8, Boundary::periodic, {u(gen), u(gen)});
    const Matrix U = floquet_operator(chain);
    CHECK(is_unitary(U, 1e-12));

    std::vector<Vector2> sites;
    for (int k = 0; k < 8; ++k) sites.push_back(bloch_state(u(gen) / 2, u(gen)));
    const PureState psi = PureState::product(sites);
    const PureState out = evolve_statevector(psi, chain, 3);
    CHECK(max_abs_diff(out.amplitudes, U * (U * (U * psi.amplitudes))) <= 1e-10);
    CHECK(max_abs_diff(evolve_statevector(psi, chain, 0).amplitudes, psi.amplitudes) == 0.0);

    // trace through gate-wise application of every basis column
    cplx tr = 0.0;
    const FloquetStep step = floquet_step(chain);
    for (std::size_t i = 0; i < 256; ++i) {
        Vector e = PureState::basis(8, i).amplitudes;
        apply_floquet_step(e, step);
        tr += e(static_cast<Eigen::Index>(i));
    }
    CHECK(std::abs(tr - U.trace()) < 1e-12);
}

TEST_CASE("statevector norm is preserved on a long chain") {
    const ChainSpec chain = ChainSpec::dimerized(20, Boundary::periodic, {0.4, 2.9});
    const PureState out = evolve_statevector(PureState::basis(20, 12345), chain, 10);
    CHECK(std::abs(out.amplitudes.norm() - 1.0) <= 1e-9);
}

TEST_CASE("capacity limits") {
    CHECK_THROWS_AS(floquet_operator(ChainSpec::dimerized(14, Boundary::open, {0, 0})), CapacityError);
    CHECK_THROWS_AS(evolve_statevector(PureState::basis(2, 0), ChainSpec::dimerized(26, Boundary::open, {0, 0}), 1),
                    std::exception);
    const Vector2 z(1, 0);
    CHECK_THROWS_AS(quench_oracle(4, PureState::basis(4, 0), z, z, {0, 0}, 9), CapacityError);
}

TEST_CASE("quench oracle") {
    const Vector2 z(1, 0);
    const PureState psi = PureState::basis(4, 0);
    CHECK(max_abs_diff(quench_oracle(4, psi, z, z, {0.2, 0.9}, 0).matrix, DensityMatrix::pure(psi).matrix) < 1e-15);
    CHECK(entropy(quench_oracle(4, psi, z, z, {0.0, 0.7}, 2)) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(oracle_margin_sensitivity(4, psi, z, z, {2.1, 5.3}, 2, 2) <= 1e-10);
}

TEST_CASE("Clifford local equivalence to CNOT at Clifford points") {
    const LocalEquivalence e = find_local_equivalence(build_gate({0, 0}), cnot());
    CHECK(e.found);
    CHECK(e.residual < 1e-10);
    CHECK(single_qubit_cliffords().size() == 24);
}
