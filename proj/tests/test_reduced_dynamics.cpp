#include <doctest.h>

#include <cmath>
#include <random>

#include "akim/duality.hpp"
#include "akim/reduced_dynamics.hpp"

using namespace akim;

namespace {

const Vector2 kZero(1, 0);

Vector2 haar_qubit(std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    return normalized(Vector2(cplx(g(gen), g(gen)), cplx(g(gen), g(gen))));
}

Matrix projector(const PureState& psi) { return psi.amplitudes * psi.amplitudes.adjoint(); }

}  // namespace

TEST_CASE("transfer matrix dimension and Bell fixed point") {
    const TransferMatrix t1 = build_transfer_matrix(1, {0, 0.7}, kZero, kZero);
    CHECK(t1.matrix.rows() == 4);
    const Vector r1 = bell_product_im(1).v;
    CHECK(max_abs_diff(t1.matrix * r1, r1) < 1e-14);

    const TransferMatrix t2 = build_transfer_matrix(2, {1.1, 2.3}, kZero, kZero);
    const Vector r2 = bell_product_im(2).v;
    CHECK(max_abs_diff(t2.matrix * r2, r2) <= 1e-10);
    CHECK(max_abs_diff(r2.transpose() * t2.matrix, r2.transpose()) <= 1e-10);
    CHECK_THROWS_AS(build_transfer_matrix(kMaxTransferSteps + 1, {0, 0}, kZero, kZero), CapacityError);
}

TEST_CASE("non-SIC baths move the Bell product") {
    std::mt19937_64 gen(77);
    int moved = 0;
    for (int k = 0; k < 10; ++k) {
        const TransferMatrix t = build_transfer_matrix(2, {1.1, 2.3}, haar_qubit(gen), haar_qubit(gen));
        const Vector r = bell_product_im(2).v;
        moved += max_abs_diff(t.matrix * r, r) > 1e-3;
    }
    CHECK(moved >= 9);
}

TEST_CASE("Bell-product IM") {
    const Vector v = bell_product_im(1).v;
    CHECK(v.size() == 4);
    CHECK(std::abs(v(0) - v(3)) < 1e-16);
    CHECK(std::abs(v(1)) + std::abs(v(2)) == 0.0);
    // closing every leg with the folded trace gives one
    for (int t = 1; t <= 3; ++t) {
        Vector o = folded_trace();
        for (int s = 1; s < t; ++s) o = kron(o, folded_trace());
        const Vector im = bell_product_im(t).v;
        CHECK(std::abs(o.dot(im) / std::pow(o.dot(bell_product_im(1).v), t) - 1.0) < 1e-14);
    }
    CHECK(temporal_schmidt_rank(bell_product_im(3), 1) == 1);
}

TEST_CASE("transfer spectrum is {1} and zeros") {
    for (int t : {2, 3})
        for (GatePhases g : {GatePhases(0, 0.7), GatePhases(1.1, 2.3)}) {
            const TransferReport r = transfer_checks(build_transfer_matrix(t, g, kZero, kZero));
            CHECK(r.spectrum_residual <= 1e-8);
            CHECK(r.power_rank == 1);
            CHECK(r.left_fixed_residual <= 1e-10);
            CHECK(r.right_fixed_residual <= 1e-10);
            REQUIRE(r.eigenvalues.size() == std::size_t(1) << (2 * t));
            CHECK(r.eigenvalues[0] == cplx(1, 0));
        }
}

TEST_CASE("IM contraction reproduces the quench") {
    const PureState psi = PureState::basis(4, 0);
    CHECK(max_abs_diff(rdm_via_im(psi, 0, {0, 0.7}).matrix, projector(psi)) < 1e-15);
    CHECK(entropy(rdm_via_im(psi, 2, {0, 0.7})) == doctest::Approx(4.0).epsilon(1e-10));

    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    for (int k = 0; k < 3; ++k) {
        const GatePhases g(u(gen), u(gen));
        const DensityMatrix oracle = quench_oracle(4, psi, kZero, kZero, g, 2);
        const DensityMatrix im = rdm_via_im(psi, 2, g);
        const Channel c = build_channel(4, g);
        const Matrix ch = c.apply_power(projector(psi), 2);
        CHECK(max_abs_diff(oracle.matrix, im.matrix) <= 1e-9);
        CHECK(max_abs_diff(oracle.matrix, ch) <= 1e-9);
        CHECK(max_abs_diff(im.matrix, ch) <= 1e-9);
    }
}

TEST_CASE("general bath IMs match the oracle") {
    std::mt19937_64 gen(5);
    const Vector2 a = haar_qubit(gen), b = haar_qubit(gen);
    const GatePhases g(0.8, 2.0);
    const PureState psi = PureState::basis(2, 1);
    for (int t = 1; t <= 3; ++t) {
        const auto [l, r] = bath_ims(t, g, a, b);
        CHECK(max_abs_diff(rdm_via_im(psi, t, g, l, r).matrix, quench_oracle(2, psi, a, b, g, t).matrix) <= 1e-9);
    }
}

TEST_CASE("channel is CPTP and unital") {
    for (int n : {4, 6})
        for (GatePhases g : {GatePhases(0, 0.7), GatePhases(1.1, 2.3), GatePhases(kPi / 2, 3 * kPi / 2)}) {
            const Channel c = build_channel(n, g);
            const Eigen::Index d = Eigen::Index{1} << n;
            Matrix k = Matrix::Zero(d, d);
            for (const auto& x : c.kraus) k += x.adjoint() * x;
            CHECK(max_abs_diff(k, Matrix::Identity(d, d)) < 1e-12);
            CHECK(max_abs_diff(c.apply(Matrix::Identity(d, d)), Matrix::Identity(d, d)) < 1e-12);
        }
    const Channel c = build_channel(2, {0.3, 0.4}, true);
    const Matrix choi = choi_matrix(c);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(choi).eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("channel agrees with the oracle from the all-zero state") {
    const PureState psi = PureState::basis(4, 0);
    const GatePhases g(2.7, 0.4);
    const Matrix ch = build_channel(4, g).apply_power(projector(psi), 2);
    CHECK(max_abs_diff(ch, quench_oracle(4, psi, kZero, kZero, g, 2).matrix) <= 1e-10);
}

TEST_CASE("channel spectra") {
    const ChannelSpectrum a = channel_spectrum(build_channel(4, {0, 0.7}, true));
    REQUIRE(a.eigenvalues.size() == 256);
    for (const auto& l : a.eigenvalues) CHECK(std::min(std::abs(l), std::abs(l - 1.0)) <= 1e-8);
    CHECK(a.fixed_dimension == 1);
    CHECK(max_abs_diff(a.fixed_basis[0] * 4.0, Matrix::Identity(16, 16)) < 1e-10);

    const ChannelSpectrum b = channel_spectrum(build_channel(4, {kPi / 2, kPi / 2}, true));
    CHECK(b.fixed_dimension == 8);

    // generic phases: unique fixed point and the gap of an independent dense evaluation
    const ChannelSpectrum g = channel_spectrum(build_channel(4, {5 * kPi / 16, 7 * kPi / 16}, true));
    CHECK(g.fixed_dimension == 1);
    CHECK(g.gap == doctest::Approx(0.18450684315108679).epsilon(1e-9));

    for (std::size_t i = 1; i < g.eigenvalues.size(); ++i)
        CHECK(std::abs(g.eigenvalues[i - 1]) >= std::abs(g.eigenvalues[i]) - 1e-12);
}

TEST_CASE("finite-time identities") {
    const FiniteTimeReport a = finite_time_identity('a', 4, {0, 1.234});
    CHECK(a.k == 4);
    CHECK(a.residual <= 1e-10);
    CHECK(a.residual_before > 1e-3);
    CHECK(a.fixed_dimension == 1);

    const FiniteTimeReport a6 = finite_time_identity('a', 6, {kPi, 0.3});
    CHECK(a6.k == 6);
    CHECK(a6.residual <= 1e-10);
    CHECK(a6.residual_before > 1e-3);

    const FiniteTimeReport b4 = finite_time_identity('b', 4, {kPi / 2, kPi / 2});
    CHECK(b4.k == 3);
    CHECK(b4.residual <= 1e-10);
    CHECK(b4.fixed_dimension == 8);
    const FiniteTimeReport b6 = finite_time_identity('b', 6, {kPi / 2, kPi / 2});
    CHECK(b6.k == 4);
    CHECK(b6.residual <= 1e-10);
    CHECK(b6.fixed_dimension == 32);
    // away from the solvable phases the identities do not hold
    CHECK(finite_time_identity('a', 4, {1.0, 1.0}).residual > 1e-3);
    CHECK(finite_time_identity('b', 4, {kPi / 2, 1.0}).residual > 1e-3);
    CHECK_THROWS_AS(finite_time_identity('c', 4, {0, 0}), ArgumentError);
}

TEST_CASE("case (b) invariants and composed channel") {
    const CaseBReport r = case_b_structure(4);
    CHECK(r.group_size == 8);
    CHECK(r.generators.size() == 3);
    CHECK(r.invariance_residual <= 1e-10);
    CHECK(r.composed_residual <= 1e-9);
    CHECK(r.other_assignment_residual > 1e-3);
}

TEST_CASE("case (c) oscillation") {
    const CaseCReport r = case_c_cycle(4);
    CHECK(r.minus_one > 0);
    CHECK(std::abs(r.min_real_eigenvalue + 1.0) <= 1e-8);
    CHECK(r.even_residual <= 1e-9);
    CHECK(r.odd_residual <= 1e-9);
}
