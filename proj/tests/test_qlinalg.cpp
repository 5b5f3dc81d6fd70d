#include <doctest.h>

#include <cmath>
#include <random>

#include "akim/qlinalg.hpp"

using namespace akim;

namespace {

Vector bell() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v;
}

Matrix random_density(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    const Eigen::Index d = Eigen::Index{1} << n;
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(gen), g(gen));
    Matrix r = a * a.adjoint();
    return r / r.trace().real();
}

}  // namespace

TEST_CASE("partial trace of a Bell pair is maximally mixed") {
    const auto rho = partial_trace(DensityMatrix::pure(PureState(2, bell())), {0});
    CHECK(max_abs_diff(rho.matrix, Matrix::Identity(2, 2) / 2.0) < 1e-15);
}

TEST_CASE("partial trace keeping everything is the identity map") {
    std::mt19937_64 gen(3);
    const DensityMatrix rho(3, random_density(3, gen));
    CHECK(max_abs_diff(partial_trace(rho, {0, 1, 2}).matrix, rho.matrix) == 0.0);
}

TEST_CASE("partial trace of a product state") {
    const auto rho = partial_trace(DensityMatrix::pure(PureState::basis(3, 0)), {0, 1});
    Matrix e = Matrix::Zero(4, 4);
    e(0, 0) = 1.0;
    CHECK(max_abs_diff(rho.matrix, e) < 1e-15);
}

TEST_CASE("the kept qubits are a set") {
    const auto pure = DensityMatrix::pure(PureState::basis(3, 3));  // |011>
    const auto a = partial_trace(pure, {2, 1}), b = partial_trace(pure, {1, 2, 2});
    CHECK(std::abs(a.matrix(3, 3) - 1.0) < 1e-15);
    CHECK(max_abs_diff(a.matrix, b.matrix) == 0.0);
}

TEST_CASE("partial trace argument errors") {
    const auto rho = DensityMatrix::maximally_mixed(2);
    CHECK_THROWS_AS(partial_trace(rho, {}), ArgumentError);
    CHECK_THROWS_AS(partial_trace(rho, {2}), ArgumentError);
    CHECK_THROWS_AS(partial_trace(rho, {-1}), ArgumentError);
}

TEST_CASE("entropies") {
    CHECK(entropy(DensityMatrix::maximally_mixed(2)) == doctest::Approx(2.0).epsilon(1e-14));
    const auto pure = DensityMatrix::pure(PureState::basis(3, 5));
    for (double n : {1.0, 2.0, 3.0, double(INFINITY)}) CHECK(std::abs(entropy(pure, n)) < 1e-14);

    Matrix flat = Matrix::Zero(8, 8);
    for (int i : {0, 3, 5, 6}) flat(i, i) = 0.25;
    CHECK(entropy(DensityMatrix(3, flat), 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(entropy(pure, 0.5), ArgumentError);
}

TEST_CASE("entanglement spectrum flatness") {
    const auto es = entanglement_spectrum(DensityMatrix::maximally_mixed(3), 1e-9);
    CHECK(es.flat);
    REQUIRE(es.eigenvalues.size() == 8);
    for (double p : es.eigenvalues) CHECK(std::abs(p - 0.125) < 1e-15);

    Matrix d = Matrix::Zero(4, 4);
    d(0, 0) = 0.5;
    d(1, 1) = 0.3;
    d(2, 2) = 0.2;
    CHECK_FALSE(entanglement_spectrum(DensityMatrix(2, d), 1e-9).flat);
}

TEST_CASE("operator entanglement") {
    CHECK(std::abs(operator_entanglement(pauli_string("ZZ"), 2, 1)) < 1e-12);
    const Matrix m = (pauli_string("ZZ") + pauli_string("XX")) / std::sqrt(2.0);
    CHECK(operator_entanglement(m, 2, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(operator_entanglement(Matrix::Zero(4, 4), 2, 1), ArgumentError);
}

TEST_CASE("pauli labels and traces") {
    CHECK(pauli_label(0, 2) == "II");
    CHECK(max_abs_diff(pauli_matrix(7, 2), pauli_string(pauli_label(7, 2))) == 0.0);
    std::mt19937_64 gen(11);
    const Matrix rho = random_density(3, gen);
    for (std::size_t k = 0; k < 64; ++k)
        CHECK(std::abs(pauli_trace(k, 3, rho) - (pauli_matrix(k, 3) * rho).trace()) < 1e-13);
}

TEST_CASE("tensor contraction matches matrix product") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> g;
    Matrix a(4, 4), b(4, 4);
    for (int i = 0; i < 16; ++i) {
        a.data()[i] = cplx(g(gen), g(gen));
        b.data()[i] = cplx(g(gen), g(gen));
    }
    const auto ta = ComplexTensor::from_matrix(a, {4, 4}), tb = ComplexTensor::from_matrix(b, {4, 4});
    CHECK(max_abs_diff(contract(ta, {1}, tb, {0}).as_matrix(1), a * b) < 1e-13);
    CHECK(max_abs_diff(ta.permute({1, 0}).as_matrix(1), a.transpose()) == 0.0);
}

TEST_CASE("local gate application agrees with Kronecker products") {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> g;
    Vector psi(8);
    for (int i = 0; i < 8; ++i) psi(i) = cplx(g(gen), g(gen));
    Matrix4 u;
    for (int i = 0; i < 16; ++i) u.data()[i] = cplx(g(gen), g(gen));

    Vector a = psi;
    apply_1q(a, 3, 1, Matrix2(pauli('Y')));
    CHECK(max_abs_diff(a, pauli_string("IYI") * psi) < 1e-14);

    Vector b = psi;
    apply_2q(b, 3, 1, 2, u);
    CHECK(max_abs_diff(b, kron(Matrix::Identity(2, 2), u) * psi) < 1e-13);

    // reversed qubit order swaps the tensor factors
    Vector c = psi;
    apply_2q(c, 3, 1, 0, u);
    const Matrix swap = pauli_string("XX") * 0.5 + pauli_string("YY") * 0.5 + pauli_string("ZZ") * 0.5 +
                        Matrix::Identity(4, 4) * 0.5;
    CHECK(max_abs_diff(c, kron(swap * u * swap, Matrix::Identity(2, 2)) * psi) < 1e-13);
}

TEST_CASE("state validation") {
    CHECK_THROWS_AS(PureState(1, Vector::Ones(2)), ArgumentError);
    CHECK_THROWS_AS(DensityMatrix(1, Matrix::Identity(2, 2)), ArgumentError);
    CHECK(std::abs(bloch_state(kPi, 0.0)(1) - 1.0) < 1e-15);
}
