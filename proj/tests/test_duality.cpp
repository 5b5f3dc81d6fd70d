#include <doctest.h>

#include <cmath>
#include <random>

#include "akim/duality.hpp"

using namespace akim;

namespace {

Vector2 haar_qubit(std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    return normalized(Vector2(cplx(g(gen), g(gen)), cplx(g(gen), g(gen))));
}

Vector2 x_rot(double th) { return Vector2(std::cos(th), cplx(0, std::sin(th))); }   // e^{i th X}|0>
Vector2 plus_z(double th) {                                                          // e^{i th Z}|+>
    return Vector2(std::polar(1.0, th), std::polar(1.0, -th)) / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("folding") {
    const FoldedGate id = fold(Matrix4::Identity());
    CHECK(max_abs_diff(id.w, Matrix::Identity(16, 16)) == 0.0);

    const Matrix4 u = build_gate({0, 0});
    const FoldedGate w = fold(u);
    const Vector o2 = kron(folded_trace(), folded_trace());
    CHECK(max_abs_diff(o2.transpose() * w.w, o2.transpose()) < 1e-14);

    std::mt19937_64 gen(4);
    std::normal_distribution<double> g;
    for (int k = 0; k < 10; ++k) {
        Matrix a(4, 4);
        for (int i = 0; i < 16; ++i) a.data()[i] = cplx(g(gen), g(gen));
        const Matrix rho = a * a.adjoint();
        CHECK(max_abs_diff(unfold_density(w.w * fold_density(rho), 2), u * rho * u.adjoint()) < 1e-13);
    }
    CHECK(max_abs_diff(align_global_phase(unfold(w), u), u) < 1e-13);
    CHECK_THROWS_AS(fold(Matrix4::Ones()), ArgumentError);
}

TEST_CASE("second-level dual unitarity holds across the phase family") {
    CHECK(check_2du({0, 0}).pass);
    std::mt19937_64 gen(50);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) worst = std::max(worst, check_2du({u(gen), u(gen)}).residual);
    CHECK(worst <= 1e-12);
}

TEST_CASE("random two-qubit unitaries are not second-level dual unitary") {
    std::mt19937_64 gen(20);
    std::normal_distribution<double> g;
    int fails = 0;
    for (int k = 0; k < 20; ++k) {
        Matrix4 a;
        for (int i = 0; i < 16; ++i) a.data()[i] = cplx(g(gen), g(gen));
        const Matrix4 q = Eigen::HouseholderQR<Matrix4>(a).householderQ();
        const CheckResult r = check_2du_gate(q);
        fails += !r.pass && r.residual > 1e-3;
    }
    CHECK(fails == 20);
}

TEST_CASE("listed solvable dimers satisfy SIC") {
    const Vector2 z(1, 0), plus = plus_z(0);
    for (double g1 : {0.0, 0.7, 2.5}) CHECK(check_sic(z, z, {0, g1}).pass);
    // (|+>, e^{i th Z}|+>) is registered with the members exchanged, see the README
    for (double th : {0.0, kPi / 3, kPi / 2}) CHECK(check_sic(plus_z(th), plus, {0, 0.9}).pass);
}

TEST_CASE("listed solvable dimers satisfy SEC") {
    const Vector2 z(1, 0);
    for (double th : {0.0, kPi / 5, kPi / 2}) {
        CHECK(check_sic(z, x_rot(th), {0, 1.3}).pass);
        CHECK(check_sec(z, x_rot(th), {0, 1.3}).pass);
    }
    CHECK(check_sec(z, plus_z(0.4), {kPi / 2, kPi / 2}).pass);
}

TEST_CASE("every family member passes at its solvable phases") {
    double worst = 0.0;
    for (char c : {'a', 'b'}) {
        const std::vector<GatePhases> ph =
            c == 'a' ? std::vector<GatePhases>{{0, 0.3}, {kPi, 1.7}, {0, 5.0}} : std::vector<GatePhases>{{kPi / 2, kPi / 2}};
        for (const auto& f : solvable_families(c))
            for (double th : {0.0, 0.3, kPi / 5, kPi / 2, 2.0})
                for (const auto& g : ph) {
                    const auto [a, b] = f.generate(th);
                    worst = std::max({worst, check_sic(a, b, g).residual, check_sec(a, b, g).residual});
                }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("family definitions") {
    const auto a = solvable_families('a');
    const auto [p, q] = a[0].generate(0.0);
    CHECK(max_abs_diff(p, Vector2(1, 0)) < 1e-15);
    CHECK(max_abs_diff(q, Vector2(1, 0)) < 1e-15);

    bool found = false;
    for (const auto& f : solvable_families('b'))
        if (f.branch == 2 && !f.swapped && f.variant == 0) {
            const auto [y, z] = f.generate(0.0);
            found = true;
            CHECK(std::abs(std::abs(y.dot(Vector2(1, cplx(0, 1)) / std::sqrt(2.0))) - 1.0) < 1e-12);
            CHECK(std::abs(std::abs(z(0)) - 1.0) < 1e-12);
        }
    CHECK(found);
}

TEST_CASE("Haar-random dimers fail SIC at generic phases") {
    std::mt19937_64 gen(1234);
    int fail = 0;
    for (int k = 0; k < 50; ++k) fail += !check_sic(haar_qubit(gen), haar_qubit(gen), {1.1, 2.3}).pass;
    CHECK(fail >= 48);
    int fail_sec = 0;
    for (int k = 0; k < 50; ++k) fail_sec += !check_sec(haar_qubit(gen), haar_qubit(gen), {1.1, 2.3}).pass;
    CHECK(fail_sec >= 48);
}

TEST_CASE("scan at case (a) phases is exhausted by the families") {
    const auto hits = scan_bloch_grid({0, 0.7}, 8, ScanTarget::sic_and_sec);
    REQUIRE(hits.size() > 100);
    const auto fam = solvable_families('a');
    double worst = 0.0, res = 0.0;
    for (const auto& h : hits) {
        worst = std::max(worst, family_distance(bloch_state(h.theta0, h.phi0), bloch_state(h.theta1, h.phi1), fam));
        res = std::max({res, h.residual_sic, h.residual_sec});
    }
    CHECK(worst <= 1e-6);
    CHECK(res <= 1e-8);
}

TEST_CASE("scan at case (b) phases is exhausted by the families") {
    const auto hits = scan_bloch_grid({kPi / 2, kPi / 2}, 8, ScanTarget::sic_and_sec);
    REQUIRE(hits.size() > 100);
    const auto fam = solvable_families('b');
    double worst = 0.0;
    for (const auto& h : hits)
        worst = std::max(worst, family_distance(bloch_state(h.theta0, h.phi0), bloch_state(h.theta1, h.phi1), fam));
    CHECK(worst <= 1e-6);
}

TEST_CASE("SIC dimers exist at generic phases") {
    const auto hits = scan_bloch_grid({5 * kPi / 16, 7 * kPi / 16}, 8, ScanTarget::sic);
    CHECK(!hits.empty());
    for (const auto& h : hits) CHECK(h.residual_sic <= 1e-8);
}

TEST_CASE("Clifford classification") {
    CHECK(check_clifford(build_gate({0, 0})));
    CHECK(check_clifford(build_gate({kPi / 2, 3 * kPi / 2})));
    CHECK_FALSE(check_clifford(build_gate({kPi / 4, 0})));
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            const bool c = check_clifford(build_gate({2 * kPi * i / 16, 2 * kPi * j / 16}));
            CHECK(c == (i % 4 == 0 && j % 4 == 0));
        }
    CHECK_THROWS_AS(check_clifford(Matrix4::Ones()), ArgumentError);
}
