#include <doctest.h>

#include <cmath>

#include "akim/diagnostics.hpp"
#include "akim/duality.hpp"

using namespace akim;

namespace {

const Vector2 kZero(1, 0);

PureState dimer_product(int n, const Vector2& a, const Vector2& b) {
    std::vector<Vector2> s;
    for (int k = 0; k < n; ++k) s.push_back(k % 2 ? b : a);
    return PureState::product(s);
}

Vector2 x_rot(double th) { return Vector2(std::cos(th), cplx(0, std::sin(th))); }

}  // namespace

TEST_CASE("maximal ramp at g0 = 0") {
    const TrajectoryReport r =
        entanglement_trajectory(8, {0, 0.7}, dimer_product(8, kZero, kZero), 12, Reference::saturate_full);
    const double expected[] = {0, 2, 4, 6, 8, 8, 8, 8, 8, 8, 8, 8, 8};
    for (int t = 0; t <= 12; ++t) CHECK(std::abs(r.entropy[t] - expected[t]) <= 1e-8);
    CHECK(r.max_deviation <= 1e-8);
    for (bool f : r.flat) CHECK(f);
}

TEST_CASE("flat spectrum of the ramp at t = 2") {
    const Channel c = build_channel(8, {0, 0.7});
    const PureState psi = dimer_product(8, kZero, x_rot(0.3));
    const DensityMatrix rho(8, c.apply_power(psi.amplitudes * psi.amplitudes.adjoint(), 2), 1e-8);
    const EntanglementSpectrum es = entanglement_spectrum(rho, 1e-9);
    CHECK(es.flat);
    int support = 0;
    for (double p : es.eigenvalues)
        if (p > 1e-9) {
            ++support;
            CHECK(std::abs(p - 1.0 / 16) < 1e-9);
        }
    CHECK(support == 16);
}

TEST_CASE("half saturation from the all-zero state at (pi/2, pi/2)") {
    const TrajectoryReport r = entanglement_trajectory(8, {kPi / 2, kPi / 2}, PureState::basis(8, 0), 8,
                                                       Reference::saturate_half);
    const double expected[] = {0, 2, 4, 4, 4, 4, 4, 4, 4};
    for (int t = 0; t <= 8; ++t) CHECK(std::abs(r.entropy[t] - expected[t]) <= 1e-7);
}

TEST_CASE("early-time ramp at generic phases") {
    const TrajectoryReport r = entanglement_trajectory(8, {5 * kPi / 16, 7 * kPi / 16}, PureState::basis(8, 0), 4,
                                                       Reference::early_ramp);
    CHECK(std::abs(r.entropy[1] - 2.0) <= 1e-7);
    CHECK(std::abs(r.entropy[2] - 4.0) <= 1e-7);
    // independent statevector evaluation of the same quench
    CHECK(r.entropy[3] == doctest::Approx(5.601172340812544).epsilon(1e-9));
    CHECK(r.entropy[3] < 6.0);
    CHECK_FALSE(r.expected[3].has_value());
}

TEST_CASE("case (b) and (c) trajectories coincide") {
    const PureState psi = dimer_product(4, kZero, Vector2(1, 1) / std::sqrt(2.0));
    const auto b = entanglement_trajectory(4, {kPi / 2, kPi / 2}, psi, 6, Reference::none);
    const auto c = entanglement_trajectory(4, {kPi / 2, 3 * kPi / 2}, psi, 6, Reference::none);
    for (int t = 0; t <= 6; ++t) CHECK(std::abs(b.entropy[t] - c.entropy[t]) <= 1e-8);
}

TEST_CASE("reference parsing") {
    CHECK(parse_reference("min(2t,N_A)") == Reference::saturate_full);
    CHECK(parse_reference("min(2t,N_A/2)") == Reference::saturate_half);
    CHECK(to_string(Reference::early_ramp) == "early-2t");
    CHECK_THROWS_AS(parse_reference("linear"), ArgumentError);
}

TEST_CASE("COE reference") {
    CHECK(coe_reference(1, 8) == doctest::Approx(2 - std::log(1 + 2.0 / 256)).epsilon(1e-15));
    CHECK(coe_reference(1, 8) == doctest::Approx(1.99222).epsilon(1e-5));
    CHECK(std::abs(coe_reference(1e-12, 8)) < 1e-11);
    CHECK(coe_reference(3, 200) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("spectral form factor") {
    EnsembleSpec e;
    e.L = 4;
    e.samples = 1;
    const SFFSeries one = sff(e, 3);
    CHECK(one.mean[0] == 256.0);

    // independent path: traces of explicit matrix powers
    e.samples = 5;
    e.seed = 42;
    for (EnsembleMode m : {EnsembleMode::all_vertices, EnsembleMode::g0_zero_sites, EnsembleMode::g0_zero_shared}) {
        e.mode = m;
        const SFFSeries s = sff(e, 30);
        std::vector<double> ref(31, 0.0);
        for (int k = 0; k < e.samples; ++k) {
            const Matrix u = floquet_operator(ensemble_sample(e, k));
            Matrix p = Matrix::Identity(16, 16);
            for (int t = 1; t <= 30; ++t) {
                p = p * u;
                ref[t] += std::norm(p.trace()) / e.samples;
            }
        }
        for (int t = 1; t <= 30; ++t) CHECK(std::abs(s.mean[t] - ref[t]) <= 1e-9 * std::max(1.0, ref[t]));
    }
}

TEST_CASE("ensemble samples are reproducible and independent of order") {
    EnsembleSpec e;
    e.L = 6;
    e.seed = 9;
    const ChainSpec a = ensemble_sample(e, 3), b = ensemble_sample(e, 3), c = ensemble_sample(e, 4);
    CHECK(a.layer_phases == b.layer_phases);
    CHECK(a.layer_phases != c.layer_phases);
    e.mode = EnsembleMode::g0_zero_sites;
    const ChainSpec z = ensemble_sample(e, 0);
    int zeros = 0;
    for (const auto& layer : z.layer_phases)
        for (double x : layer) zeros += x == 0.0;
    CHECK(zeros == 6);
    CHECK_THROWS_AS(parse_ensemble("gaussian"), ArgumentError);
}

TEST_CASE("revival detection") {
    SFFSeries s;
    s.t = {0, 1, 2};
    s.mean = {256, 20.0, 4.0};
    s.stderr_ = {0, 0, 0};
    const RevivalReport r = detect_revivals(s, 4, 10.0);
    CHECK(r.times == std::vector<int>{1});
    CHECK(r.argmax_t == 1);
}

TEST_CASE("stabilizer decompositions of simple states") {
    Matrix rho = Matrix::Zero(4, 4);
    rho(0, 0) = rho(1, 1) = 0.5;  // |0><0| (x) I/2
    const StabilizerSet s = stabilizer_decomposition(DensityMatrix(2, rho));
    REQUIRE(s.operators.size() == 1);
    CHECK(s.labels[0] == "+ZI");
    CHECK(s.residual < 1e-14);
    for (int cut = 1; cut < 2; ++cut) CHECK(stabilizer_opent_profile(s, cut)[0] < 1e-12);

    CHECK(stabilizer_decomposition(DensityMatrix::maximally_mixed(3)).operators.empty());

    Matrix skew = Matrix::Zero(2, 2);
    skew(0, 0) = 0.7;
    skew(1, 1) = 0.3;
    CHECK_THROWS_AS(stabilizer_decomposition(DensityMatrix(1, skew)), NotDecomposableError);
}

TEST_CASE("stabilizers of a generic flat state carry operator entanglement") {
    const Channel c = build_channel(6, {0, 0.7});
    const PureState psi = dimer_product(6, kZero, x_rot(0.4));
    const DensityMatrix rho(6, c.apply_power(psi.amplitudes * psi.amplitudes.adjoint(), 2), 1e-8);
    const StabilizerSet s = stabilizer_decomposition(rho);
    CHECK(static_cast<double>(s.operators.size()) == doctest::Approx(6 - entropy(rho)).epsilon(1e-9));
    CHECK(s.residual <= 1e-8);
    double peak = 0.0;
    for (int cut = 1; cut < 6; ++cut)
        for (double x : stabilizer_opent_profile(s, cut)) peak = std::max(peak, x);
    CHECK(peak >= 0.1);
}

TEST_CASE("Clifford dynamics keeps stabilizers Pauli") {
    for (GatePhases g : {GatePhases(0, 0), GatePhases(kPi / 2, kPi / 2), GatePhases(kPi, 3 * kPi / 2)}) {
        const Channel c = build_channel(6, g);
        const PureState psi = PureState::basis(6, 0);
        for (int t = 1; t <= 3; ++t) {
            const DensityMatrix rho(6, c.apply_power(psi.amplitudes * psi.amplitudes.adjoint(), t), 1e-8);
            const StabilizerSet s = stabilizer_decomposition(rho);
            CHECK(s.pauli_count == static_cast<int>(s.operators.size()));
            CHECK(s.residual <= 1e-8);
            for (int cut = 1; cut < 6; ++cut)
                for (double x : stabilizer_opent_profile(s, cut)) CHECK(x <= 1e-9);
        }
    }
}
