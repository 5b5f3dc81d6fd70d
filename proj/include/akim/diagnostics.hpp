#pragma once

// Entanglement trajectories with their analytic references, the spectral form
// factor of random-phase ensembles, and the stabilizer decomposition of
// flat-spectrum reduced states.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "akim/reduced_dynamics.hpp"

namespace akim {

enum class Reference { saturate_full, saturate_half, early_ramp, none };
Reference parse_reference(const std::string& s);  // "min(2t,N_A)", "min(2t,N_A/2)", "early-2t", "none"
std::string to_string(Reference r);

struct TrajectoryReport {
    int n_a = 0;
    GatePhases phases;
    std::string initial_state;
    Reference reference = Reference::none;
    std::vector<double> entropy;                   // S(t), t = 0..t_max, bits
    std::vector<std::optional<double>> expected;   // empty outside the reference's window
    std::vector<bool> flat;                        // flat entanglement spectrum at t
    std::vector<double> renyi_spread;              // max - min over orders {1, 2, 3, inf}
    double max_deviation = 0.0;                    // over t where expected is set
};

inline constexpr int kMaxTrajectoryQubits = 8;

// rho_A evolves under the reduced channel (the bath is taken to satisfy the
// solvable IM conditions). The state descriptor is only recorded.
TrajectoryReport entanglement_trajectory(int n_a, GatePhases phases, const PureState& psi_a, int t_max,
                                         Reference reference, const std::string& descriptor = "",
                                         double flat_tol = 1e-9);

// Random-phase ensembles of periodic chains.
//   all_vertices:  every (site, layer) vertex carries an independent uniform phase
//   g0_zero_sites: g0 vertices are 0; each site's g1 vertex is independent uniform
//   g0_zero_shared: g0 vertices are 0; one uniform g1 per sample shared by all sites
enum class EnsembleMode { all_vertices, g0_zero_sites, g0_zero_shared };
EnsembleMode parse_ensemble(const std::string& s);  // "random", "g0-zero", "g0-zero-shared"
std::string to_string(EnsembleMode m);

struct EnsembleSpec {
    int L = 8;
    Boundary boundary = Boundary::periodic;
    EnsembleMode mode = EnsembleMode::all_vertices;
    int samples = 1000;
    std::uint64_t seed = 0;
};

// Layer phases of one sample. Each sample draws from its own generator keyed by
// (seed, sample index), in fixed (layer, site) order, so samples are independent
// of evaluation order.
ChainSpec ensemble_sample(const EnsembleSpec& e, int sample);

struct SFFSeries {
    std::vector<int> t;
    std::vector<double> mean;    // K(t), K(0) = 4^L
    std::vector<double> stderr_;  // standard error of the mean
    int samples = 0;
};

inline constexpr int kMaxSFFQubits = 10;

SFFSeries sff(const EnsembleSpec& e, int t_max);
double coe_reference(double t, int n_qubits);  // 2t - t ln(1 + 2t / 2^n)

struct RevivalReport {
    double threshold = 10.0;
    double max_ratio = 0.0;
    int argmax_t = 0;
    std::vector<int> times;  // t >= 1 with K(t) / COE(t) >= threshold
};
RevivalReport detect_revivals(const SFFSeries& s, int n_qubits, double threshold = 10.0);

struct StabilizerSet {
    int n = 0;
    std::vector<Matrix> operators;
    std::vector<std::string> labels;  // signed Pauli label, or empty for a non-Pauli O_i
    int pauli_count = 0;
    double residual = 0.0;  // |2^-n prod(1 + O_i) - rho|
};

struct NotDecomposableError : ArgumentError {
    std::vector<double> spectrum;
    NotDecomposableError(const std::string& what, std::vector<double> s)
        : ArgumentError(what), spectrum(std::move(s)) {}
};

// rho = 2^-n prod_i (1 + O_i) for a flat-spectrum rho of rank 2^{n-m}.
// Canonical construction: signed Pauli strings stabilizing the support are
// taken first (weight, then IXYZ label order, GF(2)-independent). If fewer than
// m exist, the joint +1 space V of the Paulis is split into blocks of the
// support's size: the support itself, then Gram-Schmidt completions of the
// projected computational basis vectors in index order. With blocks labelled
// by bit strings b, O'_j = sum_b (-1)^{b_j} Pi_b on V, copied to every other
// Pauli sector by destabilizer conjugation.
StabilizerSet stabilizer_decomposition(const DensityMatrix& rho, double tol = 1e-9);
std::vector<double> stabilizer_opent_profile(const StabilizerSet& s, int cut);

}  // namespace akim
