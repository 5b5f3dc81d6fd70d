#include "akim/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace akim {

// ------------------------------------------------------------ trajectories

Reference parse_reference(const std::string& s) {
    if (s == "min(2t,N_A)" || s == "full") return Reference::saturate_full;
    if (s == "min(2t,N_A/2)" || s == "half") return Reference::saturate_half;
    if (s == "early-2t") return Reference::early_ramp;
    if (s == "none") return Reference::none;
    throw ArgumentError("unknown reference '" + s + "' (min(2t,N_A), min(2t,N_A/2), early-2t, none)");
}

std::string to_string(Reference r) {
    switch (r) {
        case Reference::saturate_full: return "min(2t,N_A)";
        case Reference::saturate_half: return "min(2t,N_A/2)";
        case Reference::early_ramp: return "early-2t";
        case Reference::none: return "none";
    }
    return "none";
}

namespace {

std::optional<double> reference_value(Reference r, int n_a, int t) {
    switch (r) {
        case Reference::saturate_full: return std::min(2.0 * t, double(n_a));
        case Reference::saturate_half: return std::min(2.0 * t, n_a / 2.0);
        case Reference::early_ramp:
            if (4 * t <= n_a) return 2.0 * t;
            return std::nullopt;
        case Reference::none: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<double> eigenvalues_of(const Matrix& rho) {
    const Matrix h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    std::vector<double> p(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(p.begin(), p.end(), std::greater<>());
    return p;
}

// Eigenvalues of a unitary through its Cayley transform
// H = i (1 - zU)(1 + zU)^-1, which is Hermitian: a symmetric eigensolve is several
// times cheaper than a general one. The rotation z keeps -1 away from spec(zU);
// the best-conditioned of a fixed set of rotations is used.
std::vector<cplx> unitary_eigenvalues(const Matrix& u) {
    const Eigen::Index d = u.rows();
    const Matrix id = Matrix::Identity(d, d);
    double best_rcond = -1.0;
    cplx z;
    Eigen::PartialPivLU<Matrix> lu;
    for (int k = 0; k < 4; ++k) {
        const cplx zk = std::polar(1.0, 0.37 + 1.3 * k);
        Eigen::PartialPivLU<Matrix> luk(id + zk * u);
        const double rc = luk.rcond();
        if (rc > best_rcond) {
            best_rcond = rc;
            z = zk;
            lu = std::move(luk);
        }
        if (rc > 1e-2) break;
    }
    const Matrix h = cplx(0, 1) * lu.solve(id - z * u);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    std::vector<cplx> lam(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        const double x = es.eigenvalues()(i);
        const cplx v = (1.0 + cplx(0, x)) / (1.0 - cplx(0, x));
        lam[static_cast<std::size_t>(i)] = v / std::abs(v) / z;
    }
    return lam;
}

}  // namespace

TrajectoryReport entanglement_trajectory(int n_a, GatePhases phases, const PureState& psi_a, int t_max,
                                         Reference reference, const std::string& descriptor, double flat_tol) {
    if (psi_a.n_qubits != n_a) throw ArgumentError("entanglement_trajectory: state size differs from N_A");
    if (n_a > kMaxTrajectoryQubits)
        throw CapacityError("entanglement_trajectory: N_A=" + std::to_string(n_a) + " exceeds " +
                            std::to_string(kMaxTrajectoryQubits));
    if (t_max < 0) throw ArgumentError("entanglement_trajectory: t_max must be >= 0");
    if (t_max > 2 * n_a) throw CapacityError("entanglement_trajectory: t_max exceeds 2 N_A");
    const Channel c = build_channel(n_a, phases);
    TrajectoryReport r;
    r.n_a = n_a;
    r.phases = phases;
    r.initial_state = descriptor;
    r.reference = reference;
    Matrix rho = psi_a.amplitudes * psi_a.amplitudes.adjoint();
    for (int t = 0; t <= t_max; ++t) {
        if (t > 0) rho = c.apply(rho);
        const auto p = eigenvalues_of(rho);
        const double s = std::clamp(entropy_of_spectrum(p, 1.0), 0.0, double(n_a));
        double lo = s, hi = s;
        for (double order : {2.0, 3.0, std::numeric_limits<double>::infinity()}) {
            const double x = entropy_of_spectrum(p, order);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        r.entropy.push_back(s);
        r.renyi_spread.push_back(hi - lo);
        r.flat.push_back(entanglement_spectrum(DensityMatrix(n_a, rho, 1e-8), flat_tol).flat);
        r.expected.push_back(reference_value(reference, n_a, t));
        if (r.expected.back()) r.max_deviation = std::max(r.max_deviation, std::abs(s - *r.expected.back()));
    }
    return r;
}

// --------------------------------------------------------------------- SFF

EnsembleMode parse_ensemble(const std::string& s) {
    if (s == "random" || s == "all-vertices") return EnsembleMode::all_vertices;
    if (s == "g0-zero") return EnsembleMode::g0_zero_sites;
    if (s == "g0-zero-shared") return EnsembleMode::g0_zero_shared;
    throw ArgumentError("unknown ensemble '" + s + "' (random, g0-zero, g0-zero-shared)");
}

std::string to_string(EnsembleMode m) {
    switch (m) {
        case EnsembleMode::all_vertices: return "random";
        case EnsembleMode::g0_zero_sites: return "g0-zero";
        case EnsembleMode::g0_zero_shared: return "g0-zero-shared";
    }
    return "random";
}

ChainSpec ensemble_sample(const EnsembleSpec& e, int sample) {
    std::seed_seq seq{static_cast<std::uint32_t>(e.seed), static_cast<std::uint32_t>(e.seed >> 32),
                      static_cast<std::uint32_t>(sample)};
    std::mt19937_64 gen(seq);
    // 53-bit uniform in [0, 1), independent of the standard library's distributions
    auto angle = [&] { return 2 * kPi * std::ldexp(static_cast<double>(gen() >> 11), -53); };
    std::array<std::vector<double>, 2> ph{std::vector<double>(e.L, 0.0), std::vector<double>(e.L, 0.0)};
    switch (e.mode) {
        case EnsembleMode::all_vertices:
            for (auto& layer : ph)
                for (auto& x : layer) x = angle();
            break;
        case EnsembleMode::g0_zero_sites:
            // site k is the right member of its bond in layer (k + 1) % 2
            for (int k = 0; k < e.L; ++k) ph[(k + 1) % 2][k] = angle();
            break;
        case EnsembleMode::g0_zero_shared: {
            const double g = angle();
            for (int k = 0; k < e.L; ++k) ph[(k + 1) % 2][k] = g;
            break;
        }
    }
    return ChainSpec(e.L, e.boundary, ph);
}

SFFSeries sff(const EnsembleSpec& e, int t_max) {
    if (e.L > kMaxSFFQubits)
        throw CapacityError("sff: L=" + std::to_string(e.L) + " exceeds " + std::to_string(kMaxSFFQubits));
    if (e.samples < 1) throw ArgumentError("sff: samples must be >= 1");
    if (t_max < 0) throw ArgumentError("sff: t_max must be >= 0");
    const std::size_t nt = static_cast<std::size_t>(t_max) + 1;
    // Per-sample series are computed independently, then reduced in sample order.
    std::vector<std::vector<double>> k_of(e.samples);
    const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
    auto work = [&](unsigned w) {
        for (int s = static_cast<int>(w); s < e.samples; s += static_cast<int>(workers)) {
            const Matrix u = floquet_operator(ensemble_sample(e, s));
            const std::vector<cplx> lam = unitary_eigenvalues(u);
            std::vector<cplx> pw(lam.size(), 1.0);
            std::vector<double> k(nt, 0.0);
            for (std::size_t t = 1; t < nt; ++t) {
                cplx tr = 0.0;
                for (std::size_t i = 0; i < lam.size(); ++i) tr += pw[i] *= lam[i];
                k[t] = std::norm(tr);
            }
            k_of[s] = std::move(k);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    std::vector<double> sum(nt, 0.0), sum2(nt, 0.0);
    for (const auto& k : k_of)
        for (std::size_t t = 1; t < nt; ++t) {
            sum[t] += k[t];
            sum2[t] += k[t] * k[t];
        }
    SFFSeries out;
    out.samples = e.samples;
    const double n = e.samples;
    for (std::size_t t = 0; t < nt; ++t) {
        out.t.push_back(static_cast<int>(t));
        if (t == 0) {
            out.mean.push_back(std::ldexp(1.0, 2 * e.L));
            out.stderr_.push_back(0.0);
            continue;
        }
        const double mean = sum[t] / n;
        const double var = e.samples > 1 ? std::max(0.0, (sum2[t] - n * mean * mean) / (n - 1)) : 0.0;
        out.mean.push_back(mean);
        out.stderr_.push_back(std::sqrt(var / n));
    }
    return out;
}

double coe_reference(double t, int n_qubits) {
    return 2 * t - t * std::log1p(2 * t / std::ldexp(1.0, n_qubits));
}

RevivalReport detect_revivals(const SFFSeries& s, int n_qubits, double threshold) {
    RevivalReport r;
    r.threshold = threshold;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (s.t[i] < 1) continue;
        const double ratio = s.mean[i] / coe_reference(s.t[i], n_qubits);
        if (ratio > r.max_ratio) {
            r.max_ratio = ratio;
            r.argmax_t = s.t[i];
        }
        if (ratio >= threshold) r.times.push_back(s.t[i]);
    }
    return r;
}

// ------------------------------------------------------------- stabilizers

namespace {

struct Symplectic {
    std::uint64_t x = 0, z = 0;  // bit q of x: X or Y on qubit q; of z: Z or Y
};

Symplectic symplectic_of(std::size_t index, int n) {
    Symplectic s;
    for (int q = n - 1; q >= 0; --q, index /= 4) {
        const auto d = index % 4;
        if (d == 1 || d == 2) s.x |= std::uint64_t{1} << q;
        if (d == 2 || d == 3) s.z |= std::uint64_t{1} << q;
    }
    return s;
}

bool anticommute(const Symplectic& a, const Symplectic& b) {
    return (std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) % 2 == 1;
}

int pauli_weight(std::size_t index, int n) {
    int w = 0;
    for (int q = 0; q < n; ++q, index /= 4) w += index % 4 != 0;
    return w;
}

// XOR basis over GF(2)^{2n} keyed by leading bit.
struct Gf2Basis {
    std::vector<std::pair<int, unsigned __int128>> rows;
    bool insert(unsigned __int128 v) {
        for (const auto& [lead, r] : rows)
            if ((v >> lead) & 1) v ^= r;
        if (v == 0) return false;
        int lead = 127;
        while (!((v >> lead) & 1)) --lead;
        for (auto& row : rows)
            if ((row.second >> lead) & 1) row.second ^= v;
        rows.emplace_back(lead, v);
        return true;
    }
};

unsigned __int128 packed(const Symplectic& s) { return (static_cast<unsigned __int128>(s.x) << 64) | s.z; }

// Orthonormal columns spanning the range of a projector, by Gram-Schmidt on the
// projected computational basis vectors in index order.
Matrix range_basis(const Matrix& proj, Eigen::Index dim) {
    const Eigen::Index d = proj.rows();
    Matrix out(d, dim);
    Eigen::Index found = 0;
    for (Eigen::Index i = 0; i < d && found < dim; ++i) {
        Vector v = proj.col(i);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index k = 0; k < found; ++k) v -= out.col(k).dot(v) * out.col(k);
        const double nrm = v.norm();
        if (nrm < 1e-6) continue;
        out.col(found++) = v / nrm;
    }
    if (found != dim) throw InternalError("range_basis: projector rank deficient");
    return out;
}

}  // namespace

StabilizerSet stabilizer_decomposition(const DensityMatrix& rho, double tol) {
    const int n = rho.n_qubits;
    const Eigen::Index d = Eigen::Index{1} << n;
    const Matrix h = 0.5 * (rho.matrix + rho.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    std::vector<double> spectrum(es.eigenvalues().data(), es.eigenvalues().data() + d);
    std::sort(spectrum.begin(), spectrum.end(), std::greater<>());

    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < d; ++i)
        if (es.eigenvalues()(i) > tol) support.push_back(i);
    const auto r = static_cast<Eigen::Index>(support.size());
    bool flat = r > 0 && std::has_single_bit(static_cast<std::uint64_t>(r));
    for (Eigen::Index i : support) flat = flat && std::abs(es.eigenvalues()(i) - 1.0 / double(r)) <= tol;
    if (!flat) throw NotDecomposableError("not stabilizer-decomposable: spectrum is not flat of rank 2^k", spectrum);
    const int m = n - std::countr_zero(static_cast<std::uint64_t>(r));

    Matrix vs(d, r);
    for (Eigen::Index k = 0; k < r; ++k) vs.col(k) = es.eigenvectors().col(support[k]);
    const Matrix proj = vs * vs.adjoint();

    StabilizerSet out;
    out.n = n;
    if (m > 0) {
        // signed Pauli strings with P Pi = Pi, i.e. |tr(P Pi)| = r
        struct Cand {
            int weight;
            std::size_t index;
            double sign;
        };
        std::vector<Cand> cands;
        const std::size_t np = std::size_t{1} << (2 * n);
        for (std::size_t p = 1; p < np; ++p) {
            const cplx tr = pauli_trace(p, n, proj);
            if (std::abs(std::abs(tr.real()) - double(r)) < 1e-8 * double(r))
                cands.push_back({pauli_weight(p, n), p, tr.real() > 0 ? 1.0 : -1.0});
        }
        std::sort(cands.begin(), cands.end(),
                  [](const Cand& a, const Cand& b) { return a.weight != b.weight ? a.weight < b.weight : a.index < b.index; });
        Gf2Basis basis;
        std::vector<Cand> chosen;
        for (const auto& c : cands) {
            if (static_cast<int>(chosen.size()) == m) break;
            if (basis.insert(packed(symplectic_of(c.index, n)))) chosen.push_back(c);
        }
        for (const auto& c : chosen) {
            out.operators.push_back(c.sign * pauli_matrix(c.index, n));
            out.labels.push_back((c.sign > 0 ? "+" : "-") + pauli_label(c.index, n));
        }
        out.pauli_count = static_cast<int>(chosen.size());

        const int k = out.pauli_count, extra = m - k;
        if (extra > 0) {
            Matrix pv = Matrix::Identity(d, d);
            for (const auto& o : out.operators) pv = 0.5 * (pv + o * pv);
            const Eigen::Index dim_v = d >> k;
            const Matrix complement = range_basis(pv - proj, dim_v - r);

            // block c (c = 0 is the support) is labelled by the bits of c, most significant first
            const Eigen::Index blocks = Eigen::Index{1} << extra;
            std::vector<Matrix> on_v(extra, pv);
            for (Eigen::Index c = 1; c < blocks; ++c) {
                const Matrix b = complement.middleCols((c - 1) * r, r);
                const Matrix pb = b * b.adjoint();
                for (int j = 0; j < extra; ++j)
                    if ((c >> (extra - 1 - j)) & 1) on_v[j] -= 2.0 * pb;
            }
            // destabilizer of chosen[s]: the first Pauli anticommuting with it alone
            std::vector<Matrix> destab;
            for (int s = 0; s < k; ++s) {
                std::size_t found = 0;
                for (std::size_t p = 1; p < np && !found; ++p) {
                    const Symplectic sp = symplectic_of(p, n);
                    bool ok = true;
                    for (int t = 0; t < k && ok; ++t)
                        ok = anticommute(sp, symplectic_of(chosen[t].index, n)) == (t == s);
                    if (ok) found = p;
                }
                if (!found) throw InternalError("stabilizer_decomposition: no destabilizer");
                destab.push_back(pauli_matrix(found, n));
            }
            for (int j = 0; j < extra; ++j) {
                Matrix o = Matrix::Zero(d, d);
                for (std::size_t sub = 0; sub < (std::size_t{1} << k); ++sub) {
                    Matrix ds = Matrix::Identity(d, d);
                    for (int s = 0; s < k; ++s)
                        if ((sub >> s) & 1) ds = ds * destab[s];
                    o += ds * on_v[j] * ds.adjoint();
                }
                out.operators.push_back(0.5 * (o + o.adjoint()));
                out.labels.emplace_back();
            }
        }
    }
    Matrix prod = Matrix::Identity(d, d);
    for (const auto& o : out.operators) prod = prod * (Matrix::Identity(d, d) + o);
    out.residual = max_abs_diff(std::ldexp(1.0, -n) * prod, rho.matrix);
    return out;
}

std::vector<double> stabilizer_opent_profile(const StabilizerSet& s, int cut) {
    std::vector<double> out;
    for (const auto& o : s.operators) out.push_back(operator_entanglement(o, s.n, cut));
    return out;
}

}  // namespace akim
